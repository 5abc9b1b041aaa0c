#include "gdgap/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace gdgap {

namespace mp = boost::multiprecision;

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("exact_rational: non-finite value");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent, |mantissa| in [0.5, 1)
  // Scale the mantissa to a 53-bit integer.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  mp::cpp_int num(scaled);
  mp::cpp_int den(1);
  if (exponent > 0) {
    num <<= exponent;
  } else {
    den <<= -exponent;
  }
  return Rational(num, den);
}

std::string to_string(const Rational& r) {
  const auto num = mp::numerator(r);
  const auto den = mp::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace {

// cpp_int reads a leading 0 as an octal prefix, so digits are normalized first.
mp::cpp_int parse_integer(std::string s) {
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("parse_rational: invalid integer '" + s + "'");
  }
  const auto first = s.find_first_not_of('0');
  s = first == std::string::npos ? "0" : s.substr(first);
  mp::cpp_int v(s);
  return negative ? mp::cpp_int(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const mp::cpp_int num = parse_integer(s.substr(0, slash));
    const mp::cpp_int den = parse_integer(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
    return Rational(num, den);
  }
  const auto dot_pos = s.find('.');
  if (dot_pos == std::string::npos) return Rational(parse_integer(s));
  std::string digits = s.substr(0, dot_pos) + s.substr(dot_pos + 1);
  const auto frac_len = s.size() - dot_pos - 1;
  const mp::cpp_int den = mp::pow(mp::cpp_int(10), static_cast<unsigned>(frac_len));
  return Rational(parse_integer(digits), den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational dot(const RVec& a, const RVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  }
  return s;
}

RationalPoly::RationalPoly(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) {
  trim();
}

RationalPoly RationalPoly::monomial(const Rational& c, int degree) {
  if (c == 0) return {};
  std::vector<Rational> coeffs(static_cast<std::size_t>(degree) + 1, Rational(0));
  coeffs.back() = c;
  return RationalPoly(std::move(coeffs));
}

Rational RationalPoly::coefficient(int n) const {
  if (n < 0 || n > degree()) return Rational(0);
  return coeffs_[static_cast<std::size_t>(n)];
}

Rational RationalPoly::evaluate(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double RationalPoly::evaluate(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_double(*it);
  return acc;
}

RationalPoly RationalPoly::shift_add(const Rational& c) const {
  std::vector<Rational> out;
  out.reserve(coeffs_.size() + 1);
  out.push_back(c);
  out.insert(out.end(), coeffs_.begin(), coeffs_.end());
  return RationalPoly(std::move(out));
}

RationalPoly RationalPoly::operator+(const RationalPoly& o) const {
  std::vector<Rational> out(std::max(coeffs_.size(), o.coeffs_.size()), Rational(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) out[i] += o.coeffs_[i];
  return RationalPoly(std::move(out));
}

RationalPoly RationalPoly::operator-(const RationalPoly& o) const { return *this + o.scaled(-1); }

RationalPoly RationalPoly::scaled(const Rational& c) const {
  if (c == 0) return {};
  std::vector<Rational> out = coeffs_;
  for (auto& x : out) x *= c;
  return RationalPoly(std::move(out));
}

bool operator<(const RationalPoly& a, const RationalPoly& b) {
  if (a.coeffs_.size() != b.coeffs_.size()) return a.coeffs_.size() < b.coeffs_.size();
  for (std::size_t i = a.coeffs_.size(); i-- > 0;) {
    if (a.coeffs_[i] != b.coeffs_[i]) return a.coeffs_[i] < b.coeffs_[i];
  }
  return false;
}

std::string RationalPoly::to_string() const {
  if (is_zero()) return "0";
  std::string out;
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    if (coeffs_[n] == 0) continue;
    if (!out.empty()) out += " + ";
    out += "(" + gdgap::to_string(coeffs_[n]) + ")";
    if (n >= 1) out += "X";
    if (n >= 2) out += "^" + std::to_string(n);
  }
  return out;
}

void RationalPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

}  // namespace gdgap
