#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace gdgap {

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
using Rational = boost::multiprecision::cpp_rational;
using RVec = std::vector<Rational>;

/// Exact value of a finite double (every double is a dyadic rational).
Rational exact_rational(double x);

/// "p/q" or "p" for integers.
std::string to_string(const Rational& r);

/// Parses "p/q", "p", or a decimal such as "0.125" (decimal parsed exactly).
Rational parse_rational(const std::string& s);

double to_double(const Rational& r);

Rational dot(const RVec& a, const RVec& b);

/// Polynomial with exact rational coefficients, ascending degree. The zero
/// polynomial has no coefficients; otherwise the last coefficient is nonzero.
class RationalPoly {
 public:
  RationalPoly() = default;
  explicit RationalPoly(std::vector<Rational> coefficients);

  static RationalPoly monomial(const Rational& c, int degree);

  const std::vector<Rational>& coefficients() const { return coeffs_; }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  Rational coefficient(int n) const;

  Rational evaluate(const Rational& x) const;
  double evaluate(double x) const;

  /// X * p(X) + c
  RationalPoly shift_add(const Rational& c) const;

  RationalPoly operator+(const RationalPoly& o) const;
  RationalPoly operator-(const RationalPoly& o) const;
  RationalPoly scaled(const Rational& c) const;

  friend bool operator==(const RationalPoly& a, const RationalPoly& b) {
    return a.coeffs_ == b.coeffs_;
  }
  friend bool operator<(const RationalPoly& a, const RationalPoly& b);

  std::string to_string() const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

}  // namespace gdgap
