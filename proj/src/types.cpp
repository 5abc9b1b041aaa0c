#include "gdgap/types.hpp"

namespace gdgap {

const char* to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::none: return "none";
    case CaseTag::swap: return "swap";
    case CaseTag::raise: return "raise";
    case CaseTag::zero: return "zero";
    case CaseTag::outside: return "outside";
  }
  return "none";
}

std::vector<std::pair<std::size_t, double>> Subgradient::sparse() const {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t i = 0; i < vector.size(); ++i) {
    if (vector[i] != 0.0) out.emplace_back(i, vector[i]);
  }
  return out;
}

}  // namespace gdgap
