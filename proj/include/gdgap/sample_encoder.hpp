#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gdgap/rational.hpp"
#include "gdgap/types.hpp"

namespace gdgap::enc {

/// A batch is a multiset of point indices in Z = {0, ..., |Z|-1}.
using Batch = std::vector<std::size_t>;
using SampleSequence = std::vector<Batch>;

/// Encoding coordinate after t steps. symbolic[z] is P_{S,t,z}, so that
/// x_t = gamma eta sum_z alpha(z) P_{S,t,z}(1 - gamma eta).
struct EncodedState {
  int t = 0;
  std::vector<RationalPoly> symbolic;
  double numeric = 0.0;
};

struct AlphaMap {
  bool symbolic = false;
  std::size_t count = 0;
  Vec values;  // numeric instantiation; empty in symbolic mode
};

/// Numeric mode: alpha(z) = frac(sqrt(p_z)) for the z-th prime. Symbolic mode
/// keeps |Z| formal symbols and no values.
AlphaMap assign_alpha(std::size_t domain_size, bool symbolic = false);

/// alpha(S) = (1/|S|) sum_{z in S} alpha(z)
double batch_alpha(const Batch& batch, const AlphaMap& alpha);

EncodedState initial_state(std::size_t domain_size);

/// x_t = (1 - gamma eta) x_{t-1} + gamma eta alpha(S_t); P_t = c_t + X P_{t-1}
/// with c_t(z) = count of z in S_t / |S_t|. Requires gamma eta in (0, 1).
EncodedState step(const EncodedState& state, const Batch& batch, double gamma, double eta,
                  const AlphaMap& alpha);

/// sum_{n=0}^{t-1} (#z in S_{t-n} / |S_{t-n}|) X^n
RationalPoly polynomial_of(const SampleSequence& sequence, int t, std::size_t z);

/// gamma eta sum_z alpha(z) P_z(1 - gamma eta), evaluated in double.
double closed_form_x(const std::vector<RationalPoly>& symbolic, double gamma, double eta,
                     const AlphaMap& alpha);

/// First r in eps/2, eps/4, ... such that 1 - r is not a root of any nonzero
/// polynomial in the set. Throws Exhausted after max_halvings candidates.
Rational choose_r(const std::vector<RationalPoly>& differences, const Rational& eps,
                  int max_halvings = 200);

/// Same candidates; accepts r when, inside every group, distinct polynomials
/// take distinct values at 1 - r (equivalent to avoiding all pairwise
/// difference roots without forming them).
Rational choose_r_separating(const std::vector<std::vector<RationalPoly>>& groups,
                             const Rational& eps, int max_halvings = 200);

/// gamma = r / eta with r chosen below eps / T, so gamma <= eps / (eta T).
Rational choose_gamma(const std::vector<std::vector<RationalPoly>>& groups, const Rational& eps,
                      const Rational& eta, long T);

struct InjectivityOptions {
  std::size_t budget = 100000;  // maximal number of enumerated prefix states
  bool multisets = false;       // batches are m-subsets unless set
  Rational eps = Rational(1, 10);
  Rational eta = Rational(1, 2);
};

struct InjectivityReport {
  std::size_t domain_size = 0;
  int m = 0;
  int T = 0;
  std::size_t batches = 0;        // distinct batches per step
  std::size_t states = 0;         // enumerated prefixes (S, t), t >= 1
  std::size_t outputs = 0;        // full-length sequences
  int last_weighted_step = 0;     // largest t with q(t) != 0
  bool item1_symbolic = false;    // distinct prefixes give distinct polynomial tuples
  bool item1_evaluated = false;   // ... and distinct tuples at X = 1 - r
  bool item2_symbolic = false;    // no output tuple equals an earlier state
  bool item2_evaluated = false;
  bool prefix_sound = false;      // recursion equals polynomial_of on every prefix
  bool closed_form_ok = false;    // numeric recursion equals closed form to 1e-12
  double max_closed_form_error = 0.0;
  double min_numeric_gap = 0.0;   // diagnostic: smallest gap between distinct numeric x
  Rational r;
  Rational gamma;
  bool pass() const {
    return item1_symbolic && item1_evaluated && item2_symbolic && item2_evaluated && prefix_sound &&
           closed_form_ok;
  }
};

/// Enumerates every prefix of every length-T batch sequence over Z and checks
/// both injectivity items. q has length T. Throws BudgetExceeded when the
/// enumeration would exceed options.budget states.
InjectivityReport check_injectivity(int m, int T, std::size_t domain_size,
                                    const std::vector<Rational>& q,
                                    const InjectivityOptions& options = {});

/// Every distinct batch of size m over Z, in lexicographic order.
std::vector<Batch> enumerate_batches(std::size_t domain_size, int m, bool multisets);

std::string to_json(const InjectivityReport& report);

}  // namespace gdgap::enc
