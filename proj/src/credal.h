#pragma once
#include <vector>

namespace creinn {

// A per-sample box of class-probability intervals [lo_k, hi_k].
struct ProbBox {
  std::vector<double> lo, hi;
  int classes() const { return (int)lo.size(); }
};

// Shannon entropy in bits; zero terms contribute zero.
double entropy_bits(const std::vector<double>& q);

// Tightens a proper box (sum lo <= 1 <= sum hi) against the simplex:
//   lo*_k = max(lo_k, 1 - sum_{j != k} hi_j)
//   hi*_k = min(hi_k, 1 - sum_{j != k} lo_j)
// Idempotent; every distribution in the box survives. Propriety violations up
// to 1e-9 (floating-point crumbs from the softmax head) are repaired by
// scaling the offending side; larger violations throw std::invalid_argument.
// All uncertainty measures expect boxes that went through this.
ProbBox reachable(const ProbBox& b);

// Single representative distribution: q_k = lo_k + alpha (hi_k - lo_k) with
// one alpha chosen so sum q = 1. Zero total width gives alpha = 0.
std::vector<double> intersection_probability(const ProbBox& reach);

// Index of the largest entry; ties go to the lowest index.
int predict_class(const std::vector<double>& q);

struct EntropyResult {
  double value = 0.0;
  std::vector<double> arg;  // a maximizer/minimizer attaining `value`
};

// Maximum entropy over the box intersected with the simplex. Water-filling:
// the maximizer is q_k = clamp(level, lo_k, hi_k) with the level solving
// sum q = 1 (bisection, then the level recomputed exactly from the final
// clamp pattern).
EntropyResult upper_entropy(const ProbBox& reach);

// Minimum entropy over the box intersected with the simplex. Entropy is
// concave, so the minimum sits at an extreme point; every extreme point has
// at most one coordinate strictly inside its interval. Enumerates all
// (free coordinate, bound pattern) combinations — C * 2^(C-1) candidates —
// and keeps the feasible one with least entropy.
EntropyResult lower_entropy(const ProbBox& reach);

struct BinaryUncertainty {
  double au = 0.0, eu = 0.0, tu = 0.0;
};

// Two-class closed forms on the positive-class interval [l, u] = box of
// class 1: AU = min(l, 1-u), EU = u - l, TU = min(1-l, u). On a tightened box
// the values do not depend on which class is called positive.
BinaryUncertainty binary_uncertainty(const ProbBox& reach);

// Elementwise mean of member boxes; preserves propriety.
ProbBox average_intervals(const std::vector<ProbBox>& members);

struct EnsembleDecomposition {
  double tu = 0.0, au = 0.0, eu = 0.0;
};

// Point-prediction ensemble decomposition: TU = H(mean), AU = mean H,
// EU = TU - AU.
EnsembleDecomposition ensemble_entropy_decomposition(
    const std::vector<std::vector<double>>& members);

// Per-sample uncertainty used by the evaluation harness. Two classes use the
// closed forms above (method "binary_interval"); otherwise AU is the lower
// entropy, TU the upper entropy and EU their difference (method
// "credal_entropy").
struct Uncertainty {
  double au = 0.0, eu = 0.0, tu = 0.0;
  const char* method = "";
};
Uncertainty uncertainty_measures(const ProbBox& reach);

}  // namespace creinn
