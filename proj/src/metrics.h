#pragma once
#include <array>
#include <utility>
#include <vector>

namespace creinn {

// Accuracy-rejection curve: sort samples by uncertainty (descending, stable),
// then point k is (k/n, accuracy of the n-k least uncertain samples),
// k = 0 .. n-1. Every kept set is non-empty.
struct ArCurve {
  std::vector<double> rejection;  // k/n
  std::vector<double> accuracy;
};
ArCurve ar_curve(const std::vector<double>& uncertainty,
                 const std::vector<int>& correct);

// Trapezoidal area of the curve over [0, (n-1)/n], renormalized by (n-1)/n so
// a flat curve at accuracy a scores exactly a.
double auarc(const ArCurve& c);

// P(ood score > id score) + 0.5 P(equal), computed from tie-averaged ranks.
double auroc(const std::vector<double>& id_scores,
             const std::vector<double>& ood_scores);

// Average precision with ood as the positive class; ties are handled by
// grouping equal scores into one threshold.
double auprc(const std::vector<double>& id_scores,
             const std::vector<double>& ood_scores);

// Mean over runs of the per-sample mean of level/baseline uncertainty.
// Samples whose baseline is below 1e-9 are excluded and counted; runs with no
// valid sample are skipped.
struct RelIncrease {
  double ratio = 0.0;
  long excluded = 0;
};
RelIncrease relative_increase(const std::vector<std::vector<double>>& baseline,
                              const std::vector<std::vector<double>>& level);

// Spearman rank correlation (tie-averaged ranks).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Input-noise interval levels (mu1, mu2) evaluated by the perturbation sweep;
// the first pair doubles as the training level.
inline constexpr std::array<std::pair<double, double>, 4> kNoiseLevelPairs = {
    {{0.0, 0.08}, {0.12, 0.16}, {0.16, 0.18}, {0.18, 0.20}}};

}  // namespace creinn
