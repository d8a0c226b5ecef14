#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "metrics.h"
#include "rng.h"

using namespace creinn;

TEST_CASE("accuracy-rejection curve: worked three-sample case") {
  // Uncertainties (0.9, 0.1, 0.5), correctness (0, 1, 1). Rejection order is
  // sample 0, then sample 2: accuracies 2/3 -> 1 -> 1.
  ArCurve c = ar_curve({0.9, 0.1, 0.5}, {0, 1, 1});
  REQUIRE(c.rejection.size() == 3);
  CHECK(c.rejection[0] == doctest::Approx(0.0));
  CHECK(c.rejection[1] == doctest::Approx(1.0 / 3));
  CHECK(c.rejection[2] == doctest::Approx(2.0 / 3));
  CHECK(c.accuracy[0] == doctest::Approx(2.0 / 3));
  CHECK(c.accuracy[1] == doctest::Approx(1.0));
  CHECK(c.accuracy[2] == doctest::Approx(1.0));
  // Trapezoids over [0, 2/3], renormalized: ((2/3+1)/2 + 1) / 2 / (something
  // that maps a flat curve to its height) = 11/12.
  CHECK(auarc(c) == doctest::Approx(11.0 / 12).epsilon(1e-12));
}

TEST_CASE("accuracy-rejection curve: flat and perfectly ordered cases") {
  ArCurve flat = ar_curve({0.5, 0.2, 0.7, 0.1}, {1, 1, 1, 1});
  for (double a : flat.accuracy) CHECK(a == doctest::Approx(1.0));
  CHECK(auarc(flat) == doctest::Approx(1.0));

  // Mixed flat curve: accuracy stays at its overall value when uncertainty
  // carries no information beyond ties (all equal, stable order).
  std::vector<double> u = {0.9, 0.8, 0.4, 0.2, 0.6};
  std::vector<int> correct = {0, 1, 1, 1, 1};
  ArCurve ordered = ar_curve(u, correct);
  for (size_t i = 1; i < ordered.accuracy.size(); ++i)
    CHECK(ordered.accuracy[i] >= ordered.accuracy[i - 1] - 1e-12);
  CHECK(ordered.accuracy.front() == doctest::Approx(0.8));
  CHECK(ordered.accuracy.back() == doctest::Approx(1.0));
}

TEST_CASE("accuracy-rejection curve: ties keep original order") {
  // Equal uncertainties: stable sort rejects lower indices first.
  ArCurve c = ar_curve({0.5, 0.5, 0.5}, {0, 1, 1});
  CHECK(c.accuracy[0] == doctest::Approx(2.0 / 3));
  CHECK(c.accuracy[1] == doctest::Approx(1.0));  // sample 0 rejected first
  CHECK(c.accuracy[2] == doctest::Approx(1.0));
}

TEST_CASE("rank-sum separation score: worked cases") {
  CHECK(auroc({0.1, 0.2}, {0.3, 0.4}) == doctest::Approx(1.0));
  CHECK(auroc({0.3, 0.4}, {0.1, 0.2}) == doctest::Approx(0.0));
  CHECK(auroc({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.5));
  // Pairs: (0.1,0.3) win, (0.1,0.5) win, (0.4,0.3) loss, (0.4,0.5) win -> 3/4.
  CHECK(auroc({0.1, 0.4}, {0.3, 0.5}) == doctest::Approx(0.75));
  // Ties get half credit.
  CHECK(auroc({0.2}, {0.2}) == doctest::Approx(0.5));
}

TEST_CASE("rank-sum separation score equals brute-force pair counting") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> id((size_t)(5 + rng.below(60)));
    std::vector<double> ood((size_t)(5 + rng.below(60)));
    // Coarse lattice scores force plenty of ties.
    for (auto& v : id) v = (double)rng.below(12) / 10.0;
    for (auto& v : ood) v = (double)rng.below(12) / 10.0 + 0.2;
    double wins = 0.0;
    for (double o : ood)
      for (double i : id) {
        if (o > i) wins += 1.0;
        else if (o == i) wins += 0.5;
      }
    const double brute = wins / ((double)id.size() * ood.size());
    CHECK(auroc(id, ood) == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("average precision: worked cases") {
  CHECK(auprc({0.1, 0.2}, {0.3, 0.4}) == doctest::Approx(1.0));
  // Scores id = (0.1, 0.4), ood = (0.3, 0.5): descending order 0.5(+), 0.4(-),
  // 0.3(+), 0.1(-). Precision at each positive: 1/1 then 2/3 -> AP = 5/6.
  CHECK(auprc({0.1, 0.4}, {0.3, 0.5}) == doctest::Approx(5.0 / 6).epsilon(1e-12));
}

TEST_CASE("separation scores ignore monotone rescaling") {
  Rng rng(72);
  std::vector<double> id(40), ood(30);
  for (auto& v : id) v = rng.uniform(0.0, 1.0);
  for (auto& v : ood) v = rng.uniform(0.2, 1.2);
  auto squash = [](std::vector<double> v) {
    for (auto& x : v) x = 1.0 / (1.0 + std::exp(-3.0 * x));
    return v;
  };
  CHECK(auroc(id, ood) == doctest::Approx(auroc(squash(id), squash(ood))).epsilon(1e-12));
  CHECK(auprc(id, ood) == doctest::Approx(auprc(squash(id), squash(ood))).epsilon(1e-12));

  std::vector<int> correct(40);
  for (auto& c : correct) c = rng.below(2) ? 1 : 0;
  CHECK(auarc(ar_curve(id, correct)) ==
        doctest::Approx(auarc(ar_curve(squash(id), correct))).epsilon(1e-12));
}

TEST_CASE("uncertainty growth ratio: worked cases") {
  // Single run, single sample.
  RelIncrease r1 = relative_increase({{0.2}}, {{0.4}});
  CHECK(r1.ratio == doctest::Approx(2.0));
  CHECK(r1.excluded == 0);

  // Level equal to baseline.
  RelIncrease r2 = relative_increase({{0.3, 0.5}}, {{0.3, 0.5}});
  CHECK(r2.ratio == doctest::Approx(1.0));

  // Two runs with per-run mean ratios 1.5 and 2.5 average to 2.
  RelIncrease r3 = relative_increase({{0.2, 0.2}, {0.1, 0.3}},
                                     {{0.3, 0.3}, {0.25, 0.75}});
  CHECK(r3.ratio == doctest::Approx(2.0));

  // Near-zero baselines are excluded, not divided by.
  RelIncrease r4 = relative_increase({{1e-12, 0.2}}, {{0.5, 0.4}});
  CHECK(r4.excluded == 1);
  CHECK(r4.ratio == doctest::Approx(2.0));
}

TEST_CASE("rank correlation handles ties and reversals") {
  CHECK(spearman({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0));
  const double s = spearman({1, 2, 2, 4}, {1, 2, 3, 4});
  CHECK(s > 0.9);
  CHECK(s < 1.0);
}
