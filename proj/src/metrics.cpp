#include "metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace creinn {

ArCurve ar_curve(const std::vector<double>& uncertainty,
                 const std::vector<int>& correct) {
  const int n = (int)uncertainty.size();
  if (n == 0 || correct.size() != uncertainty.size())
    throw std::invalid_argument("ar_curve: empty input or size mismatch");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return uncertainty[a] > uncertainty[b];
  });
  // suffix[k] = number of correct among the samples kept after rejecting the
  // k most uncertain ones
  std::vector<long> suffix(n + 1, 0);
  for (int k = n - 1; k >= 0; --k)
    suffix[k] = suffix[k + 1] + (correct[idx[k]] ? 1 : 0);
  ArCurve c;
  c.rejection.resize(n);
  c.accuracy.resize(n);
  for (int k = 0; k < n; ++k) {
    c.rejection[k] = (double)k / n;
    c.accuracy[k] = (double)suffix[k] / (n - k);
  }
  return c;
}

double auarc(const ArCurve& c) {
  const int n = (int)c.rejection.size();
  if (n == 0) throw std::invalid_argument("auarc: empty curve");
  if (n == 1) return c.accuracy[0];
  double area = 0.0;
  for (int k = 0; k + 1 < n; ++k)
    area += 0.5 * (c.accuracy[k] + c.accuracy[k + 1]) *
            (c.rejection[k + 1] - c.rejection[k]);
  return area / c.rejection[n - 1];
}

// Tie-averaged ranks of the concatenation, 1-based.
static std::vector<double> ranks(const std::vector<double>& v) {
  const int n = (int)v.size();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (double)(i + 1 + j + 1);
    for (int t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

double auroc(const std::vector<double>& id_scores,
             const std::vector<double>& ood_scores) {
  const size_t n = id_scores.size(), m = ood_scores.size();
  if (n == 0 || m == 0) throw std::invalid_argument("auroc: empty inputs");
  std::vector<double> all;
  all.reserve(n + m);
  all.insert(all.end(), id_scores.begin(), id_scores.end());
  all.insert(all.end(), ood_scores.begin(), ood_scores.end());
  const auto r = ranks(all);
  double rank_sum = 0.0;
  for (size_t i = 0; i < m; ++i) rank_sum += r[n + i];
  return (rank_sum - (double)m * (m + 1) / 2.0) / ((double)n * (double)m);
}

double auprc(const std::vector<double>& id_scores,
             const std::vector<double>& ood_scores) {
  const size_t n = id_scores.size(), m = ood_scores.size();
  if (n == 0 || m == 0) throw std::invalid_argument("auprc: empty inputs");
  struct Entry {
    double s;
    int pos;
  };
  std::vector<Entry> e;
  e.reserve(n + m);
  for (double s : id_scores) e.push_back({s, 0});
  for (double s : ood_scores) e.push_back({s, 1});
  std::sort(e.begin(), e.end(),
            [](const Entry& a, const Entry& b) { return a.s > b.s; });
  double ap = 0.0, prev_recall = 0.0;
  long tp = 0, fp = 0;
  size_t i = 0;
  while (i < e.size()) {
    size_t j = i;
    while (j + 1 < e.size() && e[j + 1].s == e[i].s) ++j;
    for (size_t t = i; t <= j; ++t) (e[t].pos ? tp : fp) += 1;
    const double precision = (double)tp / (double)(tp + fp);
    const double recall = (double)tp / (double)m;
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j + 1;
  }
  return ap;
}

RelIncrease relative_increase(const std::vector<std::vector<double>>& baseline,
                              const std::vector<std::vector<double>>& level) {
  if (baseline.size() != level.size() || baseline.empty())
    throw std::invalid_argument("relative_increase: run count mismatch");
  RelIncrease out;
  double run_sum = 0.0;
  long runs_used = 0;
  for (size_t e = 0; e < baseline.size(); ++e) {
    if (baseline[e].size() != level[e].size())
      throw std::invalid_argument("relative_increase: sample count mismatch");
    double s = 0.0;
    long used = 0;
    for (size_t i = 0; i < baseline[e].size(); ++i) {
      if (baseline[e][i] < 1e-9) {
        ++out.excluded;
        continue;
      }
      s += level[e][i] / baseline[e][i];
      ++used;
    }
    if (used > 0) {
      run_sum += s / used;
      ++runs_used;
    }
  }
  if (runs_used == 0)
    throw std::invalid_argument("relative_increase: no usable samples");
  out.ratio = run_sum / runs_used;
  return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman: need two same-length vectors");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = (double)x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace creinn
