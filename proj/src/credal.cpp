#include "credal.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace creinn {

static constexpr double kProprietyTol = 1e-9;

double entropy_bits(const std::vector<double>& q) {
  double h = 0.0;
  for (double v : q) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

static void validate_box(const ProbBox& b) {
  if (b.lo.size() != b.hi.size() || b.lo.size() < 2)
    throw std::invalid_argument("probability box needs >= 2 classes");
  for (size_t k = 0; k < b.lo.size(); ++k) {
    if (!(b.lo[k] >= -kProprietyTol && b.hi[k] <= 1.0 + kProprietyTol &&
          b.lo[k] <= b.hi[k] + kProprietyTol))
      throw std::invalid_argument("probability box entries out of range");
  }
}

ProbBox reachable(const ProbBox& b) {
  validate_box(b);
  const int C = b.classes();
  ProbBox x = b;
  // Clamp crumbs into [0,1] and enforce lo <= hi.
  for (int k = 0; k < C; ++k) {
    x.lo[k] = std::min(std::max(x.lo[k], 0.0), 1.0);
    x.hi[k] = std::min(std::max(x.hi[k], 0.0), 1.0);
    if (x.lo[k] > x.hi[k]) x.lo[k] = x.hi[k];
  }
  double Sl = 0.0, Sh = 0.0;
  for (int k = 0; k < C; ++k) { Sl += x.lo[k]; Sh += x.hi[k]; }
  if (Sl > 1.0 + kProprietyTol || Sh < 1.0 - kProprietyTol)
    throw std::invalid_argument("probability box is not proper");
  if (Sl > 1.0)
    for (int k = 0; k < C; ++k) x.lo[k] /= Sl;
  if (Sh < 1.0)
    for (int k = 0; k < C; ++k) x.hi[k] = std::min(x.hi[k] / Sh, 1.0);
  Sl = 0.0; Sh = 0.0;
  for (int k = 0; k < C; ++k) { Sl += x.lo[k]; Sh += x.hi[k]; }

  ProbBox out;
  out.lo.resize(C);
  out.hi.resize(C);
  for (int k = 0; k < C; ++k) {
    out.lo[k] = std::max(x.lo[k], 1.0 - (Sh - x.hi[k]));
    out.hi[k] = std::min(x.hi[k], 1.0 - (Sl - x.lo[k]));
    // Roundoff can cross the endpoints by an ulp; collapse, never invert.
    if (out.lo[k] > out.hi[k]) {
      assert(out.lo[k] - out.hi[k] < kProprietyTol);
      out.lo[k] = out.hi[k];
    }
  }
  return out;
}

std::vector<double> intersection_probability(const ProbBox& reach) {
  const int C = reach.classes();
  double Sl = 0.0, W = 0.0;
  for (int k = 0; k < C; ++k) {
    Sl += reach.lo[k];
    W += reach.hi[k] - reach.lo[k];
  }
  double alpha = 0.0;
  if (W > 0.0) alpha = std::min(std::max((1.0 - Sl) / W, 0.0), 1.0);
  std::vector<double> q(C);
  for (int k = 0; k < C; ++k)
    q[k] = reach.lo[k] + alpha * (reach.hi[k] - reach.lo[k]);
  return q;
}

int predict_class(const std::vector<double>& q) {
  int best = 0;
  for (int k = 1; k < (int)q.size(); ++k)
    if (q[k] > q[best]) best = k;
  return best;
}

EntropyResult upper_entropy(const ProbBox& reach) {
  const int C = reach.classes();
  const auto& l = reach.lo;
  const auto& u = reach.hi;
  double lam_lo = *std::min_element(l.begin(), l.end());
  double lam_hi = *std::max_element(u.begin(), u.end());
  auto mass = [&](double lam) {
    double s = 0.0;
    for (int k = 0; k < C; ++k) s += std::min(std::max(lam, l[k]), u[k]);
    return s;
  };
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lam_lo + lam_hi);
    (mass(mid) < 1.0 ? lam_lo : lam_hi) = mid;
  }
  const double lam = 0.5 * (lam_lo + lam_hi);
  // Recompute the level exactly from the final clamp pattern so free
  // coordinates are equal to machine precision.
  double clamped_sum = 0.0;
  int n_free = 0;
  for (int k = 0; k < C; ++k) {
    if (lam <= l[k]) clamped_sum += l[k];
    else if (lam >= u[k]) clamped_sum += u[k];
    else ++n_free;
  }
  EntropyResult res;
  res.arg.resize(C);
  const double level = n_free > 0 ? (1.0 - clamped_sum) / n_free : lam;
  for (int k = 0; k < C; ++k)
    res.arg[k] = std::min(std::max(level, l[k]), u[k]);
  res.value = entropy_bits(res.arg);
  return res;
}

EntropyResult lower_entropy(const ProbBox& reach) {
  const int C = reach.classes();
  const auto& l = reach.lo;
  const auto& u = reach.hi;
  EntropyResult best;
  best.value = 1e300;
  std::vector<double> q(C);
  for (int f = 0; f < C; ++f) {
    const int others = C - 1;
    for (unsigned long pat = 0; pat < (1UL << others); ++pat) {
      double rest = 0.0;
      int bit = 0;
      for (int k = 0; k < C; ++k) {
        if (k == f) continue;
        q[k] = (pat >> bit) & 1 ? u[k] : l[k];
        rest += q[k];
        ++bit;
      }
      const double qf = 1.0 - rest;
      if (qf < l[f] - 1e-12 || qf > u[f] + 1e-12) continue;
      q[f] = std::min(std::max(qf, l[f]), u[f]);
      const double h = entropy_bits(q);
      if (h < best.value) {
        best.value = h;
        best.arg = q;
      }
    }
  }
  if (best.arg.empty()) {
    // Unreachable for tightened boxes; keep a safe fallback anyway.
    best.arg = intersection_probability(reach);
    best.value = entropy_bits(best.arg);
  }
  return best;
}

BinaryUncertainty binary_uncertainty(const ProbBox& reach) {
  if (reach.classes() != 2)
    throw std::invalid_argument("binary_uncertainty needs exactly 2 classes");
  const double l = reach.lo[1], u = reach.hi[1];
  BinaryUncertainty b;
  b.au = std::min(l, 1.0 - u);
  b.eu = u - l;
  b.tu = std::min(1.0 - l, u);
  return b;
}

ProbBox average_intervals(const std::vector<ProbBox>& members) {
  if (members.empty())
    throw std::invalid_argument("average_intervals needs >= 1 member");
  const int C = members[0].classes();
  ProbBox out;
  out.lo.assign(C, 0.0);
  out.hi.assign(C, 0.0);
  for (const auto& m : members) {
    if (m.classes() != C)
      throw std::invalid_argument("ensemble members disagree on classes");
    for (int k = 0; k < C; ++k) {
      out.lo[k] += m.lo[k];
      out.hi[k] += m.hi[k];
    }
  }
  for (int k = 0; k < C; ++k) {
    out.lo[k] /= (double)members.size();
    out.hi[k] /= (double)members.size();
  }
  return out;
}

EnsembleDecomposition ensemble_entropy_decomposition(
    const std::vector<std::vector<double>>& members) {
  if (members.empty())
    throw std::invalid_argument("decomposition needs >= 1 member");
  const int C = (int)members[0].size();
  std::vector<double> mean(C, 0.0);
  double h_sum = 0.0;
  for (const auto& q : members) {
    if ((int)q.size() != C)
      throw std::invalid_argument("ensemble members disagree on classes");
    for (int k = 0; k < C; ++k) mean[k] += q[k];
    h_sum += entropy_bits(q);
  }
  for (int k = 0; k < C; ++k) mean[k] /= (double)members.size();
  EnsembleDecomposition d;
  d.tu = entropy_bits(mean);
  d.au = h_sum / (double)members.size();
  d.eu = d.tu - d.au;
  return d;
}

Uncertainty uncertainty_measures(const ProbBox& reach) {
  Uncertainty m;
  if (reach.classes() == 2) {
    const BinaryUncertainty b = binary_uncertainty(reach);
    m.au = b.au;
    m.eu = b.eu;
    m.tu = b.tu;
    m.method = "binary_interval";
  } else {
    const EntropyResult up = upper_entropy(reach);
    const EntropyResult lo = lower_entropy(reach);
    m.au = lo.value;
    m.tu = up.value;
    m.eu = up.value - lo.value;
    m.method = "credal_entropy";
  }
  return m;
}

}  // namespace creinn
