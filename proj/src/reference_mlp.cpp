#include "reference_mlp.h"

#include <cassert>
#include <cmath>
#include <numeric>

#include "rng.h"

namespace creinn {

RefMlp ref_init(const ModelSpec& spec, uint64_t seed) {
  Rng rng(seed, kStreamInit);
  RefMlp net;
  const auto sizes = spec.layer_sizes();
  for (int l = 0; l + 1 < (int)sizes.size(); ++l) {
    const int n_in = sizes[l], n_out = sizes[l + 1];
    const double limit = std::sqrt(6.0 / (double)(n_in + n_out));
    Mat W(n_out, n_in), b(1, n_out);
    for (auto& w : W.a) w = rng.uniform(-limit, limit);
    // Keep the stream aligned with init_params, which draws radii next.
    for (size_t t = 0; t < W.size(); ++t) (void)rng.uniform(-limit, limit);
    net.W.push_back(std::move(W));
    net.b.push_back(std::move(b));
  }
  return net;
}

struct RefCache {
  Mat x;
  std::vector<Mat> lin_out, act_out;
  Mat q, D, E;  // head per-sample caches
  double loss = 0.0;
};

static void ref_forward(const ModelSpec& spec, const RefMlp& net, const Mat& x,
                        const std::vector<int>& y, RefCache& c) {
  const int L = (int)net.W.size();
  const int B = x.rows;
  c.x = x;
  c.lin_out.assign(L, Mat());
  c.act_out.assign(L - 1, Mat());
  const Mat* cur = &c.x;
  for (int l = 0; l < L; ++l) {
    const Mat& W = net.W[l];
    const Mat& b = net.b[l];
    Mat out(B, W.rows);
    for (int i = 0; i < B; ++i) {
      const double* a = cur->row(i);
      for (int k = 0; k < W.rows; ++k) {
        const double* w = W.row(k);
        double acc = b.at(0, k);
        for (int j = 0; j < W.cols; ++j) acc += w[j] * a[j];
        out.at(i, k) = acc;
      }
    }
    c.lin_out[l] = std::move(out);
    if (l < L - 1) {
      Mat act(B, c.lin_out[l].cols);
      for (size_t t = 0; t < act.size(); ++t)
        act.a[t] = std::max(c.lin_out[l].a[t], 0.0);
      c.act_out[l] = std::move(act);
      cur = &c.act_out[l];
    }
  }

  const int C = spec.classes;
  c.q = Mat(B, C);
  c.D = Mat(B, C);
  c.E = Mat(B, C);
  const Mat& logits = c.lin_out[L - 1];
  for (int i = 0; i < B; ++i) {
    const double* a = logits.row(i);
    double M = -1e300;
    for (int j = 0; j < C; ++j) {
      const double m = (a[j] + a[j]) * 0.5;  // how the interval head forms midpoints
      if (m > M) M = m;
    }
    double S = 0.0;
    for (int j = 0; j < C; ++j) {
      const double e = std::exp((a[j] + a[j]) * 0.5 - M);
      c.E.at(i, j) = e;
      S += e;
    }
    for (int k = 0; k < C; ++k) {
      const double rest = S - c.E.at(i, k);
      const double el = std::exp(a[k] - M);
      const double d = el + rest;
      c.D.at(i, k) = d;
      c.q.at(i, k) = el / d;
    }
  }
  // At zero width the simplex tightening copies its input and the summary
  // distribution has alpha = 0, so q passes through unchanged.
  if (!y.empty()) c.loss = ce_fwd(c.q, y);
}

struct RefGrads {
  std::vector<Mat> gW1, gW2, gb1, gb2;  // two adjoint streams per layer
  std::vector<Mat> gW, gb;
  void init(const RefMlp& net) {
    const size_t L = net.W.size();
    gW1.resize(L); gW2.resize(L); gb1.resize(L); gb2.resize(L);
    gW.resize(L); gb.resize(L);
    for (size_t l = 0; l < L; ++l) {
      gW1[l] = Mat(net.W[l].rows, net.W[l].cols);
      gW2[l] = Mat(net.W[l].rows, net.W[l].cols);
      gb1[l] = Mat(1, net.b[l].cols);
      gb2[l] = Mat(1, net.b[l].cols);
      gW[l] = Mat(net.W[l].rows, net.W[l].cols);
      gb[l] = Mat(1, net.b[l].cols);
    }
  }
  void zero() {
    for (auto* v : {&gW1, &gW2, &gb1, &gb2, &gW, &gb})
      for (auto& m : *v) m.zero();
  }
};

static void ref_backward(const RefMlp& net, const std::vector<int>& y,
                         RefCache& c, RefGrads& g) {
  const int L = (int)net.W.size();
  const int B = c.x.rows;
  const int C = c.q.cols;

  Mat gq(B, C);
  ce_bwd(c.q, y, gq);

  // Two streams out of the head, mirroring the zero-width interval pipeline
  // (summary-distribution backward at alpha = 0, then the head backward).
  Mat glo(B, C), ghi(B, C);
  std::vector<double> T(C);
  for (int i = 0; i < B; ++i) {
    double Tsum = 0.0;
    for (int k = 0; k < C; ++k) {
      const double gl = gq.at(i, k) * (1.0 - 0.0);
      const double gu = gq.at(i, k) * 0.0;
      T[k] = (gl * c.q.at(i, k)) / c.D.at(i, k) +
             (gu * c.q.at(i, k)) / c.D.at(i, k);
      Tsum += T[k];
    }
    for (int k = 0; k < C; ++k) {
      const double gl = gq.at(i, k) * (1.0 - 0.0);
      const double gu = gq.at(i, k) * 0.0;
      const double cross = 0.5 * c.E.at(i, k) * (Tsum - T[k]);
      glo.at(i, k) = gl * (c.q.at(i, k) * (1.0 - c.q.at(i, k))) - cross;
      ghi.at(i, k) = gu * (c.q.at(i, k) * (1.0 - c.q.at(i, k))) - cross;
    }
  }

  for (int l = L - 1; l >= 0; --l) {
    if (l < L - 1) {
      // ReLU masks both streams on the shared pre-activation sign.
      const Mat& pre = c.lin_out[l];
      for (size_t t = 0; t < pre.size(); ++t) {
        if (!(pre.a[t] >= 0.0)) {
          glo.a[t] = 0.0;
          ghi.a[t] = 0.0;
        }
      }
    }
    const Mat& a_in = (l == 0) ? c.x : c.act_out[l - 1];
    const Mat& W = net.W[l];
    Mat nglo(B, W.cols), nghi(B, W.cols);
    for (int i = 0; i < B; ++i) {
      const double* a = a_in.row(i);
      double* galo = nglo.row(i);
      double* gahi = nghi.row(i);
      for (int k = 0; k < W.rows; ++k) {
        const double gl = glo.at(i, k);
        const double gh = ghi.at(i, k);
        const double* w = W.row(k);
        double* gw1 = g.gW1[l].row(k);
        double* gw2 = g.gW2[l].row(k);
        for (int j = 0; j < W.cols; ++j) {
          gahi[j] += gl * mn(w[j]) + gh * mx(w[j]);
          galo[j] += gl * mx(w[j]) + gh * mn(w[j]);
          gw1[j] += gl * a[j];
          gw2[j] += gh * a[j];
        }
        g.gb1[l].at(0, k) += gl;
        g.gb2[l].at(0, k) += gh;
      }
    }
    glo = std::move(nglo);
    ghi = std::move(nghi);
  }
  for (int l = 0; l < L; ++l) {
    for (size_t t = 0; t < g.gW[l].size(); ++t)
      g.gW[l].a[t] = g.gW1[l].a[t] + g.gW2[l].a[t];
    for (size_t t = 0; t < g.gb[l].size(); ++t)
      g.gb[l].a[t] = g.gb1[l].a[t] + g.gb2[l].a[t];
  }
}

static Mat gather_rows_p(const Mat& X, const std::vector<int>& idx, int from,
                         int count) {
  Mat out(count, X.cols);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < X.cols; ++j) out.at(i, j) = X.at(idx[from + i], j);
  return out;
}

RefFitResult ref_fit(const ModelSpec& spec, const TrainConfig& cfg,
                     const Mat& X, const std::vector<int>& y,
                     const std::vector<int>& y_valid_select) {
  assert(spec.n_ibn() == 0);
  const int N = X.rows;
  const int ntrain = (5 * N) / 6;
  const int nval = N - ntrain;

  RefMlp net = ref_init(spec, cfg.seed);
  RefGrads grads;
  grads.init(net);
  // Adam moments in the same tensor order fit() walks (radius slots absent
  // here correspond to the slots fit() skips under freeze_radii).
  std::vector<Mat> am, av;
  for (int l = 0; l < (int)net.W.size(); ++l) {
    am.emplace_back(net.W[l].rows, net.W[l].cols);
    av.emplace_back(net.W[l].rows, net.W[l].cols);
    am.emplace_back(1, net.b[l].cols);
    av.emplace_back(1, net.b[l].cols);
  }
  long at = 0;
  Rng shuffle_rng(cfg.seed, kStreamShuffle);

  std::vector<int> idx(ntrain);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> val_idx(nval);
  std::iota(val_idx.begin(), val_idx.end(), ntrain);
  const Mat val_x = gather_rows_p(X, val_idx, 0, nval);
  std::vector<int> val_y(nval);
  for (int i = 0; i < nval; ++i) val_y[i] = y_valid_select[ntrain + i];

  RefFitResult res;
  RefCache cache;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double lr_e = cfg.lr;
    for (int d : cfg.lr_drops)
      if (epoch >= d) lr_e *= cfg.lr_factor;
    shuffle_rng.shuffle(idx);

    double loss_sum = 0.0;
    int correct = 0;
    for (int b0 = 0; b0 < ntrain; b0 += cfg.batch_size) {
      const int bs = std::min(cfg.batch_size, ntrain - b0);
      const Mat bx = gather_rows_p(X, idx, b0, bs);
      std::vector<int> by(bs);
      for (int i = 0; i < bs; ++i) by[i] = y[idx[b0 + i]];
      ref_forward(spec, net, bx, by, cache);
      if (!std::isfinite(cache.loss))
        throw TrainError("ref_fit: non-finite loss, aborting");
      loss_sum += cache.loss * bs;
      const auto pred = predict_rows(cache.q);
      for (int i = 0; i < bs; ++i) correct += pred[i] == by[i] ? 1 : 0;
      grads.zero();
      ref_backward(net, by, cache, grads);

      at += 1;
      const double bc1 = 1.0 - std::pow(cfg.beta1, (double)at);
      const double bc2 = 1.0 - std::pow(cfg.beta2, (double)at);
      int ti = 0;
      for (int l = 0; l < (int)net.W.size(); ++l) {
        auto upd = [&](Mat& p, const Mat& gm) {
          Mat& m = am[ti];
          Mat& v = av[ti];
          for (size_t t = 0; t < p.size(); ++t) {
            const double gv = gm.a[t];
            m.a[t] = cfg.beta1 * m.a[t] + (1.0 - cfg.beta1) * gv;
            v.a[t] = cfg.beta2 * v.a[t] + (1.0 - cfg.beta2) * (gv * gv);
            const double mhat = m.a[t] / bc1;
            const double vhat = v.a[t] / bc2;
            p.a[t] -= lr_e * mhat / (std::sqrt(vhat) + cfg.adam_eps);
          }
          ++ti;
        };
        upd(net.W[l], grads.gW[l]);
        upd(net.b[l], grads.gb[l]);
      }
    }

    ref_forward(spec, net, val_x, val_y, cache);
    const auto vpred = predict_rows(cache.q);
    int vcorrect = 0;
    for (int i = 0; i < nval; ++i) vcorrect += vpred[i] == val_y[i] ? 1 : 0;

    HistoryRow row;
    row.epoch = epoch;
    row.train_loss = loss_sum / ntrain;
    row.train_acc = (double)correct / ntrain;
    row.valid_loss = cache.loss;
    row.valid_acc = (double)vcorrect / nval;
    res.history.push_back(row);

    if (row.valid_acc > res.best_valid_acc ||
        (row.valid_acc == res.best_valid_acc &&
         row.valid_loss < res.best_valid_loss)) {
      res.best_valid_acc = row.valid_acc;
      res.best_valid_loss = row.valid_loss;
      res.best_epoch = epoch;
      res.best = net;
    }
  }
  return res;
}

Mat ref_predict(const ModelSpec& spec, const RefMlp& net, const Mat& X) {
  RefCache c;
  ref_forward(spec, net, X, {}, c);
  return c.q;
}

}  // namespace creinn
