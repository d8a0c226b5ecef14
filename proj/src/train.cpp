#include "train.h"

#include <cmath>
#include <numeric>

#include "rng.h"

namespace creinn {

void adam_init(const Params& p, AdamState& s) {
  s.m.clear();
  s.v.clear();
  s.t = 0;
  auto push = [&](const Mat& like) {
    s.m.emplace_back(like.rows, like.cols);
    s.v.emplace_back(like.rows, like.cols);
  };
  for (const auto& lp : p.lin) {
    push(lp.Wc); push(lp.Wr); push(lp.bc); push(lp.br);
  }
  for (const auto& bp : p.ibn) {
    push(bp.gamma_c); push(bp.beta_c); push(bp.gamma_r); push(bp.beta_r);
  }
}

static void adam_tensor(Mat& p, const Mat& g, Mat& m, Mat& v, double lr,
                        double beta1, double beta2, double eps, double bc1,
                        double bc2) {
  for (size_t t = 0; t < p.size(); ++t) {
    const double gv = g.a[t];
    m.a[t] = beta1 * m.a[t] + (1.0 - beta1) * gv;
    v.a[t] = beta2 * v.a[t] + (1.0 - beta2) * (gv * gv);
    const double mhat = m.a[t] / bc1;
    const double vhat = v.a[t] / bc2;
    p.a[t] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

void optimizer_step(Params& p, const Grads& g, AdamState& s,
                    const TrainConfig& cfg, double lr) {
  s.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, (double)s.t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, (double)s.t);
  int ti = 0;
  for (size_t l = 0; l < p.lin.size(); ++l) {
    adam_tensor(p.lin[l].Wc, g.lin[l].gWc, s.m[ti], s.v[ti], lr, cfg.beta1,
                cfg.beta2, cfg.adam_eps, bc1, bc2);
    ++ti;
    if (!cfg.freeze_radii)
      adam_tensor(p.lin[l].Wr, g.lin[l].gWr, s.m[ti], s.v[ti], lr, cfg.beta1,
                  cfg.beta2, cfg.adam_eps, bc1, bc2);
    ++ti;
    adam_tensor(p.lin[l].bc, g.lin[l].gbc, s.m[ti], s.v[ti], lr, cfg.beta1,
                cfg.beta2, cfg.adam_eps, bc1, bc2);
    ++ti;
    if (!cfg.freeze_radii)
      adam_tensor(p.lin[l].br, g.lin[l].gbr, s.m[ti], s.v[ti], lr, cfg.beta1,
                  cfg.beta2, cfg.adam_eps, bc1, bc2);
    ++ti;
  }
  for (size_t l = 0; l < p.ibn.size(); ++l) {
    adam_tensor(p.ibn[l].gamma_c, g.ibn[l].ggamma_c, s.m[ti], s.v[ti], lr,
                cfg.beta1, cfg.beta2, cfg.adam_eps, bc1, bc2);
    ++ti;
    adam_tensor(p.ibn[l].beta_c, g.ibn[l].gbeta_c, s.m[ti], s.v[ti], lr,
                cfg.beta1, cfg.beta2, cfg.adam_eps, bc1, bc2);
    ++ti;
    adam_tensor(p.ibn[l].gamma_r, g.ibn[l].ggamma_r, s.m[ti], s.v[ti], lr,
                cfg.beta1, cfg.beta2, cfg.adam_eps, bc1, bc2);
    ++ti;
    adam_tensor(p.ibn[l].beta_r, g.ibn[l].gbeta_r, s.m[ti], s.v[ti], lr,
                cfg.beta1, cfg.beta2, cfg.adam_eps, bc1, bc2);
    ++ti;
  }
  for (auto& lp : p.lin) {
    for (auto& r : lp.Wr.a) r = std::max(r, 0.0);
    for (auto& r : lp.br.a) r = std::max(r, 0.0);
  }
}

std::vector<int> predict_rows(const Mat& q) {
  std::vector<int> out(q.rows);
  for (int i = 0; i < q.rows; ++i) {
    int best = 0;
    for (int k = 1; k < q.cols; ++k)
      if (q.at(i, k) > q.at(i, best)) best = k;
    out[i] = best;
  }
  return out;
}

static IvMat gather_rows(const IvMat& X, const std::vector<int>& idx, int from,
                         int count) {
  IvMat out(count, X.cols());
  for (int i = 0; i < count; ++i) {
    const int r = idx[from + i];
    for (int j = 0; j < X.cols(); ++j) {
      out.lo.at(i, j) = X.lo.at(r, j);
      out.hi.at(i, j) = X.hi.at(r, j);
    }
  }
  return out;
}

FitResult fit(const ModelSpec& spec, const TrainConfig& cfg, const IvMat& X,
              const std::vector<int>& y,
              const std::vector<int>& y_valid_select) {
  const int N = X.rows();
  if ((int)y.size() != N || (int)y_valid_select.size() != N)
    throw TrainError("fit: label count does not match rows");
  if (N < 6) throw TrainError("fit: need at least 6 samples for the 5:1 split");
  const int ntrain = (5 * N) / 6;
  const int nval = N - ntrain;

  Params params = init_params(spec, cfg.seed);
  if (cfg.freeze_radii)
    for (auto& l : params.lin) {
      l.Wr.zero();
      l.br.zero();
    }
  Grads grads;
  grads.init(params);
  AdamState adam;
  adam_init(params, adam);
  Rng shuffle_rng(cfg.seed, kStreamShuffle);

  std::vector<int> idx(ntrain);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> val_idx(nval);
  std::iota(val_idx.begin(), val_idx.end(), ntrain);
  const IvMat val_x = gather_rows(X, val_idx, 0, nval);
  std::vector<int> val_y(nval);
  for (int i = 0; i < nval; ++i) val_y[i] = y_valid_select[ntrain + i];

  FitResult res;
  Cache cache;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double lr_e = cfg.lr;
    for (int d : cfg.lr_drops)
      if (epoch >= d) lr_e *= cfg.lr_factor;
    shuffle_rng.shuffle(idx);

    double loss_sum = 0.0;
    int correct = 0;
    for (int b0 = 0; b0 < ntrain; b0 += cfg.batch_size) {
      const int bs = std::min(cfg.batch_size, ntrain - b0);
      const IvMat bx = gather_rows(X, idx, b0, bs);
      std::vector<int> by(bs);
      for (int i = 0; i < bs; ++i) by[i] = y[idx[b0 + i]];
      model_forward(spec, params, bx, by, /*train=*/true,
                    /*update_running=*/true, cache);
      if (!std::isfinite(cache.loss))
        throw TrainError("fit: non-finite loss, aborting");
      loss_sum += cache.loss * bs;
      const auto pred = predict_rows(cache.inter.q);
      for (int i = 0; i < bs; ++i) correct += pred[i] == by[i] ? 1 : 0;
      grads.zero();
      model_backward(spec, params, cache, grads);
      optimizer_step(params, grads, adam, cfg, lr_e);
    }

    model_forward(spec, params, val_x, val_y, /*train=*/false,
                  /*update_running=*/false, cache);
    const auto vpred = predict_rows(cache.inter.q);
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
      res.best = params;
    }
  }
  return res;
}

double positive_radius_fraction(const Params& p) {
  long pos = 0, total = 0;
  for (const auto& lp : p.lin) {
    for (double r : lp.Wr.a) {
      pos += r > 0.0 ? 1 : 0;
      ++total;
    }
  }
  return total > 0 ? (double)pos / total : 0.0;
}

}  // namespace creinn
