#include "model.h"

#include <cassert>
#include <cmath>
#include <string>

#include "rng.h"

namespace creinn {

int ModelSpec::n_ibn() const {
  int n = 0;
  for (auto f : ibn) n += f ? 1 : 0;
  return n;
}

std::vector<int> ModelSpec::layer_sizes() const {
  std::vector<int> s;
  s.push_back(input_dim);
  for (int h : hidden) s.push_back(h);
  s.push_back(classes);
  return s;
}

bool ModelSpec::valid(std::string* err) const {
  auto fail = [&](const char* m) {
    if (err) *err = m;
    return false;
  };
  if (input_dim < 1) return fail("input_dim must be >= 1");
  if (classes < 2) return fail("classes must be >= 2");
  for (int h : hidden)
    if (h < 1) return fail("hidden sizes must be >= 1");
  if (ibn.size() != hidden.size())
    return fail("ibn flags must match the number of hidden layers");
  if (!(ibn_eps > 0.0)) return fail("ibn_eps must be > 0");
  if (!(ibn_momentum >= 0.0 && ibn_momentum < 1.0))
    return fail("ibn_momentum must be in [0, 1)");
  return true;
}

void Grads::init(const Params& p) {
  lin.resize(p.lin.size());
  for (size_t l = 0; l < p.lin.size(); ++l) lin[l].init(p.lin[l]);
  ibn.resize(p.ibn.size());
  for (size_t l = 0; l < p.ibn.size(); ++l) ibn[l].init(p.ibn[l]);
}

void Grads::zero() {
  for (auto& g : lin) g.zero();
  for (auto& g : ibn) g.zero();
}

Params init_params(const ModelSpec& spec, uint64_t seed) {
  Rng rng(seed, kStreamInit);
  Params p;
  const auto sizes = spec.layer_sizes();
  for (int l = 0; l + 1 < (int)sizes.size(); ++l) {
    const int n_in = sizes[l], n_out = sizes[l + 1];
    const double limit = std::sqrt(6.0 / (double)(n_in + n_out));
    LinearParams lp;
    lp.Wc = Mat(n_out, n_in);
    lp.Wr = Mat(n_out, n_in);
    lp.bc = Mat(1, n_out);
    lp.br = Mat(1, n_out);
    for (auto& w : lp.Wc.a) w = rng.uniform(-limit, limit);
    for (auto& w : lp.Wr.a) w = std::fabs(rng.uniform(-limit, limit));
    p.lin.push_back(std::move(lp));
  }
  for (size_t h = 0; h < spec.hidden.size(); ++h) {
    if (!spec.ibn[h]) continue;
    const int F = spec.hidden[h];
    IbnParams bp;
    bp.gamma_c = Mat(1, F, spec.gamma_c0);
    bp.beta_c = Mat(1, F, spec.beta_c0);
    bp.gamma_r = Mat(1, F, spec.gamma_r0);
    bp.beta_r = Mat(1, F, spec.beta_r0);
    bp.run_mc = Mat(1, F, 0.0);
    bp.run_vc = Mat(1, F, 1.0);
    bp.run_mr = Mat(1, F, 0.0);
    bp.run_vr = Mat(1, F, 1.0);
    p.ibn.push_back(std::move(bp));
  }
  return p;
}

void model_forward(const ModelSpec& spec, Params& p, const IvMat& x,
                   const std::vector<int>& y, bool train_mode,
                   bool update_running, Cache& c) {
  const int L = spec.n_linear();
  const int H = (int)spec.hidden.size();
  c.x = x;
  c.y = y;
  c.train_mode = train_mode;
  c.Wlo.assign(L, Mat());
  c.Whi.assign(L, Mat());
  c.blo.assign(L, Mat());
  c.bhi.assign(L, Mat());
  c.lin_out.assign(L, IvMat());
  c.ibn_cache.assign(spec.n_ibn(), IbnCache());
  c.ibn_out.assign(H, IvMat());
  c.act_out.assign(H, IvMat());
  c.has_loss = false;

  const IvMat* cur = &c.x;
  int ibn_idx = 0;
  for (int l = 0; l < L; ++l) {
    const LinearParams& lp = p.lin[l];
    c.Wlo[l] = Mat(lp.Wc.rows, lp.Wc.cols);
    c.Whi[l] = Mat(lp.Wc.rows, lp.Wc.cols);
    for (size_t t = 0; t < lp.Wc.size(); ++t) {
      c.Wlo[l].a[t] = lp.Wc.a[t] - lp.Wr.a[t];
      c.Whi[l].a[t] = lp.Wc.a[t] + lp.Wr.a[t];
    }
    c.blo[l] = Mat(1, lp.bc.cols);
    c.bhi[l] = Mat(1, lp.bc.cols);
    for (size_t t = 0; t < lp.bc.size(); ++t) {
      c.blo[l].a[t] = lp.bc.a[t] - lp.br.a[t];
      c.bhi[l].a[t] = lp.bc.a[t] + lp.br.a[t];
    }
    linear_nonneg_fwd(*cur, c.Wlo[l], c.Whi[l], c.blo[l], c.bhi[l], c.lin_out[l]);
    cur = &c.lin_out[l];
    if (l < L - 1) {
      if (spec.ibn[l]) {
        ibn_fwd(*cur, p.ibn[ibn_idx], spec.ibn_eps, spec.ibn_momentum,
                train_mode, update_running, c.ibn_cache[ibn_idx], c.ibn_out[l]);
        cur = &c.ibn_out[l];
        ++ibn_idx;
      }
      relu_fwd(*cur, c.act_out[l]);
      cur = &c.act_out[l];
    }
  }
  isoftmax_fwd(*cur, c.sm);
  c.q_iv.lo = c.sm.ql;
  c.q_iv.hi = c.sm.qh;

  if (!y.empty()) {
    assert((int)y.size() == x.rows());
    reach_fwd(c.q_iv, c.reach_out, c.reach_shortcut);
    intersect_fwd(c.reach_out, c.inter);
    c.loss = ce_fwd(c.inter.q, y);
    c.has_loss = true;
  }
}

void model_backward(const ModelSpec& spec, const Params& p, Cache& c, Grads& g) {
  assert(c.has_loss);
  const int L = spec.n_linear();
  const int B = c.x.rows();
  const int C = spec.classes;

  Mat gq(B, C);
  ce_bwd(c.inter.q, c.y, gq);
  IvMat g_reach(B, C);
  intersect_bwd(c.reach_out, c.inter, gq, g_reach);
  IvMat g_q_iv(B, C);
  reach_bwd(c.q_iv, g_reach, g_q_iv, c.reach_shortcut);
  IvMat g_cur(B, C);
  isoftmax_bwd(c.sm, g_q_iv, g_cur);

  int ibn_idx = spec.n_ibn();
  for (int l = L - 1; l >= 0; --l) {
    if (l < L - 1) {
      // g_cur holds the gradient at the relu output of hidden layer l.
      const IvMat& relu_in = spec.ibn[l] ? c.ibn_out[l] : c.lin_out[l];
      IvMat g_relu_in(relu_in.rows(), relu_in.cols());
      relu_bwd(relu_in, g_cur, g_relu_in);
      if (spec.ibn[l]) {
        --ibn_idx;
        IvMat g_lin_out(c.lin_out[l].rows(), c.lin_out[l].cols());
        ibn_bwd(c.lin_out[l], p.ibn[ibn_idx], c.ibn_cache[ibn_idx], g_relu_in,
                g_lin_out, g.ibn[ibn_idx]);
        g_cur = std::move(g_lin_out);
      } else {
        g_cur = std::move(g_relu_in);
      }
    }
    const IvMat& lin_in = (l == 0) ? c.x : c.act_out[l - 1];
    IvMat g_prev(lin_in.rows(), lin_in.cols());
    linear_nonneg_bwd(lin_in, c.Wlo[l], c.Whi[l], g_cur, g_prev, g.lin[l]);
    g_cur = std::move(g_prev);
  }
  for (auto& lg : g.lin) lg.merge();
}

void model_predict(const ModelSpec& spec, Params& p, const IvMat& x,
                   Mat& ql, Mat& qh) {
  Cache c;
  model_forward(spec, p, x, {}, /*train=*/false, /*update_running=*/false, c);
  ql = std::move(c.sm.ql);
  qh = std::move(c.sm.qh);
}

}  // namespace creinn
