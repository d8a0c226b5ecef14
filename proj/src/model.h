#pragma once
#include <cstdint>
#include <vector>

#include "kernels.h"

namespace creinn {

// PRNG stream ids (folded into the seed, see rng.h). One fixed assignment for
// the whole project so runs are reproducible from a single seed.
inline constexpr uint64_t kStreamInit = 1;
inline constexpr uint64_t kStreamShuffle = 2;
inline constexpr uint64_t kStreamData = 3;
inline constexpr uint64_t kStreamNoise = 4;

struct ModelSpec {
  int input_dim = 2;
  std::vector<int> hidden;
  int classes = 2;
  std::vector<uint8_t> ibn;  // one flag per hidden layer
  double ibn_eps = 1e-5;
  double ibn_momentum = 0.99;
  // Initial values for the IBN affine transforms. The radius pair shapes how
  // much interval width survives normalization, which different tasks need
  // tuned differently, so it is part of the architecture description.
  double gamma_c0 = 1.0, beta_c0 = 0.0;
  double gamma_r0 = 1.0, beta_r0 = 0.0;

  int n_linear() const { return (int)hidden.size() + 1; }
  int n_ibn() const;
  // [input_dim, hidden..., classes]
  std::vector<int> layer_sizes() const;
  bool valid(std::string* err = nullptr) const;
};

struct Params {
  std::vector<LinearParams> lin;
  std::vector<IbnParams> ibn;
};

struct Grads {
  std::vector<LinearGrads> lin;
  std::vector<IbnGrads> ibn;
  void init(const Params& p);
  void zero();
};

// Glorot-uniform centers, |Glorot draw| radii, zero biases. One draw order,
// fixed forever: per layer all center weights row-major, then all radius
// weights row-major.
Params init_params(const ModelSpec& spec, uint64_t seed);

// Everything one forward pass produces, kept for the backward sweep.
struct Cache {
  IvMat x;
  std::vector<int> y;
  bool train_mode = true;
  std::vector<Mat> Wlo, Whi, blo, bhi;  // derived endpoints per linear layer
  std::vector<IvMat> lin_out;
  std::vector<IbnCache> ibn_cache;      // parallel to flagged layers
  std::vector<IvMat> ibn_out;           // parallel to hidden layers (unused slot if no ibn)
  std::vector<IvMat> act_out;           // post-relu, per hidden layer
  SoftmaxCache sm;
  IvMat q_iv;                           // {ql, qh} as an interval matrix
  IvMat reach_out;
  bool reach_shortcut = false;
  InterCache inter;
  double loss = 0.0;
  bool has_loss = false;
};

// Runs the interval network on a batch. If `y` is non-empty, continues through
// simplex tightening, the single-distribution summary and mean cross-entropy,
// filling cache.loss. Inputs must be non-negative (the model keeps all linear
// inputs in [0, inf) by construction, so the fast affine kernel applies).
void model_forward(const ModelSpec& spec, Params& p, const IvMat& x,
                   const std::vector<int>& y, bool train_mode,
                   bool update_running, Cache& c);

// Reverse sweep for a cache produced with a non-empty `y`; accumulates into
// `g` (call g.zero() first for plain gradients).
void model_backward(const ModelSpec& spec, const Params& p, Cache& c, Grads& g);

// Eval-mode probability intervals for a batch.
void model_predict(const ModelSpec& spec, Params& p, const IvMat& x,
                   Mat& ql, Mat& qh);

}  // namespace creinn
