#pragma once
#include <vector>

#include "train.h"

namespace creinn {

// Standard point-valued MLP (Glorot init, ReLU hidden layers, softmax head,
// Adam) used to check that the interval network with all radii at zero and
// radius updates disabled trains identically, bit for bit.
//
// "Identically" requires identical arithmetic order, so this implementation
// deliberately arranges its float operations the way the interval code
// evaluates them at zero width:
//   - the softmax denominator is written own + (sum - own), which equals the
//     plain sum in exact arithmetic;
//   - the backward pass carries the two adjoint streams the interval code has
//     for interval endpoints, merging them into weight gradients at the same
//     point the interval code merges endpoint gradients into centers.
// In exact arithmetic everything here reduces to the textbook MLP.
struct RefMlp {
  std::vector<Mat> W, b;
};

// Same draw stream as init_params: consumes (and discards) the radius draws
// so the center values come out identical.
RefMlp ref_init(const ModelSpec& spec, uint64_t seed);

struct RefFitResult {
  RefMlp best;
  std::vector<HistoryRow> history;
  int best_epoch = -1;
  double best_valid_acc = -1.0;
  double best_valid_loss = 0.0;
};

// Mirrors fit() exactly (same split, same shuffle stream, same batch walk,
// same selection rule). The ModelSpec must have no IBN layers.
RefFitResult ref_fit(const ModelSpec& spec, const TrainConfig& cfg,
                     const Mat& X, const std::vector<int>& y,
                     const std::vector<int>& y_valid_select);

// Point forward pass to the class distribution, one row per sample.
Mat ref_predict(const ModelSpec& spec, const RefMlp& net, const Mat& X);

}  // namespace creinn
