#pragma once
#include <stdexcept>
#include <vector>

#include "model.h"

namespace creinn {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double lr = 1e-3;
  double lr_factor = 0.1;          // applied at each epoch in lr_drops
  std::vector<int> lr_drops;
  double beta1 = 0.9, beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 1;
  bool freeze_radii = false;       // force all radii to 0 and keep them there
};

struct HistoryRow {
  int epoch;
  double train_loss, train_acc, valid_loss, valid_acc;
};

struct FitResult {
  Params best;                     // snapshot (incl. running stats) of the best epoch
  std::vector<HistoryRow> history;
  int best_epoch = -1;
  double best_valid_acc = -1.0;
  double best_valid_loss = 0.0;
};

struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adam moments for every parameter tensor, in one fixed order:
// per linear layer Wc, Wr, bc, br; then per IBN layer gamma_c, beta_c,
// gamma_r, beta_r.
struct AdamState {
  std::vector<Mat> m, v;
  long t = 0;
};
void adam_init(const Params& p, AdamState& s);

// One Adam update with bias correction, then radius projection max(r, 0).
// With freeze_radii the radius tensors are skipped entirely.
void optimizer_step(Params& p, const Grads& g, AdamState& s,
                    const TrainConfig& cfg, double lr);

// Mean cross-entropy in bits of the summary distribution at the labels.
inline double cross_entropy_loss(const Mat& q, const std::vector<int>& y) {
  return ce_fwd(q, y);
}

// Trains on the first 5/6 of the rows, validates on the rest (the caller
// hands over an already shuffled dataset). `y` supplies the training targets;
// `y_valid_select` the labels used for validation scoring and best-epoch
// selection (pass `y` again unless selection should use different labels).
// Keeps the parameters of the epoch with the highest validation accuracy,
// breaking ties by lower validation loss, earlier epoch. Throws TrainError on
// a non-finite loss.
FitResult fit(const ModelSpec& spec, const TrainConfig& cfg, const IvMat& X,
              const std::vector<int>& y,
              const std::vector<int>& y_valid_select);

// Fraction of weight-radius entries that are strictly positive.
double positive_radius_fraction(const Params& p);

// argmax with ties to the lowest index, applied per row.
std::vector<int> predict_rows(const Mat& q);

}  // namespace creinn
