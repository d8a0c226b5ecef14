#pragma once
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "checkpoint.h"
#include "config.h"
#include "credal.h"
#include "data.h"
#include "metrics.h"

namespace creinn {

// High-level operations behind the command-line subcommands. Each writes its
// artifacts under out_dir (created if missing) plus a resolved copy of the
// configuration, and returns a small summary. Errors surface as the
// exceptions of the underlying modules.

struct TrainOutcome {
  int best_epoch = -1;
  double best_valid_acc = 0.0;
  double best_valid_loss = 0.0;
  double positive_radius_fraction = 0.0;
  std::string checkpoint_path;
};
// Generates the training data, fits the model, writes model.ckpt and
// history.csv (epoch,train_loss,train_acc,valid_loss,valid_acc).
TrainOutcome cmd_train(const RunConfig& cfg, const std::string& out_dir);

struct EvalOutcome {
  double accuracy = 0.0;
  // AUARC per measure; NaN for measures not selected.
  double auarc_au = 0.0, auarc_eu = 0.0, auarc_tu = 0.0;
};
// Evaluates a checkpoint on a fresh draw (eval_seed). Writes predictions.csv
// and, per selected measure, ar_curve_<m>.csv plus eval_metrics.csv.
// `measure` is "au", "eu", "tu" or "" for all three.
EvalOutcome cmd_eval(const RunConfig& cfg, const std::string& checkpoint,
                     const std::string& out_dir, const std::string& measure);

struct EnsembleOutcome {
  int members = 0;
  double accuracy = 0.0;  // of the averaged predictor on the eval draw
  double ensemble_auroc_eu = 0.0;
  double mean_single_auroc_eu = 0.0;
  bool averaged_proper = false;
};
// Evaluates a set of separately trained checkpoints as one credal predictor:
// per sample the members' probability intervals are averaged elementwise,
// re-tightened and scored like a single model (id accuracy, id-vs-ood
// separation by epistemic uncertainty). Writes ensemble.csv with one row per
// member plus the ensemble row.
EnsembleOutcome cmd_ensemble(const RunConfig& cfg,
                             const std::vector<std::string>& checkpoints,
                             const std::string& out_dir);

struct OodOutcome {
  // NaN for measures not selected.
  double auroc_eu = 0.0, auprc_eu = 0.0;
  double auroc_tu = 0.0, auprc_tu = 0.0;
};
// Scores in-distribution vs out-of-distribution uncertainty separation for a
// checkpoint. Writes ood.csv (auroc,auprc,measure). `measure` is "eu", "tu"
// or "" for both.
OodOutcome cmd_ood(const RunConfig& cfg, const std::string& checkpoint,
                   const std::string& out_dir, const std::string& measure);

struct IntervalEvalOutcome {
  // One row per level pair, the first (baseline) pair with ratios 1.
  std::vector<std::array<double, 5>> rows;  // mu1, mu2, r_au, r_eu, r_tu
};
// Sweeps input-interval levels on a clean eval draw and reports the mean
// per-sample uncertainty of each level relative to the first. `kind` selects
// the interval construction ("noise" shifts values, "brightness" shifts the
// hsv value channel and needs rgb rows); `levels` defaults to
// kNoiseLevelPairs. Writes relative_increase.csv (level,mu1,mu2,r_au,r_eu,
// r_tu) and ar_curve_<m>_level<k>.csv per measure and level.
IntervalEvalOutcome cmd_interval_eval(
    const RunConfig& cfg, const std::string& checkpoint,
    const std::string& out_dir, const std::string& kind = "noise",
    const std::vector<std::pair<double, double>>& levels = {
        kNoiseLevelPairs.begin(), kNoiseLevelPairs.end()});

// Shared helper: per-sample credal outputs of a checkpointed model on an
// interval batch.
struct PredictedSample {
  ProbBox reach;
  Uncertainty unc;
  std::vector<double> q;
  int pred = -1;
};
std::vector<PredictedSample> predict_batch(const ModelSpec& spec, Params& p,
                                           const IvMat& x);

}  // namespace creinn
