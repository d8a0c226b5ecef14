#include "creinn.h"

#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "checkpoint.h"
#include "config.h"
#include "runner.h"
#include "train.h"

struct creinn_config {
  creinn::RunConfig cfg;
};

struct creinn_model {
  creinn::Checkpoint ck;
};

namespace {

thread_local std::string g_last_error;

template <class F>
int wrap(F&& body) {
  try {
    body();
    return CREINN_OK;
  } catch (const creinn::ConfigError& e) {
    g_last_error = e.what();
    return CREINN_ERR_CONFIG;
  } catch (const creinn::CheckpointError& e) {
    g_last_error = e.what();
    return CREINN_ERR_CONFIG;
  } catch (const creinn::DataError& e) {
    g_last_error = e.what();
    return CREINN_ERR_CONFIG;
  } catch (const creinn::TrainError& e) {
    g_last_error = e.what();
    return CREINN_ERR_NUMERIC;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return CREINN_ERR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CREINN_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CREINN_ERR_INTERNAL;
  }
}

int arg_error(const char* msg) {
  g_last_error = msg;
  return CREINN_ERR_CONFIG;
}

creinn::IvMat to_ivmat(const double* lo, const double* hi, int n, int d) {
  creinn::IvMat x(n, d);
  for (size_t i = 0; i < (size_t)n * d; ++i) {
    x.lo.a[i] = lo[i];
    x.hi.a[i] = hi[i];
  }
  return x;
}

}  // namespace

extern "C" {

const char* creinn_version(void) { return "1.0.0"; }

const char* creinn_last_error(void) { return g_last_error.c_str(); }

int creinn_config_parse(const char* text, int has_seed_override, uint64_t seed,
                        creinn_config** out) {
  if (!text || !out) return arg_error("null argument");
  *out = nullptr;
  return wrap([&] {
    auto* h = new creinn_config;
    try {
      h->cfg = creinn::parse_config_text(text,
                                         has_seed_override ? &seed : nullptr);
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

int creinn_config_load(const char* path, int has_seed_override, uint64_t seed,
                       creinn_config** out) {
  if (!path || !out) return arg_error("null argument");
  *out = nullptr;
  return wrap([&] {
    auto* h = new creinn_config;
    try {
      h->cfg = creinn::parse_config_file(path,
                                         has_seed_override ? &seed : nullptr);
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

void creinn_config_free(creinn_config* cfg) { delete cfg; }

int creinn_model_load(const char* path, creinn_model** out) {
  if (!path || !out) return arg_error("null argument");
  *out = nullptr;
  return wrap([&] {
    auto* h = new creinn_model;
    try {
      h->ck = creinn::load_checkpoint(path);
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

void creinn_model_free(creinn_model* m) { delete m; }

int creinn_model_input_dim(const creinn_model* m, int* out) {
  if (!m || !out) return arg_error("null argument");
  *out = m->ck.spec.input_dim;
  return CREINN_OK;
}

int creinn_model_classes(const creinn_model* m, int* out) {
  if (!m || !out) return arg_error("null argument");
  *out = m->ck.spec.classes;
  return CREINN_OK;
}

static int check_batch(const creinn_model* m, const double* x_lo,
                       const double* x_hi, int n, int d) {
  if (!m || !x_lo || !x_hi) return arg_error("null argument");
  if (n < 1) return arg_error("need at least one row");
  if (d != m->ck.spec.input_dim)
    return arg_error("feature count does not match the model input dim");
  return CREINN_OK;
}

int creinn_model_predict_box(creinn_model* m, const double* x_lo,
                             const double* x_hi, int n, int d, double* q_lo,
                             double* q_hi) {
  if (int rc = check_batch(m, x_lo, x_hi, n, d)) return rc;
  if (!q_lo || !q_hi) return arg_error("null argument");
  return wrap([&] {
    const creinn::IvMat x = to_ivmat(x_lo, x_hi, n, d);
    const auto pred = creinn::predict_batch(m->ck.spec, m->ck.params, x);
    const int C = m->ck.spec.classes;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < C; ++k) {
        q_lo[(size_t)i * C + k] = pred[i].reach.lo[k];
        q_hi[(size_t)i * C + k] = pred[i].reach.hi[k];
      }
  });
}

int creinn_model_uncertainty(creinn_model* m, const double* x_lo,
                             const double* x_hi, int n, int d, double* au,
                             double* eu, double* tu, int* pred_out) {
  if (int rc = check_batch(m, x_lo, x_hi, n, d)) return rc;
  return wrap([&] {
    const creinn::IvMat x = to_ivmat(x_lo, x_hi, n, d);
    const auto pred = creinn::predict_batch(m->ck.spec, m->ck.params, x);
    for (int i = 0; i < n; ++i) {
      if (au) au[i] = pred[i].unc.au;
      if (eu) eu[i] = pred[i].unc.eu;
      if (tu) tu[i] = pred[i].unc.tu;
      if (pred_out) pred_out[i] = pred[i].pred;
    }
  });
}

int creinn_train(const creinn_config* cfg, const char* out_dir,
                 creinn_train_summary* out) {
  if (!cfg || !out_dir) return arg_error("null argument");
  return wrap([&] {
    const creinn::TrainOutcome r = creinn::cmd_train(cfg->cfg, out_dir);
    if (out) {
      out->best_epoch = r.best_epoch;
      out->best_valid_acc = r.best_valid_acc;
      out->best_valid_loss = r.best_valid_loss;
      out->positive_radius_fraction = r.positive_radius_fraction;
    }
  });
}

int creinn_eval(const creinn_config* cfg, const char* checkpoint,
                const char* out_dir, const char* measure,
                creinn_eval_summary* out) {
  if (!cfg || !checkpoint || !out_dir) return arg_error("null argument");
  return wrap([&] {
    const creinn::EvalOutcome r =
        creinn::cmd_eval(cfg->cfg, checkpoint, out_dir,
                         measure ? measure : "");
    if (out) {
      out->accuracy = r.accuracy;
      out->auarc_au = r.auarc_au;
      out->auarc_eu = r.auarc_eu;
      out->auarc_tu = r.auarc_tu;
    }
  });
}

int creinn_ensemble(const creinn_config* cfg, const char* const* checkpoints,
                    int n_checkpoints, const char* out_dir,
                    creinn_ensemble_summary* out) {
  if (!cfg || !checkpoints || !out_dir) return arg_error("null argument");
  if (n_checkpoints < 1) return arg_error("ensemble needs >= 1 checkpoint");
  return wrap([&] {
    std::vector<std::string> paths;
    paths.reserve(n_checkpoints);
    for (int i = 0; i < n_checkpoints; ++i) {
      if (!checkpoints[i]) throw creinn::ConfigError("null checkpoint path");
      paths.emplace_back(checkpoints[i]);
    }
    const creinn::EnsembleOutcome r =
        creinn::cmd_ensemble(cfg->cfg, paths, out_dir);
    if (out) {
      out->members = r.members;
      out->accuracy = r.accuracy;
      out->ensemble_auroc_eu = r.ensemble_auroc_eu;
      out->mean_single_auroc_eu = r.mean_single_auroc_eu;
      out->averaged_proper = r.averaged_proper ? 1 : 0;
    }
  });
}

int creinn_ood(const creinn_config* cfg, const char* checkpoint,
               const char* out_dir, const char* measure,
               creinn_ood_summary* out) {
  if (!cfg || !checkpoint || !out_dir) return arg_error("null argument");
  return wrap([&] {
    const creinn::OodOutcome r =
        creinn::cmd_ood(cfg->cfg, checkpoint, out_dir, measure ? measure : "");
    if (out) {
      out->auroc_eu = r.auroc_eu;
      out->auprc_eu = r.auprc_eu;
      out->auroc_tu = r.auroc_tu;
      out->auprc_tu = r.auprc_tu;
    }
  });
}

int creinn_interval_eval(const creinn_config* cfg, const char* checkpoint,
                         const char* out_dir, const char* kind,
                         const double* level_pairs, int n_levels,
                         creinn_interval_summary* out) {
  if (!cfg || !checkpoint || !out_dir) return arg_error("null argument");
  if (n_levels < 0 || (n_levels > 0 && !level_pairs))
    return arg_error("bad level list");
  return wrap([&] {
    std::vector<std::pair<double, double>> levels;
    if (n_levels == 0) {
      levels.assign(creinn::kNoiseLevelPairs.begin(),
                    creinn::kNoiseLevelPairs.end());
    } else {
      for (int i = 0; i < n_levels; ++i)
        levels.emplace_back(level_pairs[2 * i], level_pairs[2 * i + 1]);
    }
    const creinn::IntervalEvalOutcome r = creinn::cmd_interval_eval(
        cfg->cfg, checkpoint, out_dir, kind && *kind ? kind : "noise", levels);
    if (out) out->levels = (int)r.rows.size();
  });
}

}  // extern "C"
