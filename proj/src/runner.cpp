#include "runner.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "train.h"

namespace creinn {

namespace fs = std::filesystem;

static std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

static void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir);
}

static void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot create " + path);
  out << text;
  if (!out) throw DataError("write failed for " + path);
}

static void write_resolved_config(const RunConfig& cfg,
                                  const std::string& out_dir) {
  write_text(out_dir + "/config_resolved.txt", config_to_text(cfg));
}

static void check_spec_matches(const Checkpoint& ck, const RunConfig& cfg) {
  if (ck.spec.classes != cfg.model.classes)
    throw ConfigError("checkpoint has " + std::to_string(ck.spec.classes) +
                      " classes but the config asks for " +
                      std::to_string(cfg.model.classes));
  if (ck.spec.input_dim != cfg.model.input_dim)
    throw ConfigError("checkpoint input dim " +
                      std::to_string(ck.spec.input_dim) +
                      " does not match config " +
                      std::to_string(cfg.model.input_dim));
}

std::vector<PredictedSample> predict_batch(const ModelSpec& spec, Params& p,
                                           const IvMat& x) {
  Mat ql, qh;
  model_predict(spec, p, x, ql, qh);
  std::vector<PredictedSample> out(x.rows());
  for (int i = 0; i < x.rows(); ++i) {
    ProbBox box;
    box.lo.assign(ql.row(i), ql.row(i) + ql.cols);
    box.hi.assign(qh.row(i), qh.row(i) + qh.cols);
    out[i].reach = reachable(box);
    out[i].unc = uncertainty_measures(out[i].reach);
    out[i].q = intersection_probability(out[i].reach);
    out[i].pred = predict_class(out[i].q);
  }
  return out;
}

static Dataset make_train_data(const RunConfig& cfg) {
  Dataset d = synth_blobs(cfg.model.classes, cfg.n_per_class, cfg.separation,
                          cfg.margin, cfg.data_seed);
  if (cfg.label_noise > 0.0)
    boundary_noise(d, cfg.separation, cfg.margin, cfg.label_noise,
                   cfg.noise_seed);
  return d;
}

static Dataset make_eval_data(const RunConfig& cfg, bool noisy_labels) {
  Dataset d = synth_blobs(cfg.model.classes, cfg.eval_n_per_class,
                          cfg.separation, cfg.margin, cfg.eval_seed);
  if (noisy_labels && cfg.label_noise > 0.0)
    boundary_noise(d, cfg.separation, cfg.margin, cfg.label_noise,
                   cfg.eval_seed + 1);
  return d;
}

TrainOutcome cmd_train(const RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  write_resolved_config(cfg, out_dir);

  const Dataset d = make_train_data(cfg);
  const IvMat x = make_interval_noise(d.x, cfg.mu1, cfg.mu2);
  const std::vector<int>& val_select =
      cfg.val_labels == "clean" ? d.y_clean : d.y;
  const FitResult fitres = fit(cfg.model, cfg.train, x, d.y, val_select);

  std::string hist = "epoch,train_loss,train_acc,valid_loss,valid_acc\n";
  for (const auto& r : fitres.history) {
    hist += std::to_string(r.epoch) + "," + g17(r.train_loss) + "," +
            g17(r.train_acc) + "," + g17(r.valid_loss) + "," +
            g17(r.valid_acc) + "\n";
  }
  write_text(out_dir + "/history.csv", hist);

  Checkpoint ck;
  ck.spec = cfg.model;
  ck.params = fitres.best;
  ck.seed = cfg.train.seed;
  ck.dataset = cfg.kind;
  ck.trained_epochs = cfg.train.epochs;
  const std::string ck_path = out_dir + "/model.ckpt";
  save_checkpoint(ck_path, ck);

  TrainOutcome out;
  out.best_epoch = fitres.best_epoch;
  out.best_valid_acc = fitres.best_valid_acc;
  out.best_valid_loss = fitres.best_valid_loss;
  out.positive_radius_fraction = positive_radius_fraction(fitres.best);
  out.checkpoint_path = ck_path;
  return out;
}

static void check_measure(const std::string& m,
                          std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (m == a) return;
  throw ConfigError("unknown measure '" + m + "'");
}

static std::string ar_curve_csv(const ArCurve& c) {
  std::string txt = "rejection_rate,accuracy\n";
  for (size_t k = 0; k < c.rejection.size(); ++k)
    txt += g17(c.rejection[k]) + "," + g17(c.accuracy[k]) + "\n";
  return txt;
}

EvalOutcome cmd_eval(const RunConfig& cfg, const std::string& checkpoint,
                     const std::string& out_dir, const std::string& measure) {
  check_measure(measure, {"", "au", "eu", "tu"});
  ensure_dir(out_dir);
  write_resolved_config(cfg, out_dir);
  Checkpoint ck = load_checkpoint(checkpoint);
  check_spec_matches(ck, cfg);

  const Dataset d = make_eval_data(cfg, /*noisy_labels=*/true);
  const IvMat x = make_interval_noise(d.x, cfg.eval_mu1, cfg.eval_mu2);
  const auto pred = predict_batch(ck.spec, ck.params, x);

  const int n = (int)pred.size();
  std::vector<int> correct(n);
  std::vector<double> u_au(n), u_eu(n), u_tu(n);
  int ncorrect = 0;
  std::string rows = "sample,label,pred,correct,au,eu,tu\n";
  for (int i = 0; i < n; ++i) {
    correct[i] = pred[i].pred == d.y[i] ? 1 : 0;
    ncorrect += correct[i];
    u_au[i] = pred[i].unc.au;
    u_eu[i] = pred[i].unc.eu;
    u_tu[i] = pred[i].unc.tu;
    rows += std::to_string(i) + "," + std::to_string(d.y[i]) + "," +
            std::to_string(pred[i].pred) + "," + std::to_string(correct[i]) +
            "," + g17(u_au[i]) + "," + g17(u_eu[i]) + "," + g17(u_tu[i]) + "\n";
  }
  write_text(out_dir + "/predictions.csv", rows);

  EvalOutcome out;
  out.accuracy = (double)ncorrect / n;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.auarc_au = out.auarc_eu = out.auarc_tu = nan;
  std::string metrics = "measure,auarc,accuracy\n";
  auto run_measure = [&](const char* name, const std::vector<double>& u,
                         double& slot) {
    if (!measure.empty() && measure != name) return;
    const ArCurve c = ar_curve(u, correct);
    slot = auarc(c);
    write_text(out_dir + "/ar_curve_" + name + ".csv", ar_curve_csv(c));
    metrics +=
        std::string(name) + "," + g17(slot) + "," + g17(out.accuracy) + "\n";
  };
  run_measure("au", u_au, out.auarc_au);
  run_measure("eu", u_eu, out.auarc_eu);
  run_measure("tu", u_tu, out.auarc_tu);
  write_text(out_dir + "/eval_metrics.csv", metrics);
  return out;
}

OodOutcome cmd_ood(const RunConfig& cfg, const std::string& checkpoint,
                   const std::string& out_dir, const std::string& measure) {
  check_measure(measure, {"", "eu", "tu"});
  ensure_dir(out_dir);
  write_resolved_config(cfg, out_dir);
  Checkpoint ck = load_checkpoint(checkpoint);
  check_spec_matches(ck, cfg);

  const Dataset id_data = make_eval_data(cfg, /*noisy_labels=*/false);
  const Mat ood_x = synth_ood(cfg.ood_n, cfg.model.classes, cfg.separation,
                              cfg.margin, cfg.ood_offset, cfg.ood_seed);
  const IvMat id_iv =
      make_interval_noise(id_data.x, cfg.eval_mu1, cfg.eval_mu2);
  const IvMat ood_iv = make_interval_noise(ood_x, cfg.eval_mu1, cfg.eval_mu2);
  const auto id_pred = predict_batch(ck.spec, ck.params, id_iv);
  const auto ood_pred = predict_batch(ck.spec, ck.params, ood_iv);

  auto gather = [](const std::vector<PredictedSample>& v, bool eu) {
    std::vector<double> u(v.size());
    for (size_t i = 0; i < v.size(); ++i)
      u[i] = eu ? v[i].unc.eu : v[i].unc.tu;
    return u;
  };

  OodOutcome out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.auroc_eu = out.auprc_eu = out.auroc_tu = out.auprc_tu = nan;
  std::string csv = "auroc,auprc,measure\n";
  if (measure.empty() || measure == "eu") {
    const auto a = gather(id_pred, true), b = gather(ood_pred, true);
    out.auroc_eu = auroc(a, b);
    out.auprc_eu = auprc(a, b);
    csv += g17(out.auroc_eu) + "," + g17(out.auprc_eu) + ",eu\n";
  }
  if (measure.empty() || measure == "tu") {
    const auto a = gather(id_pred, false), b = gather(ood_pred, false);
    out.auroc_tu = auroc(a, b);
    out.auprc_tu = auprc(a, b);
    csv += g17(out.auroc_tu) + "," + g17(out.auprc_tu) + ",tu\n";
  }
  write_text(out_dir + "/ood.csv", csv);
  return out;
}

EnsembleOutcome cmd_ensemble(const RunConfig& cfg,
                             const std::vector<std::string>& checkpoints,
                             const std::string& out_dir) {
  if (checkpoints.empty()) throw ConfigError("ensemble needs >= 1 checkpoint");
  ensure_dir(out_dir);
  write_resolved_config(cfg, out_dir);

  std::vector<Checkpoint> members;
  for (const auto& path : checkpoints) {
    members.push_back(load_checkpoint(path));
    check_spec_matches(members.back(), cfg);
  }

  // One shared pair of held-out draws scored by every member.
  const Dataset id_data = make_eval_data(cfg, /*noisy_labels=*/false);
  const Mat ood_x = synth_ood(cfg.ood_n, cfg.model.classes, cfg.separation,
                              cfg.margin, cfg.ood_offset, cfg.ood_seed);
  const IvMat id_iv =
      make_interval_noise(id_data.x, cfg.eval_mu1, cfg.eval_mu2);
  const IvMat ood_iv = make_interval_noise(ood_x, cfg.eval_mu1, cfg.eval_mu2);

  const int E = (int)members.size();
  const int n_id = id_iv.rows(), n_ood = ood_iv.rows();
  std::vector<std::vector<ProbBox>> id_boxes(E), ood_boxes(E);
  std::string csv = "who,auroc_eu,accuracy\n";
  double auroc_sum = 0.0;

  for (int e = 0; e < E; ++e) {
    auto collect = [&](const IvMat& batch, std::vector<ProbBox>& into,
                       const std::vector<int>* labels, double* acc) {
      const auto pred =
          predict_batch(members[e].spec, members[e].params, batch);
      into.resize(pred.size());
      std::vector<double> u(pred.size());
      int ok = 0;
      for (size_t i = 0; i < pred.size(); ++i) {
        into[i] = pred[i].reach;
        u[i] = pred[i].unc.eu;
        if (labels && pred[i].pred == (*labels)[i]) ++ok;
      }
      if (acc) *acc = pred.empty() ? 0.0 : (double)ok / pred.size();
      return u;
    };
    double acc = 0.0;
    const auto id_u = collect(id_iv, id_boxes[e], &id_data.y, &acc);
    const auto ood_u = collect(ood_iv, ood_boxes[e], nullptr, nullptr);
    const double a = auroc(id_u, ood_u);
    auroc_sum += a;
    csv += "member_" + std::to_string(e) + "," + g17(a) + "," + g17(acc) +
           "\n";
  }

  // Average member intervals per sample, re-tighten, score as one model.
  bool proper = true;
  auto ensemble_box = [&](const std::vector<std::vector<ProbBox>>& boxes,
                          int i) {
    std::vector<ProbBox> per_member(E);
    for (int e = 0; e < E; ++e) per_member[e] = boxes[e][i];
    const ProbBox avg = average_intervals(per_member);
    double sl = 0.0, sh = 0.0;
    for (int k = 0; k < avg.classes(); ++k) {
      sl += avg.lo[k];
      sh += avg.hi[k];
    }
    if (!(sl <= 1.0 + 1e-9 && sh >= 1.0 - 1e-9)) proper = false;
    return reachable(avg);
  };

  std::vector<double> ens_id(n_id), ens_ood(n_ood);
  int ok = 0;
  for (int i = 0; i < n_id; ++i) {
    const ProbBox r = ensemble_box(id_boxes, i);
    ens_id[i] = uncertainty_measures(r).eu;
    if (predict_class(intersection_probability(r)) == id_data.y[i]) ++ok;
  }
  for (int i = 0; i < n_ood; ++i)
    ens_ood[i] = uncertainty_measures(ensemble_box(ood_boxes, i)).eu;

  EnsembleOutcome out;
  out.members = E;
  out.accuracy = (double)ok / n_id;
  out.ensemble_auroc_eu = auroc(ens_id, ens_ood);
  out.mean_single_auroc_eu = auroc_sum / E;
  out.averaged_proper = proper;
  csv += "ensemble," + g17(out.ensemble_auroc_eu) + "," + g17(out.accuracy) +
         "\n";
  write_text(out_dir + "/ensemble.csv", csv);
  return out;
}

IntervalEvalOutcome cmd_interval_eval(
    const RunConfig& cfg, const std::string& checkpoint,
    const std::string& out_dir, const std::string& kind,
    const std::vector<std::pair<double, double>>& levels) {
  if (kind != "noise" && kind != "brightness")
    throw ConfigError("interval-eval kind must be noise or brightness");
  if (levels.empty()) throw ConfigError("interval-eval needs >= 1 level pair");
  for (const auto& [m1, m2] : levels)
    if (m1 > m2) throw ConfigError("interval levels need mu1 <= mu2");
  ensure_dir(out_dir);
  write_resolved_config(cfg, out_dir);
  Checkpoint ck = load_checkpoint(checkpoint);
  check_spec_matches(ck, cfg);

  const Dataset d = make_eval_data(cfg, /*noisy_labels=*/false);
  const int n = d.x.rows;

  std::vector<std::vector<double>> au_levels, eu_levels, tu_levels;
  for (size_t lv = 0; lv < levels.size(); ++lv) {
    const auto [m1, m2] = levels[lv];
    const IvMat x = kind == "noise"
                        ? make_interval_noise(d.x, m1, m2)
                        : make_interval_brightness(d.x, 3, m1, m2);
    const auto pred = predict_batch(ck.spec, ck.params, x);
    std::vector<int> correct(n);
    std::vector<double> au(n), eu(n), tu(n);
    for (int i = 0; i < n; ++i) {
      correct[i] = pred[i].pred == d.y[i] ? 1 : 0;
      au[i] = pred[i].unc.au;
      eu[i] = pred[i].unc.eu;
      tu[i] = pred[i].unc.tu;
    }
    const std::string tag = "_level" + std::to_string(lv) + ".csv";
    write_text(out_dir + "/ar_curve_au" + tag,
               ar_curve_csv(ar_curve(au, correct)));
    write_text(out_dir + "/ar_curve_eu" + tag,
               ar_curve_csv(ar_curve(eu, correct)));
    write_text(out_dir + "/ar_curve_tu" + tag,
               ar_curve_csv(ar_curve(tu, correct)));
    au_levels.push_back(std::move(au));
    eu_levels.push_back(std::move(eu));
    tu_levels.push_back(std::move(tu));
  }

  IntervalEvalOutcome out;
  std::string csv = "level,mu1,mu2,r_au,r_eu,r_tu\n";
  for (size_t lv = 0; lv < levels.size(); ++lv) {
    const auto [m1, m2] = levels[lv];
    double r_au = 1.0, r_eu = 1.0, r_tu = 1.0;
    if (lv > 0) {
      r_au = relative_increase({au_levels[0]}, {au_levels[lv]}).ratio;
      r_eu = relative_increase({eu_levels[0]}, {eu_levels[lv]}).ratio;
      r_tu = relative_increase({tu_levels[0]}, {tu_levels[lv]}).ratio;
    }
    out.rows.push_back({m1, m2, r_au, r_eu, r_tu});
    csv += std::to_string(lv) + "," + g17(m1) + "," + g17(m2) + "," +
           g17(r_au) + "," + g17(r_eu) + "," + g17(r_tu) + "\n";
  }
  write_text(out_dir + "/relative_increase.csv", csv);
  return out;
}

}  // namespace creinn
