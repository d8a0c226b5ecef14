// Command-line front end. Talks to the core exclusively through the C API of
// the shared library, which keeps that interface honest.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "creinn.h"

namespace {

struct ConfigHandle {
  creinn_config* h = nullptr;
  ~ConfigHandle() { creinn_config_free(h); }
};

int fail(int status) {
  std::fprintf(stderr, "error: %s\n", creinn_last_error());
  return status == CREINN_ERR_CONFIG ? 2 : 3;
}

int load_config(const std::string& path, bool has_seed, uint64_t seed,
                ConfigHandle& cfg) {
  return creinn_config_load(path.c_str(), has_seed ? 1 : 0, seed, &cfg.h);
}

// "mu1:mu2,mu1:mu2,..." -> flattened pairs; returns false on bad syntax.
bool parse_levels(const std::string& text, std::vector<double>& out) {
  out.clear();
  if (text.empty()) return true;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const size_t colon = item.find(':');
    if (colon == std::string::npos) return false;
    try {
      size_t used = 0;
      const double a = std::stod(item.substr(0, colon), &used);
      if (used != colon) return false;
      const double b = std::stod(item.substr(colon + 1), &used);
      if (used != item.size() - colon - 1) return false;
      out.push_back(a);
      out.push_back(b);
    } catch (...) {
      return false;
    }
    pos = comma + 1;
  }
  return !out.empty();
}

void print_measure_row(const char* name, double a, double b, const char* la,
                       const char* lb) {
  if (std::isnan(a) && std::isnan(b)) return;
  std::printf("%s: %s=%.6f %s=%.6f\n", name, la, a, lb, b);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interval neural networks with credal-set predictions"};
  app.require_subcommand(1);

  std::string config_path, out_dir, checkpoint, measure, kind = "noise";
  std::string levels_text;
  std::vector<std::string> checkpoints;
  uint64_t seed = 0;
  bool has_seed = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value run configuration")
        ->required();
    sub->add_option("--out-dir", out_dir, "directory for result files")
        ->required();
    sub->add_option("--seed", seed, "override train.seed (reseeds derived seeds)")
        ->each([&](const std::string&) { has_seed = true; });
  };

  CLI::App* train = app.add_subcommand("train", "fit a model, write checkpoint + history");
  add_common(train);

  CLI::App* eval = app.add_subcommand("eval", "accuracy and accuracy-rejection curves on a fresh draw");
  add_common(eval);
  eval->add_option("--checkpoint", checkpoint, "trained model file")->required();
  eval->add_option("--measure", measure, "au, eu or tu (default: all)")
      ->check(CLI::IsMember({"au", "eu", "tu"}));

  CLI::App* ensemble = app.add_subcommand("ensemble", "evaluate several checkpoints as one credal predictor");
  add_common(ensemble);
  ensemble->add_option("--checkpoint", checkpoints, "member model file (repeatable)")
      ->required();

  CLI::App* ood = app.add_subcommand("ood", "in- vs out-of-distribution uncertainty separation");
  add_common(ood);
  ood->add_option("--checkpoint", checkpoint, "trained model file")->required();
  ood->add_option("--measure", measure, "eu or tu (default: both)")
      ->check(CLI::IsMember({"eu", "tu"}));

  CLI::App* ieval = app.add_subcommand("interval-eval", "uncertainty growth across input-interval levels");
  add_common(ieval);
  ieval->add_option("--checkpoint", checkpoint, "trained model file")->required();
  ieval->add_option("--kind", kind, "interval construction: noise or brightness")
      ->check(CLI::IsMember({"noise", "brightness"}));
  ieval->add_option("--levels", levels_text,
                    "level pairs as mu1:mu2,mu1:mu2,... (default: built-in sweep)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ConfigHandle cfg;
  if (int rc = load_config(config_path, has_seed, seed, cfg)) return fail(rc);

  if (train->parsed()) {
    creinn_train_summary s{};
    if (int rc = creinn_train(cfg.h, out_dir.c_str(), &s)) return fail(rc);
    std::printf("best_epoch=%d best_valid_acc=%.6f best_valid_loss=%.6f positive_radius_fraction=%.6f\n",
                s.best_epoch, s.best_valid_acc, s.best_valid_loss,
                s.positive_radius_fraction);
    std::printf("checkpoint: %s/model.ckpt\n", out_dir.c_str());
    return 0;
  }

  if (eval->parsed()) {
    creinn_eval_summary s{};
    if (int rc = creinn_eval(cfg.h, checkpoint.c_str(), out_dir.c_str(),
                             measure.c_str(), &s))
      return fail(rc);
    std::printf("accuracy=%.6f\n", s.accuracy);
    if (!std::isnan(s.auarc_au)) std::printf("auarc_au=%.6f\n", s.auarc_au);
    if (!std::isnan(s.auarc_eu)) std::printf("auarc_eu=%.6f\n", s.auarc_eu);
    if (!std::isnan(s.auarc_tu)) std::printf("auarc_tu=%.6f\n", s.auarc_tu);
    return 0;
  }

  if (ensemble->parsed()) {
    std::vector<const char*> ptrs;
    for (const auto& c : checkpoints) ptrs.push_back(c.c_str());
    creinn_ensemble_summary s{};
    if (int rc = creinn_ensemble(cfg.h, ptrs.data(), (int)ptrs.size(),
                                 out_dir.c_str(), &s))
      return fail(rc);
    std::printf("members=%d accuracy=%.6f ensemble_auroc_eu=%.6f mean_single_auroc_eu=%.6f proper=%s\n",
                s.members, s.accuracy, s.ensemble_auroc_eu,
                s.mean_single_auroc_eu, s.averaged_proper ? "yes" : "no");
    return 0;
  }

  if (ood->parsed()) {
    creinn_ood_summary s{};
    if (int rc = creinn_ood(cfg.h, checkpoint.c_str(), out_dir.c_str(),
                            measure.c_str(), &s))
      return fail(rc);
    print_measure_row("eu", s.auroc_eu, s.auprc_eu, "auroc", "auprc");
    print_measure_row("tu", s.auroc_tu, s.auprc_tu, "auroc", "auprc");
    return 0;
  }

  if (ieval->parsed()) {
    std::vector<double> levels;
    if (!parse_levels(levels_text, levels) && !levels_text.empty()) {
      std::fprintf(stderr, "error: bad --levels syntax, expected mu1:mu2,...\n");
      return 2;
    }
    creinn_interval_summary s{};
    if (int rc = creinn_interval_eval(cfg.h, checkpoint.c_str(),
                                      out_dir.c_str(), kind.c_str(),
                                      levels.data(), (int)levels.size() / 2,
                                      &s))
      return fail(rc);
    std::printf("levels=%d (relative_increase.csv written)\n", s.levels);
    return 0;
  }

  return 2;  // unreachable with require_subcommand(1)
}
