// Exercises the shared library strictly through the public C header: handle
// lifecycle, status codes, error messages, and the numeric guarantees the
// API documents (valid probability boxes, additive uncertainty split).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "creinn.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("creinn_capi_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const {
    return (path / name).string();
  }
};

const char* kSmallConfig =
    "model.hidden = 8\n"
    "model.classes = 3\n"
    "model.gamma_r0 = 0.1\n"
    "model.beta_r0 = 0.1\n"
    "train.epochs = 5\n"
    "train.lr = 0.01\n"
    "data.n_per_class = 20\n"
    "data.eval_n_per_class = 40\n"
    "data.ood_n = 60\n";

creinn_config* parse_or_die(const char* text) {
  creinn_config* cfg = nullptr;
  REQUIRE(creinn_config_parse(text, 0, 0, &cfg) == CREINN_OK);
  REQUIRE(cfg != nullptr);
  return cfg;
}

}  // namespace

TEST_CASE("version and error strings are always available") {
  const char* v = creinn_version();
  REQUIRE(v != nullptr);
  CHECK(std::strlen(v) > 0);
  CHECK(creinn_last_error() != nullptr);  // empty string before any failure
}

TEST_CASE("config parse: success, override semantics, and failure codes") {
  creinn_config* cfg = parse_or_die(kSmallConfig);
  creinn_config_free(cfg);

  // An override only takes effect when the flag says so.
  creinn_config* a = nullptr;
  CHECK(creinn_config_parse("train.seed = 7\n", 0, 999, &a) == CREINN_OK);
  creinn_config_free(a);

  creinn_config* bad = reinterpret_cast<creinn_config*>(0x1);
  CHECK(creinn_config_parse("model.flux = 3\n", 0, 0, &bad) ==
        CREINN_ERR_CONFIG);
  CHECK(bad == nullptr);  // out param is cleared on failure
  CHECK(std::string(creinn_last_error()).find("flux") != std::string::npos);

  CHECK(creinn_config_parse("train.epochs = 0\n", 0, 0, &bad) ==
        CREINN_ERR_CONFIG);
  CHECK(creinn_config_parse(nullptr, 0, 0, &bad) == CREINN_ERR_CONFIG);
  CHECK(creinn_config_parse("x = 1\n", 0, 0, nullptr) == CREINN_ERR_CONFIG);
  CHECK(std::strlen(creinn_last_error()) > 0);

  creinn_config_free(nullptr);  // must be a harmless no-op
}

TEST_CASE("config load from file") {
  TempDir td;
  const std::string path = td.sub("run.cfg");
  {
    std::ofstream out(path);
    out << kSmallConfig;
  }
  creinn_config* cfg = nullptr;
  CHECK(creinn_config_load(path.c_str(), 0, 0, &cfg) == CREINN_OK);
  REQUIRE(cfg != nullptr);
  creinn_config_free(cfg);

  CHECK(creinn_config_load(td.sub("absent.cfg").c_str(), 0, 0, &cfg) ==
        CREINN_ERR_CONFIG);
  CHECK(cfg == nullptr);
}

TEST_CASE("train, load, predict, and downstream commands") {
  TempDir td;
  creinn_config* cfg = parse_or_die(kSmallConfig);
  const std::string train_dir = td.sub("train");

  creinn_train_summary ts{};
  REQUIRE(creinn_train(cfg, train_dir.c_str(), &ts) == CREINN_OK);
  CHECK(ts.best_epoch >= 1);
  CHECK(ts.best_valid_acc >= 0.0);
  CHECK(ts.best_valid_acc <= 1.0);
  CHECK(std::isfinite(ts.best_valid_loss));
  CHECK(ts.positive_radius_fraction >= 0.0);
  CHECK(ts.positive_radius_fraction <= 1.0);
  const std::string ck = train_dir + "/model.ckpt";
  CHECK(fs::exists(ck));
  CHECK(fs::exists(train_dir + "/history.csv"));
  CHECK(fs::exists(train_dir + "/config_resolved.txt"));

  // A null summary pointer is allowed (fire-and-forget training).
  REQUIRE(creinn_train(cfg, td.sub("train2").c_str(), nullptr) == CREINN_OK);

  creinn_model* model = nullptr;
  REQUIRE(creinn_model_load(ck.c_str(), &model) == CREINN_OK);
  REQUIRE(model != nullptr);
  int dim = 0, classes = 0;
  CHECK(creinn_model_input_dim(model, &dim) == CREINN_OK);
  CHECK(creinn_model_classes(model, &classes) == CREINN_OK);
  CHECK(dim == 2);
  CHECK(classes == 3);

  SUBCASE("predict_box returns valid probability boxes") {
    const int n = 4;
    const std::vector<double> x_lo = {0.1, 0.2, 0.8, 0.1, 0.4, 0.9, 0.0, 0.0};
    std::vector<double> x_hi = x_lo;
    for (double& v : x_hi) v += 0.05;
    std::vector<double> q_lo(n * classes), q_hi(n * classes);
    REQUIRE(creinn_model_predict_box(model, x_lo.data(), x_hi.data(), n, dim,
                                     q_lo.data(), q_hi.data()) == CREINN_OK);
    for (int i = 0; i < n; ++i) {
      double sum_lo = 0, sum_hi = 0;
      for (int k = 0; k < classes; ++k) {
        const double lo = q_lo[i * classes + k], hi = q_hi[i * classes + k];
        CHECK(lo >= 0.0);
        CHECK(hi <= 1.0);
        CHECK(lo <= hi + 1e-15);
        sum_lo += lo;
        sum_hi += hi;
      }
      CHECK(sum_lo <= 1.0 + 1e-9);
      CHECK(sum_hi >= 1.0 - 1e-9);
    }
  }

  SUBCASE("uncertainty: additive split, class index, optional outputs") {
    const int n = 3;
    const std::vector<double> x_lo = {0.1, 0.2, 0.5, 0.5, 0.9, 0.1};
    std::vector<double> x_hi = x_lo;
    for (double& v : x_hi) v += 0.1;
    std::vector<double> au(n), eu(n), tu(n);
    std::vector<int> pred(n);
    REQUIRE(creinn_model_uncertainty(model, x_lo.data(), x_hi.data(), n, dim,
                                     au.data(), eu.data(), tu.data(),
                                     pred.data()) == CREINN_OK);
    for (int i = 0; i < n; ++i) {
      CHECK(au[i] >= -1e-12);
      CHECK(eu[i] >= -1e-12);
      CHECK(au[i] + eu[i] == doctest::Approx(tu[i]).epsilon(1e-9));
      CHECK(pred[i] >= 0);
      CHECK(pred[i] < classes);
    }
    // Any subset of the output arrays may be omitted.
    std::vector<double> eu_only(n);
    REQUIRE(creinn_model_uncertainty(model, x_lo.data(), x_hi.data(), n, dim,
                                     nullptr, eu_only.data(), nullptr,
                                     nullptr) == CREINN_OK);
    for (int i = 0; i < n; ++i) CHECK(eu_only[i] == eu[i]);
    REQUIRE(creinn_model_uncertainty(model, x_lo.data(), x_hi.data(), n, dim,
                                     nullptr, nullptr, nullptr,
                                     nullptr) == CREINN_OK);
  }

  SUBCASE("batch argument validation") {
    std::vector<double> x(2, 0.5), q(classes * 2);
    CHECK(creinn_model_predict_box(model, x.data(), x.data(), 1, 5, q.data(),
                                   q.data()) == CREINN_ERR_CONFIG);
    CHECK(std::string(creinn_last_error()).find("input dim") !=
          std::string::npos);
    CHECK(creinn_model_predict_box(model, x.data(), x.data(), 0, 2, q.data(),
                                   q.data()) == CREINN_ERR_CONFIG);
    CHECK(creinn_model_predict_box(model, nullptr, x.data(), 1, 2, q.data(),
                                   q.data()) == CREINN_ERR_CONFIG);
    CHECK(creinn_model_predict_box(model, x.data(), x.data(), 1, 2, nullptr,
                                   q.data()) == CREINN_ERR_CONFIG);
    CHECK(creinn_model_uncertainty(nullptr, x.data(), x.data(), 1, 2, nullptr,
                                   nullptr, nullptr, nullptr) ==
          CREINN_ERR_CONFIG);
  }

  SUBCASE("eval summary honours the measure filter") {
    creinn_eval_summary es{};
    REQUIRE(creinn_eval(cfg, ck.c_str(), td.sub("eval_eu").c_str(), "eu",
                        &es) == CREINN_OK);
    CHECK(es.accuracy >= 0.0);
    CHECK(es.accuracy <= 1.0);
    CHECK(std::isfinite(es.auarc_eu));
    CHECK(std::isnan(es.auarc_au));
    CHECK(std::isnan(es.auarc_tu));

    creinn_eval_summary all{};
    REQUIRE(creinn_eval(cfg, ck.c_str(), td.sub("eval_all").c_str(), nullptr,
                        &all) == CREINN_OK);
    CHECK(std::isfinite(all.auarc_au));
    CHECK(std::isfinite(all.auarc_eu));
    CHECK(std::isfinite(all.auarc_tu));
    CHECK(all.accuracy == es.accuracy);
    CHECK(fs::exists(td.sub("eval_all") + "/predictions.csv"));
    CHECK(fs::exists(td.sub("eval_all") + "/ar_curve_eu.csv"));
    CHECK(fs::exists(td.sub("eval_all") + "/eval_metrics.csv"));

    CHECK(creinn_eval(cfg, ck.c_str(), td.sub("eval_bad").c_str(), "banana",
                      &es) == CREINN_ERR_CONFIG);
    CHECK(creinn_eval(cfg, td.sub("no_such.ckpt").c_str(),
                      td.sub("eval_gone").c_str(), nullptr, &es) ==
          CREINN_ERR_CONFIG);
  }

  SUBCASE("ood separation scores land in [0, 1]") {
    creinn_ood_summary os{};
    REQUIRE(creinn_ood(cfg, ck.c_str(), td.sub("ood").c_str(), nullptr,
                       &os) == CREINN_OK);
    for (double v : {os.auroc_eu, os.auprc_eu, os.auroc_tu, os.auprc_tu}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(fs::exists(td.sub("ood") + "/ood.csv"));
  }

  SUBCASE("interval eval: default sweep, custom levels, bad input") {
    creinn_interval_summary is{};
    REQUIRE(creinn_interval_eval(cfg, ck.c_str(), td.sub("iv").c_str(),
                                 nullptr, nullptr, 0, &is) == CREINN_OK);
    CHECK(is.levels == 4);
    CHECK(fs::exists(td.sub("iv") + "/relative_increase.csv"));

    const double pairs[] = {0.0, 0.05, 0.1, 0.2};
    REQUIRE(creinn_interval_eval(cfg, ck.c_str(), td.sub("iv2").c_str(),
                                 "noise", pairs, 2, &is) == CREINN_OK);
    CHECK(is.levels == 2);

    CHECK(creinn_interval_eval(cfg, ck.c_str(), td.sub("iv3").c_str(),
                               "noise", nullptr, 2, &is) == CREINN_ERR_CONFIG);
    // Brightness shifts need RGB-shaped features; 2-feature inputs cannot be
    // grouped into channels, so this must be rejected cleanly.
    CHECK(creinn_interval_eval(cfg, ck.c_str(), td.sub("iv4").c_str(),
                               "brightness", nullptr, 0,
                               &is) == CREINN_ERR_CONFIG);
  }

  SUBCASE("ensemble of one equals its single member") {
    const char* members[] = {ck.c_str()};
    creinn_ensemble_summary ens{};
    REQUIRE(creinn_ensemble(cfg, members, 1, td.sub("ens").c_str(), &ens) ==
            CREINN_OK);
    CHECK(ens.members == 1);
    CHECK(ens.accuracy >= 0.0);
    CHECK(ens.accuracy <= 1.0);
    CHECK(ens.averaged_proper == 1);
    // Averaging one member is the identity, so both AUROC columns agree.
    CHECK(ens.ensemble_auroc_eu == ens.mean_single_auroc_eu);
    CHECK(fs::exists(td.sub("ens") + "/ensemble.csv"));

    CHECK(creinn_ensemble(cfg, members, 0, td.sub("ens0").c_str(), &ens) ==
          CREINN_ERR_CONFIG);
    const char* null_member[] = {nullptr};
    CHECK(creinn_ensemble(cfg, null_member, 1, td.sub("ens1").c_str(),
                          &ens) == CREINN_ERR_CONFIG);
  }

  creinn_model_free(model);
  creinn_model_free(nullptr);
  creinn_config_free(cfg);
}

TEST_CASE("model load failure paths") {
  TempDir td;
  creinn_model* m = reinterpret_cast<creinn_model*>(0x1);
  CHECK(creinn_model_load(td.sub("missing.ckpt").c_str(), &m) ==
        CREINN_ERR_CONFIG);
  CHECK(m == nullptr);
  CHECK(std::strlen(creinn_last_error()) > 0);

  const std::string junk = td.sub("junk.ckpt");
  {
    std::ofstream out(junk, std::ios::binary);
    out << "not a checkpoint at all";
  }
  CHECK(creinn_model_load(junk.c_str(), &m) == CREINN_ERR_CONFIG);
  CHECK(creinn_model_load(nullptr, &m) == CREINN_ERR_CONFIG);

  int v = 0;
  CHECK(creinn_model_input_dim(nullptr, &v) == CREINN_ERR_CONFIG);
  CHECK(creinn_model_classes(nullptr, &v) == CREINN_ERR_CONFIG);
}

TEST_CASE("a dataset too small to split reports a numeric error") {
  TempDir td;
  // 2 classes x 2 samples = 4 rows; the 5:1 train/validation split needs 6.
  creinn_config* cfg = parse_or_die(
      "model.hidden = 4\n"
      "model.classes = 2\n"
      "train.epochs = 3\n"
      "data.n_per_class = 2\n");
  creinn_train_summary ts{};
  CHECK(creinn_train(cfg, td.sub("boom").c_str(), &ts) == CREINN_ERR_NUMERIC);
  CHECK(std::strlen(creinn_last_error()) > 0);
  creinn_config_free(cfg);
}
