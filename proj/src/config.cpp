#include "config.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace creinn {

static std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

static long to_long(const std::string& key, const std::string& v) {
  try {
    size_t pos;
    long r = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return r;
  } catch (...) {
    throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
  }
}

static double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return r;
  } catch (...) {
    throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  }
}

static uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos;
    unsigned long long r = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return (uint64_t)r;
  } catch (...) {
    throw ConfigError("config: bad seed for " + key + ": '" + v + "'");
  }
}

static std::vector<int> to_int_list(const std::string& key,
                                    const std::string& v) {
  std::vector<int> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back((int)to_long(key, trim(item)));
  return out;
}

RunConfig parse_config_text(const std::string& text,
                            const uint64_t* seed_override) {
  RunConfig c;
  bool ibn_given = false;
  bool data_seed_given = false, noise_seed_given = false,
       eval_seed_given = false, ood_seed_given = false;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw ConfigError("config: duplicate key " + key);

    if (key == "model.input_dim") c.model.input_dim = (int)to_long(key, val);
    else if (key == "model.hidden") c.model.hidden = to_int_list(key, val);
    else if (key == "model.ibn") {
      const auto flags = to_int_list(key, val);
      c.model.ibn.assign(flags.begin(), flags.end());
      ibn_given = true;
    }
    else if (key == "model.classes") c.model.classes = (int)to_long(key, val);
    else if (key == "model.ibn_eps") c.model.ibn_eps = to_double(key, val);
    else if (key == "model.ibn_momentum") c.model.ibn_momentum = to_double(key, val);
    else if (key == "model.gamma_c0") c.model.gamma_c0 = to_double(key, val);
    else if (key == "model.beta_c0") c.model.beta_c0 = to_double(key, val);
    else if (key == "model.gamma_r0") c.model.gamma_r0 = to_double(key, val);
    else if (key == "model.beta_r0") c.model.beta_r0 = to_double(key, val);
    else if (key == "train.epochs") c.train.epochs = (int)to_long(key, val);
    else if (key == "train.batch_size") c.train.batch_size = (int)to_long(key, val);
    else if (key == "train.lr") c.train.lr = to_double(key, val);
    else if (key == "train.lr_factor") c.train.lr_factor = to_double(key, val);
    else if (key == "train.lr_drops") c.train.lr_drops = to_int_list(key, val);
    else if (key == "train.beta1") c.train.beta1 = to_double(key, val);
    else if (key == "train.beta2") c.train.beta2 = to_double(key, val);
    else if (key == "train.adam_eps") c.train.adam_eps = to_double(key, val);
    else if (key == "train.seed") c.train.seed = to_u64(key, val);
    else if (key == "train.freeze_radii") c.train.freeze_radii = to_long(key, val) != 0;
    else if (key == "data.kind") c.kind = val;
    else if (key == "data.n_per_class") c.n_per_class = (int)to_long(key, val);
    else if (key == "data.separation") c.separation = to_double(key, val);
    else if (key == "data.margin") c.margin = to_double(key, val);
    else if (key == "data.seed") { c.data_seed = to_u64(key, val); data_seed_given = true; }
    else if (key == "data.label_noise") c.label_noise = to_double(key, val);
    else if (key == "data.noise_seed") { c.noise_seed = to_u64(key, val); noise_seed_given = true; }
    else if (key == "data.val_labels") c.val_labels = val;
    else if (key == "data.mu1") c.mu1 = to_double(key, val);
    else if (key == "data.mu2") c.mu2 = to_double(key, val);
    else if (key == "data.eval_n_per_class") c.eval_n_per_class = (int)to_long(key, val);
    else if (key == "data.eval_seed") { c.eval_seed = to_u64(key, val); eval_seed_given = true; }
    else if (key == "data.eval_mu1") c.eval_mu1 = to_double(key, val);
    else if (key == "data.eval_mu2") c.eval_mu2 = to_double(key, val);
    else if (key == "data.ood_n") c.ood_n = (int)to_long(key, val);
    else if (key == "data.ood_offset") c.ood_offset = to_double(key, val);
    else if (key == "data.ood_seed") { c.ood_seed = to_u64(key, val); ood_seed_given = true; }
    else if (key == "data.ensemble_size") c.ensemble_size = (int)to_long(key, val);
    else throw ConfigError("config: unknown key " + key);
  }

  if (c.model.ibn.empty() && !ibn_given)
    c.model.ibn.assign(c.model.hidden.size(), 1);
  if (seed_override) c.train.seed = *seed_override;
  if (!data_seed_given) c.data_seed = c.train.seed;
  if (!noise_seed_given) c.noise_seed = c.train.seed + 1;
  if (!eval_seed_given) c.eval_seed = c.train.seed + 2;
  if (!ood_seed_given) c.ood_seed = c.train.seed + 3;

  std::string err;
  if (!c.model.valid(&err)) throw ConfigError("config: " + err);
  if (c.kind != "blobs")
    throw ConfigError("config: unsupported data.kind '" + c.kind + "'");
  if (c.val_labels != "noisy" && c.val_labels != "clean")
    throw ConfigError("config: data.val_labels must be noisy or clean");
  if (c.train.epochs < 1 || c.train.batch_size < 1)
    throw ConfigError("config: epochs and batch_size must be >= 1");
  if (!(c.train.lr > 0.0)) throw ConfigError("config: train.lr must be > 0");
  if (c.mu1 > c.mu2 || c.eval_mu1 > c.eval_mu2)
    throw ConfigError("config: interval levels need mu1 <= mu2");
  if (c.label_noise < 0.0 || c.label_noise >= 0.5)
    throw ConfigError("config: data.label_noise must be in [0, 0.5)");
  if (c.n_per_class < 2 || c.eval_n_per_class < 1 || c.ood_n < 1)
    throw ConfigError("config: sample counts must be positive");
  if (c.ensemble_size < 1 || c.ensemble_size > 64)
    throw ConfigError("config: data.ensemble_size must be in [1, 64]");
  return c;
}

RunConfig parse_config_file(const std::string& path,
                            const uint64_t* seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), seed_override);
}

static std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

static std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

std::string config_to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "model.input_dim = " << c.model.input_dim << "\n";
  o << "model.hidden = " << join_ints(c.model.hidden) << "\n";
  std::vector<int> flags(c.model.ibn.begin(), c.model.ibn.end());
  o << "model.ibn = " << join_ints(flags) << "\n";
  o << "model.classes = " << c.model.classes << "\n";
  o << "model.ibn_eps = " << fmt(c.model.ibn_eps) << "\n";
  o << "model.ibn_momentum = " << fmt(c.model.ibn_momentum) << "\n";
  o << "model.gamma_c0 = " << fmt(c.model.gamma_c0) << "\n";
  o << "model.beta_c0 = " << fmt(c.model.beta_c0) << "\n";
  o << "model.gamma_r0 = " << fmt(c.model.gamma_r0) << "\n";
  o << "model.beta_r0 = " << fmt(c.model.beta_r0) << "\n";
  o << "train.epochs = " << c.train.epochs << "\n";
  o << "train.batch_size = " << c.train.batch_size << "\n";
  o << "train.lr = " << fmt(c.train.lr) << "\n";
  o << "train.lr_factor = " << fmt(c.train.lr_factor) << "\n";
  o << "train.lr_drops = " << join_ints(c.train.lr_drops) << "\n";
  o << "train.beta1 = " << fmt(c.train.beta1) << "\n";
  o << "train.beta2 = " << fmt(c.train.beta2) << "\n";
  o << "train.adam_eps = " << fmt(c.train.adam_eps) << "\n";
  o << "train.seed = " << c.train.seed << "\n";
  o << "train.freeze_radii = " << (c.train.freeze_radii ? 1 : 0) << "\n";
  o << "data.kind = " << c.kind << "\n";
  o << "data.n_per_class = " << c.n_per_class << "\n";
  o << "data.separation = " << fmt(c.separation) << "\n";
  o << "data.margin = " << fmt(c.margin) << "\n";
  o << "data.seed = " << c.data_seed << "\n";
  o << "data.label_noise = " << fmt(c.label_noise) << "\n";
  o << "data.noise_seed = " << c.noise_seed << "\n";
  o << "data.val_labels = " << c.val_labels << "\n";
  o << "data.mu1 = " << fmt(c.mu1) << "\n";
  o << "data.mu2 = " << fmt(c.mu2) << "\n";
  o << "data.eval_n_per_class = " << c.eval_n_per_class << "\n";
  o << "data.eval_seed = " << c.eval_seed << "\n";
  o << "data.eval_mu1 = " << fmt(c.eval_mu1) << "\n";
  o << "data.eval_mu2 = " << fmt(c.eval_mu2) << "\n";
  o << "data.ood_n = " << c.ood_n << "\n";
  o << "data.ood_offset = " << fmt(c.ood_offset) << "\n";
  o << "data.ood_seed = " << c.ood_seed << "\n";
  o << "data.ensemble_size = " << c.ensemble_size << "\n";
  return o.str();
}

}  // namespace creinn
