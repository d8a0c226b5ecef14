#include "checkpoint.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace creinn {

static std::string ints_or_none(const std::vector<int>& v) {
  if (v.empty()) return "none";
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

static std::vector<int> parse_ints_or_none(const std::string& s,
                                           const char* what) {
  std::vector<int> out;
  if (s == "none") return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (...) {
      throw CheckpointError(std::string("checkpoint: bad ") + what + " list");
    }
  }
  return out;
}

static std::string header_line(const Checkpoint& ck) {
  char num[64];
  std::ostringstream o;
  o << "creinn-checkpoint 1";
  o << " in=" << ck.spec.input_dim;
  o << " hidden=" << ints_or_none(ck.spec.hidden);
  std::vector<int> flags(ck.spec.ibn.begin(), ck.spec.ibn.end());
  o << " ibn=" << ints_or_none(flags);
  o << " classes=" << ck.spec.classes;
  auto g17 = [&](double v) {
    std::snprintf(num, sizeof num, "%.17g", v);
    return std::string(num);
  };
  o << " eps=" << g17(ck.spec.ibn_eps);
  o << " momentum=" << g17(ck.spec.ibn_momentum);
  o << " gc0=" << g17(ck.spec.gamma_c0);
  o << " bc0=" << g17(ck.spec.beta_c0);
  o << " gr0=" << g17(ck.spec.gamma_r0);
  o << " br0=" << g17(ck.spec.beta_r0);
  o << " seed=" << ck.seed;
  o << " dataset=" << ck.dataset;
  o << " epochs=" << ck.trained_epochs;
  o << "\n";
  return o.str();
}

static void write_f32(std::ostream& out, const Mat& m) {
  for (double v : m.a) {
    const float f = (float)v;
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    const unsigned char b[4] = {(unsigned char)bits, (unsigned char)(bits >> 8),
                                (unsigned char)(bits >> 16),
                                (unsigned char)(bits >> 24)};
    out.write((const char*)b, 4);
  }
}

static void read_f32(std::istream& in, Mat& m, const char* what) {
  for (double& v : m.a) {
    unsigned char b[4];
    in.read((char*)b, 4);
    if (!in)
      throw CheckpointError(std::string("checkpoint: truncated tensor ") + what);
    const uint32_t bits = (uint32_t)b[0] | ((uint32_t)b[1] << 8) |
                          ((uint32_t)b[2] << 16) | ((uint32_t)b[3] << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    v = (double)f;
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  if (ck.dataset.find_first_of(" \t\n") != std::string::npos)
    throw CheckpointError("checkpoint: dataset token must not contain spaces");
  std::string err;
  if (!ck.spec.valid(&err)) throw CheckpointError("checkpoint: " + err);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("checkpoint: cannot create " + path);
  const std::string hdr = header_line(ck);
  out.write(hdr.data(), (std::streamsize)hdr.size());
  for (const auto& lp : ck.params.lin) {
    write_f32(out, lp.Wc);
    write_f32(out, lp.Wr);
    write_f32(out, lp.bc);
    write_f32(out, lp.br);
  }
  for (const auto& bp : ck.params.ibn) {
    write_f32(out, bp.gamma_c);
    write_f32(out, bp.beta_c);
    write_f32(out, bp.gamma_r);
    write_f32(out, bp.beta_r);
    write_f32(out, bp.run_mc);
    write_f32(out, bp.run_vc);
    write_f32(out, bp.run_mr);
    write_f32(out, bp.run_vr);
  }
  if (!out) throw CheckpointError("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path);
  std::string hdr;
  if (!std::getline(in, hdr))
    throw CheckpointError("checkpoint: missing header in " + path);

  std::istringstream hs(hdr);
  std::string magic;
  int version = 0;
  hs >> magic >> version;
  if (magic != "creinn-checkpoint" || version != 1)
    throw CheckpointError("checkpoint: unrecognized header in " + path);

  Checkpoint ck;
  std::string tok;
  while (hs >> tok) {
    const size_t eq = tok.find('=');
    if (eq == std::string::npos)
      throw CheckpointError("checkpoint: malformed header field '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    try {
      if (key == "in") ck.spec.input_dim = std::stoi(val);
      else if (key == "hidden") ck.spec.hidden = parse_ints_or_none(val, "hidden");
      else if (key == "ibn") {
        const auto flags = parse_ints_or_none(val, "ibn");
        ck.spec.ibn.assign(flags.begin(), flags.end());
      } else if (key == "classes") ck.spec.classes = std::stoi(val);
      else if (key == "eps") ck.spec.ibn_eps = std::stod(val);
      else if (key == "momentum") ck.spec.ibn_momentum = std::stod(val);
      else if (key == "gc0") ck.spec.gamma_c0 = std::stod(val);
      else if (key == "bc0") ck.spec.beta_c0 = std::stod(val);
      else if (key == "gr0") ck.spec.gamma_r0 = std::stod(val);
      else if (key == "br0") ck.spec.beta_r0 = std::stod(val);
      else if (key == "seed") ck.seed = std::stoull(val);
      else if (key == "dataset") ck.dataset = val;
      else if (key == "epochs") ck.trained_epochs = std::stoi(val);
      else throw CheckpointError("checkpoint: unknown header field " + key);
    } catch (const CheckpointError&) {
      throw;
    } catch (...) {
      throw CheckpointError("checkpoint: bad value in header field " + key);
    }
  }
  std::string err;
  if (!ck.spec.valid(&err)) throw CheckpointError("checkpoint: " + err);

  const auto sizes = ck.spec.layer_sizes();
  for (int l = 0; l + 1 < (int)sizes.size(); ++l) {
    LinearParams lp;
    lp.Wc = Mat(sizes[l + 1], sizes[l]);
    lp.Wr = Mat(sizes[l + 1], sizes[l]);
    lp.bc = Mat(1, sizes[l + 1]);
    lp.br = Mat(1, sizes[l + 1]);
    read_f32(in, lp.Wc, "Wc");
    read_f32(in, lp.Wr, "Wr");
    read_f32(in, lp.bc, "bc");
    read_f32(in, lp.br, "br");
    for (double r : lp.Wr.a)
      if (r < 0.0) throw CheckpointError("checkpoint: negative weight radius");
    for (double r : lp.br.a)
      if (r < 0.0) throw CheckpointError("checkpoint: negative bias radius");
    ck.params.lin.push_back(std::move(lp));
  }
  for (size_t h = 0; h < ck.spec.hidden.size(); ++h) {
    if (!ck.spec.ibn[h]) continue;
    const int F = ck.spec.hidden[h];
    IbnParams bp;
    for (Mat* m : {&bp.gamma_c, &bp.beta_c, &bp.gamma_r, &bp.beta_r,
                   &bp.run_mc, &bp.run_vc, &bp.run_mr, &bp.run_vr})
      *m = Mat(1, F);
    read_f32(in, bp.gamma_c, "gamma_c");
    read_f32(in, bp.beta_c, "beta_c");
    read_f32(in, bp.gamma_r, "gamma_r");
    read_f32(in, bp.beta_r, "beta_r");
    read_f32(in, bp.run_mc, "run_mc");
    read_f32(in, bp.run_vc, "run_vc");
    read_f32(in, bp.run_mr, "run_mr");
    read_f32(in, bp.run_vr, "run_vr");
    ck.params.ibn.push_back(std::move(bp));
  }
  char extra;
  if (in.read(&extra, 1))
    throw CheckpointError("checkpoint: trailing bytes in " + path);
  return ck;
}

}  // namespace creinn
