#include "data.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "model.h"
#include "rng.h"

namespace creinn {

static constexpr double kTau = 6.283185307179586476925286766559;

std::vector<std::pair<double, double>> blob_centers(int classes,
                                                    double separation) {
  std::vector<std::pair<double, double>> c(classes);
  for (int k = 0; k < classes; ++k) {
    const double ang = kTau * k / classes;
    c[k] = {separation * std::cos(ang), separation * std::sin(ang)};
  }
  return c;
}

static double map01(double raw, double M) {
  const double v = (raw + M) / (2.0 * M);
  return std::min(std::max(v, 0.0), 1.0);
}

Dataset synth_blobs(int classes, int n_per_class, double separation,
                    double margin, uint64_t seed) {
  if (classes < 2 || n_per_class < 1)
    throw DataError("synth_blobs: need >= 2 classes and >= 1 sample each");
  Rng rng(seed, kStreamData);
  const double M = separation + margin;
  const auto centers = blob_centers(classes, separation);
  const int N = classes * n_per_class;
  Mat x(N, 2);
  std::vector<int> y(N);
  int row = 0;
  for (int k = 0; k < classes; ++k) {
    for (int i = 0; i < n_per_class; ++i, ++row) {
      x.at(row, 0) = map01(centers[k].first + rng.normal(), M);
      x.at(row, 1) = map01(centers[k].second + rng.normal(), M);
      y[row] = k;
    }
  }
  std::vector<int> perm(N);
  for (int i = 0; i < N; ++i) perm[i] = i;
  rng.shuffle(perm);
  Dataset d;
  d.x = Mat(N, 2);
  d.y.resize(N);
  d.classes = classes;
  for (int i = 0; i < N; ++i) {
    d.x.at(i, 0) = x.at(perm[i], 0);
    d.x.at(i, 1) = x.at(perm[i], 1);
    d.y[i] = y[perm[i]];
  }
  d.y_clean = d.y;
  return d;
}

Mat synth_ood(int n, int classes, double separation, double margin,
              double offset, uint64_t seed) {
  Rng rng(seed, kStreamData);
  const double M = separation + margin;
  const double radius = separation + offset;
  const double ang = kTau * 0.5 / classes;  // halfway between class directions
  const double cx = radius * std::cos(ang), cy = radius * std::sin(ang);
  Mat x(n, 2);
  for (int i = 0; i < n; ++i) {
    x.at(i, 0) = map01(cx + rng.normal(), M);
    x.at(i, 1) = map01(cy + rng.normal(), M);
  }
  return x;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw DataError("quantile of empty vector");
  std::sort(v.begin(), v.end());
  q = std::min(std::max(q, 0.0), 1.0);
  const double pos = q * (double)(v.size() - 1);
  const size_t lo = (size_t)pos;
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - (double)lo;
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

void boundary_noise(Dataset& d, double separation, double margin,
                    double fraction, uint64_t seed) {
  if (fraction <= 0.0) return;
  Rng rng(seed, kStreamNoise);
  const double M = separation + margin;
  const auto centers = blob_centers(d.classes, separation);
  const int N = d.x.rows;
  std::vector<double> band(N);
  std::vector<int> second(N);
  for (int i = 0; i < N; ++i) {
    const double rx = d.x.at(i, 0) * (2.0 * M) - M;
    const double ry = d.x.at(i, 1) * (2.0 * M) - M;
    double d1 = 1e300, d2 = 1e300;
    int k1 = 0, k2 = 0;
    for (int k = 0; k < d.classes; ++k) {
      const double dx = rx - centers[k].first, dy = ry - centers[k].second;
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (dist < d1) {
        d2 = d1; k2 = k1;
        d1 = dist; k1 = k;
      } else if (dist < d2) {
        d2 = dist; k2 = k;
      }
    }
    band[i] = d2 - d1;
    second[i] = k2;
  }
  const double threshold = quantile(band, 2.0 * fraction);
  for (int i = 0; i < N; ++i) {
    if (band[i] <= threshold && rng.uniform() < 0.5) d.y[i] = second[i];
  }
}

IvMat make_interval_noise(const Mat& x, double mu1, double mu2) {
  if (mu1 > mu2) throw DataError("make_interval_noise: mu1 must be <= mu2");
  IvMat out(x.rows, x.cols);
  for (size_t t = 0; t < x.size(); ++t) {
    out.lo.a[t] = std::min(std::max(x.a[t] + mu1, 0.0), 1.0);
    out.hi.a[t] = std::min(std::max(x.a[t] + mu2, 0.0), 1.0);
  }
  return out;
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b});
  const double mnv = std::min({r, g, b});
  const double delta = mx - mnv;
  v = mx;
  s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) {
    h = 0.0;
    return;
  }
  double hh;
  if (mx == r)
    hh = (g - b) / delta;
  else if (mx == g)
    hh = 2.0 + (b - r) / delta;
  else
    hh = 4.0 + (r - g) / delta;
  hh /= 6.0;
  if (hh < 0.0) hh += 1.0;
  h = hh;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  if (s <= 0.0) {
    r = g = b = v;
    return;
  }
  double hh = h * 6.0;
  if (hh >= 6.0) hh -= 6.0;
  const int sector = (int)hh;
  const double f = hh - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

static void shift_pixel(const double* in, double beta, double* out, int ch) {
  if (ch == 1) {
    out[0] = std::min(std::max(in[0] + beta, 0.0), 1.0);
    return;
  }
  double h, s, v;
  rgb_to_hsv(in[0], in[1], in[2], h, s, v);
  v = std::min(std::max(v + beta, 0.0), 1.0);
  hsv_to_rgb(h, s, v, out[0], out[1], out[2]);
}

IvMat make_interval_brightness(const Mat& x, int channels, double beta1,
                               double beta2) {
  if (channels != 1 && channels != 3)
    throw DataError("make_interval_brightness: channels must be 1 or 3");
  if (beta1 > beta2)
    throw DataError("make_interval_brightness: beta1 must be <= beta2");
  if (x.cols % channels != 0)
    throw DataError("make_interval_brightness: row length not divisible by channels");
  IvMat out(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int p = 0; p < x.cols; p += channels) {
      shift_pixel(x.row(i) + p, beta1, out.lo.row(i) + p, channels);
      shift_pixel(x.row(i) + p, beta2, out.hi.row(i) + p, channels);
    }
  }
  return out;
}

// ---- IDX ----

static uint32_t read_be32(std::istream& in, const char* what) {
  unsigned char b[4];
  in.read((char*)b, 4);
  if (!in) throw DataError(std::string("idx: truncated ") + what);
  return ((uint32_t)b[0] << 24) | ((uint32_t)b[1] << 16) |
         ((uint32_t)b[2] << 8) | (uint32_t)b[3];
}

static void write_be32(std::ostream& out, uint32_t v) {
  const unsigned char b[4] = {(unsigned char)(v >> 24), (unsigned char)(v >> 16),
                              (unsigned char)(v >> 8), (unsigned char)v};
  out.write((const char*)b, 4);
}

ImageSet load_idx_images(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("idx: cannot open " + path);
  if (read_be32(in, "magic") != 0x00000803u)
    throw DataError("idx: bad image magic in " + path);
  ImageSet set;
  set.n = (int)read_be32(in, "count");
  set.h = (int)read_be32(in, "height");
  set.w = (int)read_be32(in, "width");
  if (set.n < 0 || set.h <= 0 || set.w <= 0)
    throw DataError("idx: bad image dimensions in " + path);
  const size_t total = (size_t)set.n * set.h * set.w;
  std::vector<unsigned char> raw(total);
  in.read((char*)raw.data(), (std::streamsize)total);
  if ((size_t)in.gcount() != total)
    throw DataError("idx: truncated image payload in " + path);
  set.x = Mat(set.n, set.h * set.w);
  for (size_t t = 0; t < total; ++t) set.x.a[t] = raw[t] / 255.0;
  return set;
}

std::vector<int> load_idx_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("idx: cannot open " + path);
  if (read_be32(in, "magic") != 0x00000801u)
    throw DataError("idx: bad label magic in " + path);
  const uint32_t n = read_be32(in, "count");
  std::vector<unsigned char> raw(n);
  in.read((char*)raw.data(), (std::streamsize)n);
  if ((size_t)in.gcount() != n)
    throw DataError("idx: truncated label payload in " + path);
  return std::vector<int>(raw.begin(), raw.end());
}

void save_idx_images(const std::string& path, const ImageSet& imgs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("idx: cannot create " + path);
  write_be32(out, 0x00000803u);
  write_be32(out, (uint32_t)imgs.n);
  write_be32(out, (uint32_t)imgs.h);
  write_be32(out, (uint32_t)imgs.w);
  for (double v : imgs.x.a) {
    const double c = std::min(std::max(v, 0.0), 1.0);
    out.put((char)(unsigned char)std::lround(c * 255.0));
  }
  if (!out) throw DataError("idx: write failed for " + path);
}

void save_idx_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("idx: cannot create " + path);
  write_be32(out, 0x00000801u);
  write_be32(out, (uint32_t)labels.size());
  for (int v : labels) out.put((char)(unsigned char)v);
  if (!out) throw DataError("idx: write failed for " + path);
}

}  // namespace creinn
