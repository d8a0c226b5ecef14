#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "data.h"
#include "rng.h"

using namespace creinn;

namespace {

struct TempDir {
  std::filesystem::path p;
  TempDir() {
    p = std::filesystem::temp_directory_path() /
        ("creinn_data_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(p);
  }
  ~TempDir() { std::filesystem::remove_all(p); }
  std::string file(const char* name) const { return (p / name).string(); }
};

}  // namespace

TEST_CASE("blob generator: counts, range, labels, determinism") {
  Dataset d = synth_blobs(3, 200, 4.0, 6.0, 42);
  CHECK(d.x.rows == 600);
  CHECK(d.x.cols == 2);
  CHECK(d.classes == 3);
  CHECK(d.y.size() == 600);
  CHECK(d.y == d.y_clean);
  int counts[3] = {0, 0, 0};
  for (int v : d.y) {
    REQUIRE(v >= 0);
    REQUIRE(v < 3);
    ++counts[v];
  }
  CHECK(counts[0] == 200);
  CHECK(counts[1] == 200);
  CHECK(counts[2] == 200);
  for (double v : d.x.a) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  Dataset d2 = synth_blobs(3, 200, 4.0, 6.0, 42);
  CHECK(d2.x.a == d.x.a);
  CHECK(d2.y == d.y);
  Dataset d3 = synth_blobs(3, 200, 4.0, 6.0, 43);
  CHECK(d3.x.a != d.x.a);
}

TEST_CASE("blob generator: rows are shuffled, classes cluster near their centers") {
  Dataset d = synth_blobs(3, 100, 4.0, 6.0, 7);
  // Shuffled: the label sequence is not three constant blocks.
  bool blocky = true;
  for (int i = 0; i < 100 && blocky; ++i)
    if (d.y[i] != d.y[0]) blocky = false;
  CHECK_FALSE(blocky);

  // Undo the [0,1] map (x01 = (raw + M) / (2M)) and compare against centers.
  const double M = 4.0 + 6.0;
  auto centers = blob_centers(3, 4.0);
  double worst = 0.0;
  for (int i = 0; i < d.x.rows; ++i) {
    const double rx = d.x.at(i, 0) * 2 * M - M;
    const double ry = d.x.at(i, 1) * 2 * M - M;
    const auto& c = centers[d.y[i]];
    worst = std::max(worst, std::hypot(rx - c.first, ry - c.second));
  }
  // Unit isotropic noise: essentially everything sits within 5 sigma.
  CHECK(worst < 5.0);
}

TEST_CASE("far cluster generator places points away from every blob center") {
  const int n = 150;
  Mat ood = synth_ood(n, 3, 4.0, 6.0, 12.0, 9);
  CHECK(ood.rows == n);
  const double M = 4.0 + 6.0;
  auto centers = blob_centers(3, 4.0);
  for (int i = 0; i < n; ++i) {
    const double rx = ood.at(i, 0) * 2 * M - M;
    const double ry = ood.at(i, 1) * 2 * M - M;
    double dmin = 1e300;
    for (const auto& c : centers)
      dmin = std::min(dmin, std::hypot(rx - c.first, ry - c.second));
    CHECK(dmin > 6.0);
  }
  CHECK(synth_ood(0, 3, 4.0, 6.0, 12.0, 9).rows == 0);
  Mat again = synth_ood(n, 3, 4.0, 6.0, 12.0, 9);
  CHECK(again.a == ood.a);
}

TEST_CASE("label noise: approximate rate, boundary band only, clean labels kept") {
  Dataset d = synth_blobs(3, 400, 4.0, 6.0, 17);
  Dataset noisy = d;
  const double p = 0.10;
  boundary_noise(noisy, 4.0, 6.0, p, 99);
  CHECK(noisy.y_clean == d.y);

  int flips = 0;
  const double M = 4.0 + 6.0;
  auto centers = blob_centers(3, 4.0);
  std::vector<double> gaps(d.x.rows);
  for (int i = 0; i < d.x.rows; ++i) {
    const double rx = d.x.at(i, 0) * 2 * M - M;
    const double ry = d.x.at(i, 1) * 2 * M - M;
    double d1 = 1e300, d2 = 1e300;
    for (const auto& c : centers) {
      const double dist = std::hypot(rx - c.first, ry - c.second);
      if (dist < d1) {
        d2 = d1;
        d1 = dist;
      } else {
        d2 = std::min(d2, dist);
      }
    }
    gaps[i] = d2 - d1;
  }
  const double band = quantile(gaps, 2 * p);
  for (int i = 0; i < d.x.rows; ++i) {
    if (noisy.y[i] != d.y[i]) {
      ++flips;
      // Flips happen only near the decision boundary.
      CHECK(gaps[i] <= band + 1e-9);
    }
  }
  const double rate = (double)flips / d.x.rows;
  CHECK(rate > 0.5 * p);
  CHECK(rate < 1.5 * p);

  // fraction 0 is a no-op.
  Dataset quiet = d;
  boundary_noise(quiet, 4.0, 6.0, 0.0, 99);
  CHECK(quiet.y == d.y);
}

TEST_CASE("additive interval construction clips at both ends") {
  Mat x(1, 3);
  x.at(0, 0) = 0.95;
  x.at(0, 1) = 0.5;
  x.at(0, 2) = 0.02;
  IvMat iv = make_interval_noise(x, 0.0, 0.08);
  CHECK(iv.lo.at(0, 0) == doctest::Approx(0.95));
  CHECK(iv.hi.at(0, 0) == doctest::Approx(1.0));  // 1.03 clipped
  CHECK(iv.hi.at(0, 1) == doctest::Approx(0.58));
  CHECK(iv.lo.at(0, 2) == doctest::Approx(0.02));

  IvMat noisier = make_interval_noise(x, 0.12, 0.16);
  for (size_t t = 0; t < noisier.lo.size(); ++t) {
    CHECK(noisier.lo.a[t] <= noisier.hi.a[t]);
    CHECK(noisier.lo.a[t] >= 0.0);
    CHECK(noisier.hi.a[t] <= 1.0);
  }

  IvMat same = make_interval_noise(x, 0.0, 0.0);
  CHECK(same.lo.a == x.a);
  CHECK(same.hi.a == x.a);

  CHECK_THROWS_AS(make_interval_noise(x, 0.2, 0.1), DataError);
}

TEST_CASE("hsv round trip is the identity within 1e-6") {
  Rng rng(61);
  for (int i = 0; i < 2000; ++i) {
    const double r = rng.uniform(), g = rng.uniform(), b = rng.uniform();
    double h, s, v, r2, g2, b2;
    rgb_to_hsv(r, g, b, h, s, v);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    hsv_to_rgb(h, s, v, r2, g2, b2);
    CHECK(r2 == doctest::Approx(r).epsilon(1e-6));
    CHECK(g2 == doctest::Approx(g).epsilon(1e-6));
    CHECK(b2 == doctest::Approx(b).epsilon(1e-6));
  }
}

TEST_CASE("brightness interval construction shifts V and preserves gray/hue") {
  // Gray pixel: saturation 0, so a V shift moves all channels equally.
  Mat x(1, 3);
  x.at(0, 0) = x.at(0, 1) = x.at(0, 2) = 0.2;
  IvMat iv = make_interval_brightness(x, 3, 0.3, 0.3);
  for (int c = 0; c < 3; ++c) {
    CHECK(iv.lo.at(0, c) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(iv.hi.at(0, c) == doctest::Approx(0.5).epsilon(1e-9));
  }

  // Zero shift: identity up to round-trip error.
  Rng rng(62);
  Mat img(4, 6);
  for (auto& v : img.a) v = rng.uniform();
  IvMat id = make_interval_brightness(img, 3, 0.0, 0.0);
  for (size_t t = 0; t < img.size(); ++t) {
    CHECK(id.lo.a[t] == doctest::Approx(img.a[t]).epsilon(1e-6));
    CHECK(id.hi.a[t] == doctest::Approx(img.a[t]).epsilon(1e-6));
  }

  // V = 0.9 with beta = 0.3 clips at 1: max channel of the bright pixel hits 1.
  Mat bright(1, 3);
  bright.at(0, 0) = 0.9;
  bright.at(0, 1) = 0.45;
  bright.at(0, 2) = 0.45;
  IvMat clipped = make_interval_brightness(bright, 3, 0.3, 0.3);
  CHECK(clipped.hi.at(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  // Hue is untouched: red stays the dominant channel, g/b stay equal.
  CHECK(clipped.hi.at(0, 1) == doctest::Approx(clipped.hi.at(0, 2)).epsilon(1e-9));
  CHECK(clipped.hi.at(0, 0) > clipped.hi.at(0, 1));

  // Channel-1 data falls back to a plain value shift.
  Mat gray(1, 2);
  gray.at(0, 0) = 0.8;
  gray.at(0, 1) = 0.1;
  IvMat g1 = make_interval_brightness(gray, 1, 0.1, 0.3);
  CHECK(g1.lo.at(0, 0) == doctest::Approx(0.9));
  CHECK(g1.hi.at(0, 0) == doctest::Approx(1.0));
  CHECK(g1.lo.at(0, 1) == doctest::Approx(0.2));
  CHECK(g1.hi.at(0, 1) == doctest::Approx(0.4));

  // Row length must be divisible by the channel count.
  Mat odd(1, 4);
  CHECK_THROWS_AS(make_interval_brightness(odd, 3, 0.0, 0.1), DataError);
}

TEST_CASE("idx image and label files round-trip") {
  TempDir tmp;
  Rng rng(63);
  ImageSet imgs;
  imgs.n = 10;
  imgs.h = 4;
  imgs.w = 5;
  imgs.x = Mat(10, 20);
  // Pixels on the byte lattice so the round trip is exact.
  for (auto& v : imgs.x.a) v = (double)(rng.below(256)) / 255.0;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) labels.push_back((int)rng.below(10));

  save_idx_images(tmp.file("img.idx"), imgs);
  save_idx_labels(tmp.file("lab.idx"), labels);
  ImageSet back = load_idx_images(tmp.file("img.idx"));
  std::vector<int> lback = load_idx_labels(tmp.file("lab.idx"));
  CHECK(back.n == 10);
  CHECK(back.h == 4);
  CHECK(back.w == 5);
  REQUIRE(back.x.size() == imgs.x.size());
  for (size_t t = 0; t < imgs.x.size(); ++t)
    CHECK(back.x.a[t] == doctest::Approx(imgs.x.a[t]).epsilon(1e-12));
  CHECK(lback == labels);
}

TEST_CASE("idx loader rejects malformed files") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("badmagic.idx"), std::ios::binary);
    const unsigned char bytes[] = {0x00, 0x00, 0x08, 0x99, 0, 0, 0, 1};
    f.write((const char*)bytes, sizeof bytes);
  }
  CHECK_THROWS_AS(load_idx_images(tmp.file("badmagic.idx")), DataError);
  CHECK_THROWS_AS(load_idx_labels(tmp.file("badmagic.idx")), DataError);

  {
    // Claims 5 images of 4x4 but carries only 3 bytes of pixels.
    std::ofstream f(tmp.file("trunc.idx"), std::ios::binary);
    const unsigned char bytes[] = {0x00, 0x00, 0x08, 0x03, 0, 0, 0, 5,
                                   0, 0, 0, 4, 0, 0, 0, 4, 7, 7, 7};
    f.write((const char*)bytes, sizeof bytes);
  }
  CHECK_THROWS_AS(load_idx_images(tmp.file("trunc.idx")), DataError);
  CHECK_THROWS_AS(load_idx_images(tmp.file("missing.idx")), DataError);
}

TEST_CASE("quantile interpolates linearly") {
  std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(v, 0.0) == doctest::Approx(1.0));
  CHECK(quantile(v, 1.0) == doctest::Approx(4.0));
  CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(v, 1.0 / 3.0) == doctest::Approx(2.0));
}
