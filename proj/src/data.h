#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mat.h"

namespace creinn {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Dataset {
  Mat x;                     // N x D, all entries in [0, 1]
  std::vector<int> y;        // training labels (noisy after boundary_noise)
  std::vector<int> y_clean;  // labels before any noise
  int classes = 0;
};

// Raw-space centers of the Gaussian blobs: class k sits at
// separation * (cos, sin)(2 pi k / classes), unit isotropic noise.
std::vector<std::pair<double, double>> blob_centers(int classes,
                                                    double separation);

// Raw coordinates are mapped into [0,1]^2 by x -> clip((x + M) / (2M), 0, 1)
// with M = separation + margin; margin controls how much headroom the map
// leaves around the clusters. Rows come out shuffled.
Dataset synth_blobs(int classes, int n_per_class, double separation,
                    double margin, uint64_t seed);

// Out-of-distribution cluster between class directions (angle pi/classes) at
// raw radius separation + offset, mapped with the same M as the matching
// blobs call.
Mat synth_ood(int n, int classes, double separation, double margin,
              double offset, uint64_t seed);

// Flips roughly `fraction` of the labels, all chosen inside the decision-
// boundary band: samples whose raw-space margin (distance gap between the two
// nearest centers) is at most the 2*fraction-quantile flip to the
// second-nearest class with probability 1/2. Updates d.y, keeps d.y_clean.
void boundary_noise(Dataset& d, double separation, double margin,
                    double fraction, uint64_t seed);

// Additive interval construction: [clip(x + mu1), clip(x + mu2)], mu1 <= mu2.
IvMat make_interval_noise(const Mat& x, double mu1, double mu2);

// Brightness interval construction. channels == 1: plain value shift with
// clipping. channels == 3 (interleaved rgb in [0,1]): shift V in HSV space by
// beta and convert back, which scales a pixel without changing its hue.
IvMat make_interval_brightness(const Mat& x, int channels, double beta1,
                               double beta2);

// h, s, v all in [0, 1].
void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v);
void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b);

// IDX files (big-endian). Images: magic 0x00000803, dims n x h x w, one byte
// per pixel, scaled to [0,1] on load. Labels: magic 0x00000801, one byte each.
// Malformed headers or truncated payloads raise DataError.
struct ImageSet {
  int n = 0, h = 0, w = 0;
  Mat x;  // n x (h*w), values in [0, 1]
};
ImageSet load_idx_images(const std::string& path);
std::vector<int> load_idx_labels(const std::string& path);
void save_idx_images(const std::string& path, const ImageSet& imgs);
void save_idx_labels(const std::string& path, const std::vector<int>& labels);

// Linear-interpolation quantile of a copy of `v` (q in [0, 1]).
double quantile(std::vector<double> v, double q);

}  // namespace creinn
