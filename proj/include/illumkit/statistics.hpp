#pragma once

#include <limits>

#include "illumkit/core.hpp"

namespace illumkit {

// Parameters of the unified low-level statistics estimator: derivative order,
// Minkowski pooling order and Gaussian pre-smoothing scale.
struct MinkowskiParams {
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();
  static constexpr double kDefaultP = 6.0;

  int derivative_order = 0;  // 0, 1 or 2
  double minkowski_p = 1.0;  // >= 1, or kInfinity for max pooling
  double gaussian_sigma = 0.0;

  // Throws InputError on out-of-range values.
  void validate() const;
};

// Smooth each channel with G_sigma, take the n-th order derivative magnitude,
// pool with the Minkowski p-norm (mean convention) and normalize to unit
// length.
Illuminant estimate_statistic(const LinearImage& image,
                              const MinkowskiParams& params);

Illuminant gray_world(const LinearImage& image);
Illuminant white_patch(const LinearImage& image);
Illuminant shades_of_gray(const LinearImage& image,
                          double p = MinkowskiParams::kDefaultP);
Illuminant general_gray_world(const LinearImage& image,
                              double p = MinkowskiParams::kDefaultP,
                              double sigma = 1.0);
Illuminant gray_edge_1(const LinearImage& image,
                       double p = MinkowskiParams::kDefaultP,
                       double sigma = 1.0);
Illuminant gray_edge_2(const LinearImage& image,
                       double p = MinkowskiParams::kDefaultP,
                       double sigma = 1.0);

namespace detail {

// Separable Gaussian blur of a single width x height plane. Kernel half-width
// is ceil(3 sigma); borders are mirrored (half-sample symmetric).
std::vector<double> gaussian_blur(const std::vector<double>& plane,
                                  std::size_t width, std::size_t height,
                                  double sigma);

// Per-pixel derivative magnitude of the given order (0 returns |plane|).
std::vector<double> derivative_magnitude(const std::vector<double>& plane,
                                         std::size_t width, std::size_t height,
                                         int order);

// (mean |v|^p)^(1/p), or max |v| when p is infinite.
double minkowski_mean(const std::vector<double>& values, double p);

}  // namespace detail

}  // namespace illumkit
