#include "illumkit/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "illumkit/error.hpp"

namespace illumkit {

void MinkowskiParams::validate() const {
  if (derivative_order < 0 || derivative_order > 2)
    throw InputError("derivative order must be 0, 1 or 2");
  if (!(minkowski_p >= 1.0) || std::isnan(minkowski_p))
    throw InputError("Minkowski p must be >= 1 or infinity");
  if (!(gaussian_sigma >= 0.0) || !std::isfinite(gaussian_sigma))
    throw InputError("Gaussian sigma must be finite and >= 0");
}

namespace detail {
namespace {

// Half-sample symmetric reflection: ... c b a | a b c ... | c b a ...
std::size_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < n ? i : period - 1 - i);
}

std::vector<double> gaussian_kernel(double sigma) {
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * double(i * i) / (sigma * sigma));
    k[i + radius] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

// Central difference along x (axis 0) or y (axis 1), mirrored borders.
std::vector<double> central_diff(const std::vector<double>& plane,
                                 std::size_t width, std::size_t height,
                                 int axis) {
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);
  std::vector<double> out(plane.size());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double next, prev;
      if (axis == 0) {
        next = plane[y * w + reflect(x + 1, w)];
        prev = plane[y * w + reflect(x - 1, w)];
      } else {
        next = plane[reflect(y + 1, h) * w + x];
        prev = plane[reflect(y - 1, h) * w + x];
      }
      out[y * w + x] = 0.5 * (next - prev);
    }
  }
  return out;
}

}  // namespace

std::vector<double> gaussian_blur(const std::vector<double>& plane,
                                  std::size_t width, std::size_t height,
                                  double sigma) {
  if (sigma <= 0.0) return plane;
  const std::vector<double> k = gaussian_kernel(sigma);
  const auto radius = static_cast<std::ptrdiff_t>(k.size() / 2);
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);

  std::vector<double> tmp(plane.size());
  for (std::ptrdiff_t y = 0; y < h; ++y)
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t t = -radius; t <= radius; ++t)
        acc += k[t + radius] * plane[y * w + reflect(x + t, w)];
      tmp[y * w + x] = acc;
    }
  std::vector<double> out(plane.size());
  for (std::ptrdiff_t y = 0; y < h; ++y)
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t t = -radius; t <= radius; ++t)
        acc += k[t + radius] * tmp[reflect(y + t, h) * w + x];
      out[y * w + x] = acc;
    }
  return out;
}

std::vector<double> derivative_magnitude(const std::vector<double>& plane,
                                         std::size_t width, std::size_t height,
                                         int order) {
  std::vector<double> out(plane.size());
  switch (order) {
    case 0:
      for (std::size_t i = 0; i < plane.size(); ++i)
        out[i] = std::abs(plane[i]);
      break;
    case 1: {
      const auto dx = central_diff(plane, width, height, 0);
      const auto dy = central_diff(plane, width, height, 1);
      for (std::size_t i = 0; i < plane.size(); ++i)
        out[i] = std::sqrt(dx[i] * dx[i] + dy[i] * dy[i]);
      break;
    }
    case 2: {
      const auto dx = central_diff(plane, width, height, 0);
      const auto dy = central_diff(plane, width, height, 1);
      const auto dxx = central_diff(dx, width, height, 0);
      const auto dyy = central_diff(dy, width, height, 1);
      const auto dxy = central_diff(dx, width, height, 1);
      // Frobenius norm of the symmetric Hessian.
      for (std::size_t i = 0; i < plane.size(); ++i)
        out[i] = std::sqrt(dxx[i] * dxx[i] + 2.0 * dxy[i] * dxy[i] +
                           dyy[i] * dyy[i]);
      break;
    }
    default:
      throw InputError("derivative order must be 0, 1 or 2");
  }
  return out;
}

double minkowski_mean(const std::vector<double>& values, double p) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  if (std::isinf(p) || peak == 0.0) return peak;
  // Pool relative to the peak so that large p cannot overflow.
  double acc = 0.0;
  for (double v : values) acc += std::pow(std::abs(v) / peak, p);
  return peak * std::pow(acc / double(values.size()), 1.0 / p);
}

}  // namespace detail

Illuminant estimate_statistic(const LinearImage& image,
                              const MinkowskiParams& params) {
  params.validate();
  Rgb raw{};
  for (std::size_t c = 0; c < 3; ++c) {
    auto plane = detail::gaussian_blur(image.channel(c), image.width(),
                                       image.height(), params.gaussian_sigma);
    plane = detail::derivative_magnitude(plane, image.width(), image.height(),
                                         params.derivative_order);
    raw[c] = detail::minkowski_mean(plane, params.minkowski_p);
  }
  return normalize_illuminant(raw);
}

Illuminant gray_world(const LinearImage& image) {
  return estimate_statistic(image, {0, 1.0, 0.0});
}

Illuminant white_patch(const LinearImage& image) {
  return estimate_statistic(image, {0, MinkowskiParams::kInfinity, 0.0});
}

Illuminant shades_of_gray(const LinearImage& image, double p) {
  return estimate_statistic(image, {0, p, 0.0});
}

Illuminant general_gray_world(const LinearImage& image, double p,
                              double sigma) {
  return estimate_statistic(image, {0, p, sigma});
}

Illuminant gray_edge_1(const LinearImage& image, double p, double sigma) {
  return estimate_statistic(image, {1, p, sigma});
}

Illuminant gray_edge_2(const LinearImage& image, double p, double sigma) {
  return estimate_statistic(image, {2, p, sigma});
}

}  // namespace illumkit
