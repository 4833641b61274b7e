#include "illumkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "illumkit/error.hpp"

namespace illumkit {

LinearImage::LinearImage(std::size_t width, std::size_t height,
                         std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width_ == 0 || height_ == 0)
    throw InputError("image dimensions must be at least 1x1");
  if (data_.size() != width_ * height_ * 3)
    throw InputError("image data size " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(width_) + "x" +
                     std::to_string(height_) + "x3");
  for (double v : data_) {
    if (!std::isfinite(v)) throw InputError("image contains non-finite value");
    if (v < 0.0) throw InputError("image contains negative value");
  }
}

LinearImage LinearImage::filled(std::size_t width, std::size_t height,
                                const Rgb& value) {
  std::vector<double> data(width * height * 3);
  for (std::size_t i = 0; i < width * height; ++i)
    std::copy(value.begin(), value.end(), data.begin() + 3 * i);
  return LinearImage(width, height, std::move(data));
}

std::vector<double> LinearImage::channel(std::size_t c) const {
  std::vector<double> out(pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = data_[3 * i + c];
  return out;
}

LinearImage LinearImage::scaled(double k) const {
  std::vector<double> out(data_);
  for (double& v : out) v *= k;
  return LinearImage(width_, height_, std::move(out));
}

namespace {

double norm(const Rgb& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

}  // namespace

Illuminant::Illuminant(const Rgb& rgb) : rgb_(rgb) {
  for (double v : rgb_) {
    if (!std::isfinite(v)) throw InvalidIlluminantError("non-finite illuminant");
    if (v < 0.0)
      throw InvalidIlluminantError("illuminant has a negative component");
  }
  if (std::abs(norm(rgb_) - 1.0) > 1e-9)
    throw InvalidIlluminantError("illuminant is not unit length");
}

Illuminant Illuminant::neutral() {
  const double v = 1.0 / std::numbers::sqrt3;
  return Illuminant({v, v, v});
}

Illuminant normalize_illuminant(const Rgb& raw) {
  bool any_positive = false;
  for (double v : raw) {
    if (!std::isfinite(v))
      throw InvalidIlluminantError("illuminant has a non-finite component");
    if (v < 0.0)
      throw InvalidIlluminantError("illuminant has a negative component");
    any_positive |= v > 0.0;
  }
  if (!any_positive) throw InvalidIlluminantError("zero illuminant");
  const double n = norm(raw);
  return Illuminant({raw[0] / n, raw[1] / n, raw[2] / n});
}

double angular_error(const Rgb& estimate, const Rgb& ground_truth) {
  const double ne = norm(estimate);
  const double ng = norm(ground_truth);
  if (!(ne > 0.0) || !(ng > 0.0) || !std::isfinite(ne) || !std::isfinite(ng))
    throw InvalidIlluminantError("angular error of a zero-norm vector");
  double dot = 0.0;
  for (int i = 0; i < 3; ++i) dot += estimate[i] * ground_truth[i];
  const double cosine = std::clamp(dot / (ne * ng), -1.0, 1.0);
  return std::acos(cosine) * 180.0 / std::numbers::pi;
}

double angular_error(const Illuminant& estimate,
                     const Illuminant& ground_truth) {
  return angular_error(estimate.rgb(), ground_truth.rgb());
}

void validate_features(const FeatureVector& fv) {
  if (fv.values.empty()) throw InputError("empty feature vector");
  for (double v : fv.values)
    if (!std::isfinite(v)) throw InputError("non-finite feature value");
}

std::size_t common_dimension(std::span<const LabeledSample> samples) {
  if (samples.empty()) throw InputError("no samples");
  const std::size_t d = samples.front().features.dim();
  const std::string& tag = samples.front().features.source_tag;
  for (const auto& s : samples) {
    validate_features(s.features);
    if (s.features.dim() != d)
      throw InputError("feature dimension mismatch for '" + s.image_id + "'");
    if (s.features.source_tag != tag)
      throw InputError("feature source tag mismatch for '" + s.image_id + "'");
  }
  return d;
}

}  // namespace illumkit
