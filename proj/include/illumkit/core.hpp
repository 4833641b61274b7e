#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace illumkit {

using Rgb = std::array<double, 3>;

// H x W x 3 linear-light image, stored row-major with interleaved channels.
// Values are finite and non-negative; the constructor enforces this.
class LinearImage {
 public:
  LinearImage(std::size_t width, std::size_t height, std::vector<double> data);

  // Constant image.
  static LinearImage filled(std::size_t width, std::size_t height,
                            const Rgb& value);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return width_ * height_; }

  double at(std::size_t x, std::size_t y, std::size_t c) const {
    return data_[(y * width_ + x) * 3 + c];
  }
  Rgb pixel(std::size_t x, std::size_t y) const {
    const double* p = &data_[(y * width_ + x) * 3];
    return {p[0], p[1], p[2]};
  }

  std::span<const double> data() const { return data_; }

  // Copies channel c into a dense width*height plane.
  std::vector<double> channel(std::size_t c) const;

  // Every value multiplied by k (k >= 0).
  LinearImage scaled(double k) const;

  bool operator==(const LinearImage&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> data_;
};

// Unit-norm, non-negative RGB illuminant. Construct through
// normalize_illuminant() unless the vector is already unit length.
class Illuminant {
 public:
  // Throws InvalidIlluminantError unless rgb has norm 1 within 1e-9 and no
  // negative component.
  explicit Illuminant(const Rgb& rgb);

  static Illuminant neutral();

  const Rgb& rgb() const { return rgb_; }
  double operator[](std::size_t i) const { return rgb_[i]; }

  bool operator==(const Illuminant&) const = default;

 private:
  Rgb rgb_;
};

// raw / ||raw||. Requires finite components and at least one strictly
// positive component.
Illuminant normalize_illuminant(const Rgb& raw);

// Angle in degrees between two illuminants; the cosine is clamped to [-1, 1].
double angular_error(const Illuminant& estimate,
                     const Illuminant& ground_truth);

// Same metric on raw vectors; throws InvalidIlluminantError on a zero norm.
double angular_error(const Rgb& estimate, const Rgb& ground_truth);

struct FeatureVector {
  std::vector<double> values;
  std::string source_tag;

  std::size_t dim() const { return values.size(); }
  bool operator==(const FeatureVector&) const = default;
};

// Throws InputError when empty or non-finite.
void validate_features(const FeatureVector& fv);

struct LabeledSample {
  FeatureVector features;
  Illuminant target;
  std::string image_id;
};

// Checks that all samples share dimension and source tag. Returns d.
std::size_t common_dimension(std::span<const LabeledSample> samples);

}  // namespace illumkit
