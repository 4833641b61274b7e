#include "illumkit/correction.hpp"

#include <cmath>
#include <numbers>

#include "illumkit/error.hpp"

namespace illumkit {

DiagonalTransform::DiagonalTransform(const Rgb& gains) : gains_(gains) {
  for (double g : gains_)
    if (!(g > 0.0) || !std::isfinite(g))
      throw InputError("diagonal gains must be finite and positive");
}

DiagonalTransform DiagonalTransform::correcting(const Illuminant& illuminant) {
  Rgb gains;
  for (int c = 0; c < 3; ++c) {
    if (!(illuminant[c] > 0.0))
      throw DegenerateIlluminantError(
          "cannot correct with an illuminant that has a zero component");
    gains[c] = (1.0 / std::numbers::sqrt3) / illuminant[c];
  }
  return DiagonalTransform(gains);
}

DiagonalTransform DiagonalTransform::relighting(const Illuminant& illuminant) {
  Rgb gains;
  for (int c = 0; c < 3; ++c) gains[c] = std::numbers::sqrt3 * illuminant[c];
  return DiagonalTransform(gains);
}

LinearImage DiagonalTransform::apply(const LinearImage& image) const {
  const auto src = image.data();
  std::vector<double> out(src.begin(), src.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= gains_[i % 3];
  return LinearImage(image.width(), image.height(), std::move(out));
}

LinearImage correct_image(const LinearImage& image,
                          const Illuminant& illuminant) {
  return DiagonalTransform::correcting(illuminant).apply(image);
}

LinearImage apply_illuminant(const LinearImage& image,
                             const Illuminant& illuminant) {
  // A zero component is a valid light; it simply blanks that channel.
  Rgb gains;
  for (int c = 0; c < 3; ++c) gains[c] = std::numbers::sqrt3 * illuminant[c];
  const auto src = image.data();
  std::vector<double> out(src.begin(), src.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= gains[i % 3];
  return LinearImage(image.width(), image.height(), std::move(out));
}

}  // namespace illumkit
