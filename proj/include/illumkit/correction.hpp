#pragma once

#include "illumkit/core.hpp"

namespace illumkit {

// Per-channel gains of a von Kries (diagonal) transform.
class DiagonalTransform {
 public:
  // Throws InputError unless every gain is finite and strictly positive.
  explicit DiagonalTransform(const Rgb& gains);

  // Maps `illuminant` onto the equal-energy white (1/sqrt3, 1/sqrt3, 1/sqrt3).
  // Throws DegenerateIlluminantError if a component is zero.
  static DiagonalTransform correcting(const Illuminant& illuminant);
  // Inverse of correcting(): equal-energy white onto `illuminant`.
  static DiagonalTransform relighting(const Illuminant& illuminant);

  const Rgb& gains() const { return gains_; }
  LinearImage apply(const LinearImage& image) const;

 private:
  Rgb gains_;
};

// out_c = in_c * (1/sqrt3) / illuminant_c. No clipping is applied.
LinearImage correct_image(const LinearImage& image,
                          const Illuminant& illuminant);

// out_c = in_c * sqrt3 * illuminant_c.
LinearImage apply_illuminant(const LinearImage& image,
                             const Illuminant& illuminant);

}  // namespace illumkit
