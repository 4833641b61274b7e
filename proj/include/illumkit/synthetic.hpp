#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "illumkit/core.hpp"
#include "illumkit/rng.hpp"

namespace illumkit {

using Spectrum = std::vector<double>;

// Discretized Lambertian image formation: wavelengths (nm), light SPD,
// three sensor curves and a palette of surface reflectances, all sampled on
// the same grid.
struct SpectralConfig {
  std::vector<double> wavelengths;
  Spectrum illuminant_spd;
  std::array<Spectrum, 3> sensors;
  std::vector<Spectrum> reflectances;

  // Throws InputError on length mismatch, negative/non-finite values or
  // reflectances outside [0, 1].
  void validate() const;
};

// 400-700 nm in 10 nm steps.
std::vector<double> default_wavelengths();

// Rectangle-rule weights: spacing to the next sample (last reuses the
// previous spacing; a single sample gets weight 1).
std::vector<double> wavelength_weights(const std::vector<double>& wavelengths);

// Planck's law at temperature_k, scaled so the peak over the grid is 1.
Spectrum blackbody_spd(const std::vector<double>& wavelengths,
                       double temperature_k);

// Broad Gaussian-shaped R, G, B responses (peaks 600/540/450 nm).
std::array<Spectrum, 3> gaussian_sensors(
    const std::vector<double>& wavelengths);

// Delta-like sensors: each channel responds at the single grid sample
// nearest its center with weight 1/dlambda, so a pixel equals
// I(lambda_c) * R(lambda_c).
std::array<Spectrum, 3> narrow_band_sensors(
    const std::vector<double>& wavelengths,
    const std::array<double, 3>& centers = {600.0, 540.0, 450.0});

// Smooth random reflectances in [0.02, 0.98] built from Gaussian bumps.
std::vector<Spectrum> random_reflectances(
    std::size_t count, const std::vector<double>& wavelengths, Rng& rng);

// Grid of reflectance indices, row-major.
struct MondrianLayout {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> indices;
};

struct Rendering {
  LinearImage image;
  Illuminant illuminant;  // normalized white-reflector response
  Rgb white_response;     // unnormalized sum_l I S_c dlambda
};

// Sensor response to a perfect white reflector under the configured light.
// Throws DegenerateConfigError when any channel is zero.
Rgb white_response(const SpectralConfig& config);

// Renders a flat-patch scene; every patch is patch_size x patch_size pixels.
Rendering render_mondrian(const SpectralConfig& config,
                          const MondrianLayout& layout,
                          std::size_t patch_size);

struct DatasetConfig {
  SpectralConfig spectral;  // illuminant_spd is replaced per scene
  double min_temperature = 2500.0;
  double max_temperature = 9500.0;
  std::size_t grid = 8;        // patches per side
  std::size_t patch_size = 8;  // pixels per patch side
  // Each scene draws this many distinct reflectances from the palette, so
  // scene averages are generally not gray.
  std::size_t colors_per_scene = 6;
};

// Default palette of 32 reflectances (fixed seed), broad sensors.
DatasetConfig default_dataset_config(bool narrow_band = false);

struct SyntheticScene {
  std::string image_id;
  LinearImage image;
  Illuminant illuminant;
  double temperature;
};

// Deterministic in rng_seed; scene k uses a stream derived from (seed, k).
std::vector<SyntheticScene> render_dataset(const DatasetConfig& config,
                                           std::size_t n_scenes,
                                           std::uint64_t rng_seed);

}  // namespace illumkit
