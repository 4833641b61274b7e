#include "illumkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "illumkit/error.hpp"

namespace illumkit {

void SpectralConfig::validate() const {
  const std::size_t n = wavelengths.size();
  if (n == 0) throw InputError("empty wavelength grid");
  for (std::size_t i = 1; i < n; ++i)
    if (!(wavelengths[i] > wavelengths[i - 1]))
      throw InputError("wavelengths must be strictly increasing");
  auto check = [n](const Spectrum& s, const char* what, double hi) {
    if (s.size() != n)
      throw InputError(std::string(what) + " length does not match grid");
    for (double v : s)
      if (!std::isfinite(v) || v < 0.0 || v > hi)
        throw InputError(std::string(what) + " value out of range");
  };
  const double inf = std::numeric_limits<double>::infinity();
  check(illuminant_spd, "illuminant SPD", inf);
  for (const auto& s : sensors) check(s, "sensor response", inf);
  for (const auto& r : reflectances) check(r, "reflectance", 1.0);
}

std::vector<double> default_wavelengths() {
  std::vector<double> out;
  for (int l = 400; l <= 700; l += 10) out.push_back(l);
  return out;
}

std::vector<double> wavelength_weights(const std::vector<double>& wl) {
  std::vector<double> w(wl.size(), 1.0);
  for (std::size_t i = 0; i + 1 < wl.size(); ++i) w[i] = wl[i + 1] - wl[i];
  if (wl.size() > 1) w.back() = wl[wl.size() - 1] - wl[wl.size() - 2];
  return w;
}

Spectrum blackbody_spd(const std::vector<double>& wavelengths,
                       double temperature_k) {
  if (!(temperature_k > 0.0)) throw InputError("temperature must be positive");
  constexpr double h = 6.62607015e-34;
  constexpr double c = 2.99792458e8;
  constexpr double k = 1.380649e-23;
  Spectrum spd(wavelengths.size());
  for (std::size_t i = 0; i < spd.size(); ++i) {
    const double l = wavelengths[i] * 1e-9;
    spd[i] = 2.0 * h * c * c / std::pow(l, 5) /
             std::expm1(h * c / (l * k * temperature_k));
  }
  const double peak = *std::max_element(spd.begin(), spd.end());
  for (double& v : spd) v /= peak;
  return spd;
}

std::array<Spectrum, 3> gaussian_sensors(
    const std::vector<double>& wavelengths) {
  constexpr std::array<double, 3> centers = {600.0, 540.0, 450.0};
  constexpr std::array<double, 3> widths = {35.0, 35.0, 30.0};
  std::array<Spectrum, 3> s;
  for (int c = 0; c < 3; ++c) {
    s[c].resize(wavelengths.size());
    for (std::size_t i = 0; i < wavelengths.size(); ++i) {
      const double z = (wavelengths[i] - centers[c]) / widths[c];
      s[c][i] = std::exp(-0.5 * z * z);
    }
  }
  return s;
}

std::array<Spectrum, 3> narrow_band_sensors(
    const std::vector<double>& wavelengths,
    const std::array<double, 3>& centers) {
  if (wavelengths.empty()) throw InputError("empty wavelength grid");
  const auto weights = wavelength_weights(wavelengths);
  std::array<Spectrum, 3> s;
  for (int c = 0; c < 3; ++c) {
    s[c].assign(wavelengths.size(), 0.0);
    std::size_t best = 0;
    for (std::size_t i = 1; i < wavelengths.size(); ++i)
      if (std::abs(wavelengths[i] - centers[c]) <
          std::abs(wavelengths[best] - centers[c]))
        best = i;
    s[c][best] = 1.0 / weights[best];
  }
  return s;
}

std::vector<Spectrum> random_reflectances(
    std::size_t count, const std::vector<double>& wavelengths, Rng& rng) {
  std::vector<Spectrum> out;
  const double lo = wavelengths.front();
  const double hi = wavelengths.back();
  for (std::size_t n = 0; n < count; ++n) {
    Spectrum r(wavelengths.size(), rng.uniform(0.02, 0.3));
    const auto bumps = 1 + rng.below(3);
    for (std::uint64_t b = 0; b < bumps; ++b) {
      const double center = rng.uniform(lo, hi);
      const double width = rng.uniform(20.0, 80.0);
      const double height = rng.uniform(0.1, 0.8);
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double z = (wavelengths[i] - center) / width;
        r[i] += height * std::exp(-0.5 * z * z);
      }
    }
    for (double& v : r) v = std::clamp(v, 0.02, 0.98);
    out.push_back(std::move(r));
  }
  return out;
}

Rgb white_response(const SpectralConfig& config) {
  const auto w = wavelength_weights(config.wavelengths);
  Rgb out{};
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < w.size(); ++i)
      out[c] += config.illuminant_spd[i] * config.sensors[c][i] * w[i];
  for (double v : out)
    if (!(v > 0.0))
      throw DegenerateConfigError(
          "illuminant produces zero response in a sensor channel");
  return out;
}

Rendering render_mondrian(const SpectralConfig& config,
                          const MondrianLayout& layout,
                          std::size_t patch_size) {
  config.validate();
  if (layout.rows == 0 || layout.cols == 0 || patch_size == 0)
    throw InputError("empty Mondrian layout");
  if (layout.indices.size() != layout.rows * layout.cols)
    throw InputError("layout size does not match rows x cols");
  for (std::size_t idx : layout.indices)
    if (idx >= config.reflectances.size())
      throw InputError("layout references a missing reflectance");

  const Rgb white = white_response(config);
  const auto w = wavelength_weights(config.wavelengths);

  // Colour of every palette entry under this light.
  std::vector<Rgb> colors(config.reflectances.size());
  for (std::size_t k = 0; k < colors.size(); ++k)
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i)
        acc += config.illuminant_spd[i] * config.sensors[c][i] *
               config.reflectances[k][i] * w[i];
      colors[k][c] = acc;
    }

  const std::size_t width = layout.cols * patch_size;
  const std::size_t height = layout.rows * patch_size;
  std::vector<double> data(width * height * 3);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) {
      const Rgb& col =
          colors[layout.indices[(y / patch_size) * layout.cols +
                                x / patch_size]];
      std::copy(col.begin(), col.end(), data.begin() + 3 * (y * width + x));
    }
  return {LinearImage(width, height, std::move(data)),
          normalize_illuminant(white), white};
}

DatasetConfig default_dataset_config(bool narrow_band) {
  DatasetConfig cfg;
  auto& s = cfg.spectral;
  s.wavelengths = default_wavelengths();
  s.illuminant_spd = blackbody_spd(s.wavelengths, 6500.0);
  s.sensors = narrow_band ? narrow_band_sensors(s.wavelengths)
                          : gaussian_sensors(s.wavelengths);
  Rng palette_rng(0x5eedf00dULL);
  s.reflectances = random_reflectances(32, s.wavelengths, palette_rng);
  return cfg;
}

std::vector<SyntheticScene> render_dataset(const DatasetConfig& config,
                                           std::size_t n_scenes,
                                           std::uint64_t rng_seed) {
  if (n_scenes == 0) throw InputError("n_scenes must be >= 1");
  if (config.spectral.reflectances.empty())
    throw InputError("empty reflectance palette");
  if (!(config.min_temperature > 0.0) ||
      config.max_temperature < config.min_temperature)
    throw InputError("invalid temperature range");
  const std::size_t palette = config.spectral.reflectances.size();
  const std::size_t colors = std::clamp<std::size_t>(config.colors_per_scene,
                                                     1, palette);

  const Rng root(rng_seed);
  std::vector<SyntheticScene> scenes;
  scenes.reserve(n_scenes);
  for (std::size_t k = 0; k < n_scenes; ++k) {
    Rng rng = root.split(k);
    const double t =
        rng.uniform(config.min_temperature, config.max_temperature);

    std::vector<std::size_t> order(palette);
    for (std::size_t i = 0; i < palette; ++i) order[i] = i;
    rng.shuffle(order);
    order.resize(colors);

    MondrianLayout layout{config.grid, config.grid, {}};
    layout.indices.resize(config.grid * config.grid);
    for (auto& idx : layout.indices) idx = order[rng.below(colors)];

    SpectralConfig spectral = config.spectral;
    spectral.illuminant_spd = blackbody_spd(spectral.wavelengths, t);
    Rendering r = render_mondrian(spectral, layout, config.patch_size);

    char id[32];
    std::snprintf(id, sizeof id, "scene_%05zu", k);
    scenes.push_back({id, std::move(r.image), r.illuminant, t});
  }
  return scenes;
}

}  // namespace illumkit
