#include <cmath>

#include "doctest.h"
#include "illumkit/correction.hpp"
#include "illumkit/error.hpp"
#include "illumkit/statistics.hpp"
#include "illumkit/synthetic.hpp"
#include "support.hpp"

using namespace illumkit;

namespace {

SpectralConfig broad_config(double temperature) {
  SpectralConfig s;
  s.wavelengths = default_wavelengths();
  s.illuminant_spd = blackbody_spd(s.wavelengths, temperature);
  s.sensors = gaussian_sensors(s.wavelengths);
  return s;
}

double direct_response(const SpectralConfig& s, const Spectrum& r, int c) {
  double acc = 0;
  for (std::size_t i = 0; i < s.wavelengths.size(); ++i) {
    const double dl = i + 1 < s.wavelengths.size()
                          ? s.wavelengths[i + 1] - s.wavelengths[i]
                          : s.wavelengths[i] - s.wavelengths[i - 1];
    acc += s.illuminant_spd[i] * s.sensors[c][i] * r[i] * dl;
  }
  return acc;
}

}  // namespace

TEST_SUITE("synthetic") {
  TEST_CASE("rendering matches the discretized image formation sum") {
    Rng rng(61);
    SpectralConfig s = broad_config(4000);
    s.reflectances = random_reflectances(5, s.wavelengths, rng);
    const MondrianLayout layout{2, 3, {0, 1, 2, 3, 4, 0}};
    const Rendering r = render_mondrian(s, layout, 4);
    CHECK(r.image.width() == 12);
    CHECK(r.image.height() == 8);
    for (std::size_t py = 0; py < 2; ++py)
      for (std::size_t px = 0; px < 3; ++px)
        for (int c = 0; c < 3; ++c) {
          const auto& refl = s.reflectances[layout.indices[py * 3 + px]];
          CHECK(r.image.at(px * 4 + 3, py * 4 + 1, c) ==
                doctest::Approx(direct_response(s, refl, c)).epsilon(1e-12));
        }
    const Spectrum white(s.wavelengths.size(), 1.0);
    Rgb w;
    for (int c = 0; c < 3; ++c) w[c] = direct_response(s, white, c);
    CHECK(angular_error(r.illuminant.rgb(), w) < 1e-9);
  }

  TEST_CASE("blackbody spectra") {
    const auto wl = default_wavelengths();
    CHECK(wl.size() == 31);
    for (double t : {2500.0, 6500.0, 9500.0}) {
      const auto spd = blackbody_spd(wl, t);
      CHECK(*std::max_element(spd.begin(), spd.end()) == 1.0);
    }
    // Warm light is red-heavy, cool light blue-heavy.
    const auto warm = blackbody_spd(wl, 2500), cool = blackbody_spd(wl, 9500);
    CHECK(warm.back() > warm.front());
    CHECK(cool.front() > cool.back());
    // Ratio against Planck's law evaluated directly.
    const double h = 6.62607015e-34, c = 2.99792458e8, k = 1.380649e-23;
    auto planck = [&](double nm, double T) {
      const double l = nm * 1e-9;
      return 1 / std::pow(l, 5) / (std::exp(h * c / (l * k * T)) - 1);
    };
    CHECK(warm[3] / warm[20] ==
          doctest::Approx(planck(wl[3], 2500) / planck(wl[20], 2500))
              .epsilon(1e-9));
  }

  TEST_CASE("gray world is exact on complementary-pair scenes") {
    Rng rng(62);
    for (int k = 0; k < 10; ++k) {
      SpectralConfig s = broad_config(rng.uniform(2500, 9500));
      const auto base = random_reflectances(4, s.wavelengths, rng);
      for (const auto& r : base) {
        Spectrum comp(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) comp[i] = 1.0 - r[i];
        s.reflectances.push_back(r);
        s.reflectances.push_back(comp);
      }
      // Each reflectance once: the scene average is the flat 0.5 spectrum.
      const MondrianLayout layout{2, 4, {0, 1, 2, 3, 4, 5, 6, 7}};
      const Rendering r = render_mondrian(s, layout, 3);
      CHECK(angular_error(gray_world(r.image), r.illuminant) < 1e-6);
    }
  }

  TEST_CASE("white patch is exact with a perfect white reflector") {
    Rng rng(63);
    for (int k = 0; k < 10; ++k) {
      SpectralConfig s = broad_config(rng.uniform(2500, 9500));
      s.reflectances = random_reflectances(6, s.wavelengths, rng);
      s.reflectances.push_back(Spectrum(s.wavelengths.size(), 1.0));
      MondrianLayout layout{3, 3, {0, 1, 2, 3, 4, 5, 6, 0, 1}};
      const Rendering r = render_mondrian(s, layout, 2);
      CHECK(angular_error(white_patch(r.image), r.illuminant) < 1e-6);
    }
  }

  TEST_CASE("narrow-band renderer round trip") {
    Rng rng(64);
    SpectralConfig canon;
    canon.wavelengths = default_wavelengths();
    canon.illuminant_spd.assign(canon.wavelengths.size(), 1.0);
    canon.sensors = narrow_band_sensors(canon.wavelengths);
    canon.reflectances = random_reflectances(8, canon.wavelengths, rng);
    const MondrianLayout layout{4, 4, {0, 1, 2, 3, 4, 5, 6, 7,
                                       7, 6, 5, 4, 3, 2, 1, 0}};
    const Rendering ref = render_mondrian(canon, layout, 2);
    CHECK(angular_error(ref.illuminant, Illuminant::neutral()) < 1e-9);
    const double ref_norm = std::hypot(ref.white_response[0],
                                       ref.white_response[1],
                                       ref.white_response[2]);
    for (int k = 0; k < 10; ++k) {
      SpectralConfig lit = canon;
      lit.illuminant_spd =
          blackbody_spd(canon.wavelengths, rng.uniform(2500, 9500));
      const Rendering r = render_mondrian(lit, layout, 2);
      const double norm = std::hypot(r.white_response[0], r.white_response[1],
                                     r.white_response[2]);
      const auto corrected = correct_image(r.image, r.illuminant);
      const auto relit = apply_illuminant(ref.image, r.illuminant);
      for (std::size_t i = 0; i < corrected.data().size(); ++i) {
        CHECK(std::abs(corrected.data()[i] -
                       ref.image.data()[i] * norm / ref_norm) <= 1e-9);
        CHECK(std::abs(relit.data()[i] - r.image.data()[i] * ref_norm / norm) <=
              1e-9);
      }
    }
  }

  TEST_CASE("datasets are deterministic and span the temperature range") {
    const DatasetConfig cfg = default_dataset_config();
    const auto a = render_dataset(cfg, 40, 7);
    const auto b = render_dataset(cfg, 40, 7);
    const auto c = render_dataset(cfg, 40, 8);
    REQUIRE(a.size() == 40);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].image == b[i].image);
      CHECK(a[i].illuminant == b[i].illuminant);
      CHECK(a[i].temperature >= 2500);
      CHECK(a[i].temperature <= 9500);
      CHECK(a[i].image.width() == 64);
      differs |= !(a[i].image == c[i].image);
    }
    CHECK(differs);
    CHECK(a[3].image_id == "scene_00003");
    // A prefix of a longer run reproduces the shorter one.
    const auto longer = render_dataset(cfg, 45, 7);
    CHECK(longer[39].image == a[39].image);
  }

  TEST_CASE("configuration errors") {
    SpectralConfig s = broad_config(5000);
    s.reflectances = {Spectrum(s.wavelengths.size(), 0.5)};
    CHECK_THROWS_AS(render_mondrian(s, {1, 1, {1}}, 2), InputError);
    CHECK_THROWS_AS(render_mondrian(s, {1, 2, {0}}, 2), InputError);
    s.reflectances[0][3] = 1.5;
    CHECK_THROWS_AS(render_mondrian(s, {1, 1, {0}}, 2), InputError);
    SpectralConfig dark = broad_config(5000);
    dark.illuminant_spd.assign(dark.wavelengths.size(), 0.0);
    CHECK_THROWS_AS(white_response(dark), DegenerateConfigError);
    CHECK_THROWS_AS(blackbody_spd(default_wavelengths(), -5), InputError);
    CHECK_THROWS_AS(render_dataset(default_dataset_config(), 0, 1), InputError);
  }
}
