#include <cmath>

#include "doctest.h"
#include "illumkit/core.hpp"
#include "illumkit/error.hpp"
#include "support.hpp"

using namespace illumkit;

TEST_SUITE("core") {
  TEST_CASE("angular error closed-form cases") {
    const Illuminant a = normalize_illuminant({1, 1, 1});
    CHECK(angular_error(a, a) < 1e-6);
    CHECK(angular_error(Rgb{1, 0, 0}, Rgb{0, 1, 0}) ==
          doctest::Approx(90.0).epsilon(1e-12));
    // cos = 4 / sqrt(3 * 6) = 2 sqrt(2) / 3
    const double expected = std::acos(2.0 * std::sqrt(2.0) / 3.0) * 180.0 / M_PI;
    CHECK(std::abs(expected - 19.4712) < 1e-3);
    CHECK(std::abs(angular_error(Rgb{1, 1, 1}, Rgb{1, 1, 2}) - 19.4712) < 1e-3);
    CHECK(angular_error(a, normalize_illuminant({1, 1, 2})) ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("angular error is symmetric and scale invariant") {
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
      const Rgb x = testing::random_direction(rng, 0.0);
      const Rgb y = testing::random_direction(rng, 0.0);
      const double e = angular_error(x, y);
      CHECK(e == doctest::Approx(angular_error(y, x)).epsilon(1e-14));
      CHECK(e == doctest::Approx(angular_error(Rgb{3 * x[0], 3 * x[1], 3 * x[2]},
                                               y))
                     .epsilon(1e-9));
      CHECK(e == doctest::Approx(testing::angle_deg(x, y)).epsilon(1e-9));
      CHECK(e >= 0.0);
      CHECK(e <= 90.0);  // non-negative vectors
    }
  }

  TEST_CASE("angular error clamps rounding outside [-1, 1]") {
    const Rgb v{0.1, 0.2, 0.3};
    const double e = angular_error(v, v);
    CHECK(std::isfinite(e));
    CHECK(e < 1e-6);
  }

  TEST_CASE("angular error rejects zero vectors") {
    CHECK_THROWS_AS(angular_error(Rgb{0, 0, 0}, Rgb{1, 1, 1}),
                    InvalidIlluminantError);
  }

  TEST_CASE("illuminant invariants") {
    CHECK_NOTHROW(Illuminant(Rgb{1, 0, 0}));
    CHECK_THROWS_AS(Illuminant(Rgb{1, 1, 1}), InvalidIlluminantError);
    CHECK_THROWS_AS(Illuminant(Rgb{-0.6, 0.8, 0}), InvalidIlluminantError);
    const Illuminant n = Illuminant::neutral();
    for (int c = 0; c < 3; ++c)
      CHECK(n[c] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));

    const Illuminant u = normalize_illuminant({3, 4, 0});
    CHECK(u[0] == doctest::Approx(0.6));
    CHECK(u[1] == doctest::Approx(0.8));
    CHECK(u[2] == 0.0);
    CHECK_THROWS_AS(normalize_illuminant({0, 0, 0}), InvalidIlluminantError);
    CHECK_THROWS_AS(normalize_illuminant({-1, -2, 0}), InvalidIlluminantError);
    CHECK_THROWS_AS(normalize_illuminant({NAN, 1, 1}), InvalidIlluminantError);
  }

  TEST_CASE("linear image validation and accessors") {
    CHECK_THROWS_AS(LinearImage(2, 2, std::vector<double>(11, 0.0)),
                    InputError);
    CHECK_THROWS_AS(LinearImage(0, 2, {}), InputError);
    CHECK_THROWS_AS(LinearImage(1, 1, {0.1, -0.1, 0.2}), InputError);
    CHECK_THROWS_AS(LinearImage(1, 1, {0.1, INFINITY, 0.2}), InputError);

    std::vector<double> d(2 * 3 * 3);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = double(i);
    const LinearImage img(2, 3, d);
    CHECK(img.pixel_count() == 6);
    CHECK(img.at(1, 2, 2) == d[(2 * 2 + 1) * 3 + 2]);
    const auto g = img.channel(1);
    REQUIRE(g.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(g[i] == d[i * 3 + 1]);
    const auto s = img.scaled(2.0);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(s.data()[i] == 2 * d[i]);
  }

  TEST_CASE("feature validation") {
    CHECK_THROWS_AS(validate_features({{}, "x"}), InputError);
    CHECK_THROWS_AS(validate_features({{1.0, NAN}, "x"}), InputError);
    CHECK_NOTHROW(validate_features({{1.0, 2.0}, "x"}));
    const Illuminant n = Illuminant::neutral();
    std::vector<LabeledSample> s{{{{1, 2}, "a"}, n, "i"},
                                 {{{3, 4}, "a"}, n, "j"}};
    CHECK(common_dimension(s) == 2);
    s.push_back({{{1, 2, 3}, "a"}, n, "k"});
    CHECK_THROWS_AS(common_dimension(s), InputError);
    s.back() = {{{1, 2}, "b"}, n, "k"};
    CHECK_THROWS_AS(common_dimension(s), InputError);
  }
}
