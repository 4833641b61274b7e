#include <cmath>

#include "doctest.h"
#include "illumkit/correction.hpp"
#include "illumkit/error.hpp"
#include "support.hpp"

using namespace illumkit;

TEST_SUITE("correction") {
  TEST_CASE("apply then correct is the identity") {
    Rng rng(51);
    const auto img = testing::random_image(16, 11, rng, 0.0, 2.0);
    for (int k = 0; k < 50; ++k) {
      const Illuminant L(testing::random_direction(rng));
      const auto back = correct_image(apply_illuminant(img, L), L);
      for (std::size_t i = 0; i < img.data().size(); ++i)
        CHECK(std::abs(back.data()[i] - img.data()[i]) <= 1e-9);
    }
  }

  TEST_CASE("correction gains follow the diagonal model") {
    Rng rng(52);
    const auto img = testing::random_image(5, 5, rng);
    const Illuminant L = normalize_illuminant({0.9, 0.5, 0.2});
    const auto out = correct_image(img, L);
    for (std::size_t i = 0; i < img.data().size(); ++i)
      CHECK(out.data()[i] ==
            doctest::Approx(img.data()[i] / (std::sqrt(3.0) * L[i % 3]))
                .epsilon(1e-14));
    // The light itself is mapped onto equal-energy white.
    const auto g = DiagonalTransform::correcting(L).gains();
    for (int c = 0; c < 3; ++c)
      CHECK(g[c] * L[c] == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
  }

  TEST_CASE("neutral correction leaves the image proportional") {
    Rng rng(53);
    const auto img = testing::random_image(7, 3, rng);
    const auto out = correct_image(img, Illuminant::neutral());
    for (std::size_t i = 0; i < img.data().size(); ++i)
      CHECK(out.data()[i] == doctest::Approx(img.data()[i]).epsilon(1e-15));
  }

  TEST_CASE("no clipping above one") {
    const auto img = LinearImage::filled(2, 2, {0.9, 0.9, 0.9});
    const auto out = correct_image(img, normalize_illuminant({1, 1, 0.05}));
    double peak = 0;
    for (double v : out.data()) peak = std::max(peak, v);
    CHECK(peak > 1.0);
  }

  TEST_CASE("degenerate inputs") {
    const auto img = LinearImage::filled(2, 2, {0.5, 0.5, 0.5});
    CHECK_THROWS_AS(correct_image(img, Illuminant(Rgb{1, 0, 0})),
                    DegenerateIlluminantError);
    CHECK_THROWS_AS(DiagonalTransform({1, 0, 1}), InputError);
    CHECK_THROWS_AS(DiagonalTransform({1, NAN, 1}), InputError);
  }
}
