#include <cmath>
#include <cstring>

#include "doctest.h"
#include "illumkit/error.hpp"
#include "illumkit/features.hpp"
#include "illumkit/fileutil.hpp"
#include "support.hpp"

using namespace illumkit;

namespace {

// Independent binning: the k with k/B <= v < (k+1)/B, last bin closed.
std::size_t interval_bin(double v, std::size_t bins) {
  for (std::size_t k = 0; k + 1 < bins; ++k)
    if (v < double(k + 1) / double(bins)) return k;
  return bins - 1;
}

std::vector<double> brute_histogram(const LinearImage& img, std::size_t bins) {
  std::vector<double> h(bins * bins, 0.0);
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x) {
      const Rgb p = img.pixel(x, y);
      const double s = p[0] + p[1] + p[2];
      if (s == 0) continue;
      h[interval_bin(p[0] / s, bins) * bins + interval_bin(p[1] / s, bins)] = 1;
    }
  return h;
}

// Hand-assembled little-endian FeatureFile.
struct Bytes {
  std::string s;
  void raw(const void* p, std::size_t n) {
    s.append(static_cast<const char*>(p), n);
  }
  void u16(std::uint16_t v) {
    const unsigned char b[2] = {std::uint8_t(v), std::uint8_t(v >> 8)};
    raw(b, 2);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      const unsigned char b = std::uint8_t(v >> (8 * i));
      raw(&b, 1);
    }
  }
  void f32(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    u32(u);
  }
  void str(const std::string& t) {
    u16(std::uint16_t(t.size()));
    s += t;
  }
};

Bytes header(std::uint32_t n, std::uint32_t d, const std::string& tag) {
  Bytes b;
  b.raw("ILKFEAT1", 8);
  b.u32(1);
  b.u32(n);
  b.u32(d);
  b.str(tag);
  return b;
}

std::uint64_t offset_of(const std::string& bytes) {
  try {
    parse_feature_file(bytes);
  } catch (const FormatError& e) {
    return e.offset();
  }
  return FormatError::npos - 1;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("histogram matches brute-force binning") {
    Rng rng(21);
    for (int bins : {2, 5, 25}) {
      for (int k = 0; k < 5; ++k) {
        const auto img = testing::random_image(13, 9, rng);
        const FeatureVector fv = extract_histogram_features(img, bins);
        CHECK(fv.source_tag == "hist");
        CHECK(fv.dim() == std::size_t(bins * bins));
        CHECK(fv.values == brute_histogram(img, std::size_t(bins)));
      }
    }
  }

  TEST_CASE("histogram edge cases") {
    // Pure red lands in the last r bin; black pixels are skipped.
    const LinearImage img(2, 1, {1, 0, 0, 0, 0, 0});
    const auto fv = extract_histogram_features(img, 4);
    std::vector<double> want(16, 0.0);
    want[3 * 4 + 0] = 1;
    CHECK(fv.values == want);
    CHECK_THROWS_AS(extract_histogram_features(
                        LinearImage::filled(2, 2, {0, 0, 0})),
                    InputError);
    CHECK_THROWS_AS(extract_histogram_features(img, 1), InputError);
    // Occupancy, not counts, and invariant to exposure.
    Rng rng(3);
    const auto r = testing::random_image(8, 8, rng, 0.01, 1.0);
    CHECK(extract_histogram_features(r) ==
          extract_histogram_features(r.scaled(4.0)));
  }

  TEST_CASE("resize") {
    Rng rng(22);
    const auto c = LinearImage::filled(7, 5, {0.2, 0.4, 0.6});
    const auto up = resize_bilinear(c, 31, 17);
    for (std::size_t i = 0; i < up.data().size(); ++i)
      CHECK(up.data()[i] == doctest::Approx(c.data()[i % 3]).epsilon(1e-12));

    // Smooth image: the mean survives resampling within 1%.
    std::vector<double> d(300 * 200 * 3);
    for (std::size_t y = 0; y < 200; ++y)
      for (std::size_t x = 0; x < 300; ++x)
        for (std::size_t ch = 0; ch < 3; ++ch)
          d[(y * 300 + x) * 3 + ch] =
              0.5 + 0.4 * std::sin(0.03 * x + ch) * std::cos(0.02 * y);
    const LinearImage smooth(300, 200, d);
    const auto small = resize_for_cnn(smooth);
    CHECK(small.width() == 224);
    CHECK(small.height() == 224);
    for (std::size_t ch = 0; ch < 3; ++ch) {
      auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / double(v.size());
      };
      CHECK(std::abs(mean(small.channel(ch)) - mean(smooth.channel(ch))) <
            0.01 * mean(smooth.channel(ch)));
    }
    const auto same = testing::random_image(5, 4, rng);
    CHECK(resize_bilinear(same, 5, 4) == same);
    CHECK_THROWS_AS(resize_bilinear(same, 0, 4), InputError);
  }

  TEST_CASE("feature file layout matches the documented format") {
    Bytes b = header(2, 3, "fc6");
    b.str("img_a");
    for (float v : {0.5f, 1.25f, 0.0f}) b.f32(v);
    b.str("img_b");
    for (float v : {3.0f, -2.5f, 1e-3f}) b.f32(v);
    const auto recs = parse_feature_file(b.s);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].image_id == "img_a");
    CHECK(recs[1].features.values ==
          std::vector<double>{3.0, -2.5, double(1e-3f)});
    CHECK(recs[1].features.source_tag == "fc6");

    const auto out = serialize_feature_file(recs, "fc6");
    CHECK(std::string(out.begin(), out.end()) == b.s);
  }

  TEST_CASE("feature file round trip is bit exact") {
    testing::TempDir dir("feat");
    Rng rng(23);
    std::vector<FeatureRecord> recs;
    for (int i = 0; i < 20; ++i) {
      FeatureVector fv{std::vector<double>(37), "hist"};
      for (double& v : fv.values) v = double(float(rng.uniform(-10, 10)));
      recs.push_back({"id_" + std::to_string(i), fv});
    }
    const auto path = dir / "sub/f.bin";
    save_feature_file(recs, "hist", path);
    const auto back = load_feature_file(path);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(back[i].image_id == recs[i].image_id);
      CHECK(back[i].features == recs[i].features);
    }
    CHECK(read_file(path) == [&] {
      const auto v = serialize_feature_file(recs, "hist");
      return std::string(v.begin(), v.end());
    }());
    CHECK_THROWS_AS(save_feature_file({}, "hist", dir / "empty.bin"),
                    InputError);
  }

  TEST_CASE("feature file errors carry byte offsets") {
    Bytes bad_magic = header(0, 3, "t");
    bad_magic.s[0] = 'X';
    CHECK(offset_of(bad_magic.s) == 0);

    Bytes version = header(0, 3, "t");
    version.s[8] = 2;
    CHECK(offset_of(version.s) == 8);

    // Second record is one value short.
    Bytes shortrec = header(2, 2, "t");
    shortrec.str("a");
    shortrec.f32(1);
    shortrec.f32(2);
    shortrec.str("b");
    const auto b_values_at = shortrec.s.size();
    shortrec.f32(1);
    CHECK(offset_of(shortrec.s) == b_values_at + 4);

    Bytes dup = header(2, 1, "t");
    dup.str("a");
    dup.f32(1);
    const auto second_at = dup.s.size();
    dup.str("a");
    dup.f32(2);
    CHECK(offset_of(dup.s) == second_at);

    Bytes trailing = header(1, 1, "t");
    trailing.str("a");
    trailing.f32(1);
    const auto end_at = trailing.s.size();
    trailing.s += "zz";
    CHECK(offset_of(trailing.s) == end_at);

    Bytes nan = header(1, 2, "t");
    nan.str("a");
    nan.f32(1);
    const auto nan_at = nan.s.size();
    nan.f32(std::nanf(""));
    CHECK(offset_of(nan.s) == nan_at);

    CHECK(offset_of(std::string("ILKF")) != FormatError::npos - 1);
  }
}
