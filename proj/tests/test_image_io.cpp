#include <cmath>
#include <cstring>
#include <fstream>

#include "doctest.h"
#include "illumkit/error.hpp"
#include "illumkit/fileutil.hpp"
#include "illumkit/image_io.hpp"
#include "support.hpp"

using namespace illumkit;

namespace {

// Minimal big-endian 8-bit RGB TIFF assembled by hand.
std::string big_endian_tiff(std::uint16_t w, std::uint16_t h,
                            const std::vector<std::uint8_t>& pixels) {
  std::string s;
  auto u16 = [&](std::uint16_t v) {
    s.push_back(char(v >> 8));
    s.push_back(char(v & 0xff));
  };
  auto u32 = [&](std::uint32_t v) {
    for (int i = 3; i >= 0; --i) s.push_back(char((v >> (8 * i)) & 0xff));
  };
  s += "MM";
  u16(42);
  u32(8);
  const std::uint16_t entries = 8;
  const std::uint32_t bits_at = 8 + 2 + 12 * entries + 4;
  const std::uint32_t data_at = bits_at + 6;
  u16(entries);
  auto tag_short = [&](std::uint16_t tag, std::uint16_t v) {
    u16(tag);
    u16(3);
    u32(1);
    u16(v);
    u16(0);
  };
  auto tag_long = [&](std::uint16_t tag, std::uint32_t v) {
    u16(tag);
    u16(4);
    u32(1);
    u32(v);
  };
  tag_short(256, w);
  tag_short(257, h);
  u16(258);  // bits per sample, 3 shorts stored out of line
  u16(3);
  u32(3);
  u32(bits_at);
  tag_short(259, 1);
  tag_short(262, 2);
  tag_long(273, data_at);
  tag_short(277, 3);
  tag_long(279, std::uint32_t(pixels.size()));
  u32(0);
  u16(8);
  u16(8);
  u16(8);
  s.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  return s;
}

}  // namespace

TEST_SUITE("image_io") {
  TEST_CASE("float TIFF round trip is exact for f32 values") {
    testing::TempDir dir("tiff");
    Rng rng(71);
    std::vector<double> d(9 * 4 * 3);
    for (double& v : d) v = double(float(rng.uniform(0, 3)));
    const LinearImage img(9, 4, d);
    write_tiff_float(dir / "a/x.tiff", img);
    CHECK(read_image(dir / "a/x.tiff") == img);
  }

  TEST_CASE("16-bit TIFF and PNG quantize to within half a step") {
    testing::TempDir dir("q16");
    Rng rng(72);
    const auto img = testing::random_image(13, 6, rng);
    const double scale = 65535.0;
    write_tiff16(dir / "x.tif", img, scale);
    write_png16(dir / "x.png", img, scale);
    for (const char* name : {"x.tif", "x.png"}) {
      const auto back = read_image(dir / name);
      REQUIRE(back.width() == 13);
      for (std::size_t i = 0; i < img.data().size(); ++i)
        CHECK(std::abs(back.data()[i] - img.data()[i]) <= 0.5 / 65535 + 1e-12);
    }
  }

  TEST_CASE("PNG with scale and gamma decoding") {
    testing::TempDir dir("png");
    const auto img = LinearImage::filled(3, 2, {0.25, 0.5, 1.0});
    write_png16(dir / "g.png", img, 65535.0);
    const auto lin = read_image(dir / "g.png", Transfer::kLinear);
    const auto gam = read_image(dir / "g.png", Transfer::kGamma22);
    for (std::size_t i = 0; i < lin.data().size(); ++i)
      CHECK(gam.data()[i] ==
            doctest::Approx(std::pow(lin.data()[i], 2.2)).epsilon(1e-12));
    // Values above the scale saturate.
    write_png16(dir / "s.png", img, 65535.0 * 2);
    CHECK(read_image(dir / "s.png").at(0, 0, 2) == 1.0);
    CHECK(read_image(dir / "s.png").at(0, 0, 0) == doctest::Approx(0.5));
  }

  TEST_CASE("hand-built big-endian TIFF decodes") {
    testing::TempDir dir("be");
    const std::vector<std::uint8_t> px{0, 51, 102, 153, 204, 255};
    write_file_atomic(dir / "be.tif", big_endian_tiff(2, 1, px));
    const auto img = read_image(dir / "be.tif");
    REQUIRE(img.width() == 2);
    REQUIRE(img.height() == 1);
    for (std::size_t i = 0; i < px.size(); ++i)
      CHECK(img.data()[i] == doctest::Approx(px[i] / 255.0).epsilon(1e-15));
  }

  TEST_CASE("errors") {
    testing::TempDir dir("err");
    CHECK_THROWS_AS(read_image(dir / "missing.png"), IoError);
    write_file_atomic(dir / "junk.bin", std::string("hello world"));
    CHECK_THROWS_AS(read_image(dir / "junk.bin"), FormatError);
    auto t = big_endian_tiff(2, 1, {1, 2, 3, 4, 5, 6});
    write_file_atomic(dir / "short.tif", t.substr(0, t.size() - 3));
    CHECK_THROWS_AS(read_image(dir / "short.tif"), FormatError);
    const auto img = LinearImage::filled(4, 4, {0.1, 0.2, 0.3});
    write_png16(dir / "ok.png", img, 1000);
    auto bytes = read_file(dir / "ok.png");
    write_file_atomic(dir / "cut.png", bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(read_image(dir / "cut.png"), FormatError);
  }
}
