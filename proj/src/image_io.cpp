#include "illumkit/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string_view>

#include "binary_io.hpp"
#include "illumkit/error.hpp"
#include "illumkit/fileutil.hpp"

namespace illumkit {

namespace fs = std::filesystem;

namespace {

double to_linear(double v, Transfer transfer) {
  return transfer == Transfer::kGamma22 ? std::pow(v, 2.2) : v;
}

std::uint16_t quantize16(double v, double scale) {
  const double q = std::round(std::clamp(v * scale, 0.0, 65535.0));
  return static_cast<std::uint16_t>(q);
}

// ---- PNG -------------------------------------------------------------------

struct PngSource {
  std::string_view bytes;
  std::size_t pos = 0;
};

// libpng is built with unwind tables on the supported platforms, so the
// error callback may throw instead of longjmp-ing.
[[noreturn]] void png_fail(png_structp, png_const_charp msg) {
  throw FormatError(std::string("PNG: ") + msg);
}

void png_warn(png_structp, png_const_charp) {}

bool is_png(std::string_view bytes) {
  return bytes.size() >= 8 &&
         png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) ==
             0;
}

LinearImage decode_png(std::string_view bytes, Transfer transfer) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_fail, png_warn);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) throw IoError("png_create_info_struct failed");

  PngSource src{bytes, 0};
  png_set_read_fn(png, &src, [](png_structp p, png_bytep out, png_size_t n) {
    auto* s = static_cast<PngSource*>(png_get_io_ptr(p));
    if (s->bytes.size() - s->pos < n) png_error(p, "truncated file");
    std::memcpy(out, s->bytes.data() + s->pos, n);
    s->pos += n;
  });
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<png_byte> raw(rowbytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raw.data() + y * rowbytes;
  png_read_image(png, rows.data());

  const bool sixteen = png_get_bit_depth(png, info) == 16;
  const double maxval = sixteen ? 65535.0 : 255.0;
  std::vector<double> data(std::size_t(width) * height * 3);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = sixteen ? double((raw[2 * i] << 8) | raw[2 * i + 1])
                             : double(raw[i]);
    data[i] = to_linear(v / maxval, transfer);
  }
  return LinearImage(width, height, std::move(data));
}

// ---- TIFF ------------------------------------------------------------------

class TiffReader {
 public:
  explicit TiffReader(std::string_view bytes) : bytes_(bytes) {
    if (bytes.size() < 8) throw FormatError("TIFF: truncated header", 0);
    if (bytes.substr(0, 2) == "II")
      little_ = true;
    else if (bytes.substr(0, 2) == "MM")
      little_ = false;
    else
      throw FormatError("TIFF: bad byte-order mark", 0);
    if (get(2, 2) != 42) throw FormatError("TIFF: bad magic number", 2);
  }

  std::uint64_t get(std::uint64_t offset, int n) const {
    if (offset > bytes_.size() || bytes_.size() - offset < std::uint64_t(n))
      throw FormatError("TIFF: read past end of file", offset);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      const auto b = std::uint64_t(
          static_cast<unsigned char>(bytes_[offset + std::uint64_t(i)]));
      v |= little_ ? b << (8 * i) : b << (8 * (n - 1 - i));
    }
    return v;
  }

  bool little() const { return little_; }
  std::string_view bytes() const { return bytes_; }

 private:
  std::string_view bytes_;
  bool little_ = true;
};

bool is_tiff(std::string_view bytes) {
  return bytes.size() >= 4 &&
         (bytes.substr(0, 4) == std::string_view("II*\0", 4) ||
          bytes.substr(0, 4) == std::string_view("MM\0*", 4));
}

LinearImage decode_tiff(std::string_view bytes, Transfer transfer) {
  const TiffReader t(bytes);
  const std::uint64_t ifd = t.get(4, 4);
  const auto count = t.get(ifd, 2);

  std::uint64_t width = 0, height = 0, compression = 1, photometric = 2;
  std::uint64_t samples = 1, rows_per_strip = ~0ULL, planar = 1, format = 1;
  std::vector<std::uint64_t> bits, offsets, byte_counts;

  auto values = [&](std::uint64_t entry) {
    const auto type = t.get(entry + 2, 2);
    const auto n = t.get(entry + 4, 4);
    int size;
    switch (type) {
      case 3: size = 2; break;  // SHORT
      case 4: size = 4; break;  // LONG
      default:
        throw FormatError("TIFF: unsupported tag type", entry);
    }
    const std::uint64_t at =
        n * std::uint64_t(size) <= 4 ? entry + 8 : t.get(entry + 8, 4);
    std::vector<std::uint64_t> out(n);
    for (std::uint64_t i = 0; i < n; ++i)
      out[i] = t.get(at + i * std::uint64_t(size), size);
    return out;
  };

  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t entry = ifd + 2 + 12 * k;
    const auto tag = t.get(entry, 2);
    switch (tag) {
      case 256: width = values(entry).at(0); break;
      case 257: height = values(entry).at(0); break;
      case 258: bits = values(entry); break;
      case 259: compression = values(entry).at(0); break;
      case 262: photometric = values(entry).at(0); break;
      case 273: offsets = values(entry); break;
      case 277: samples = values(entry).at(0); break;
      case 278: rows_per_strip = values(entry).at(0); break;
      case 279: byte_counts = values(entry); break;
      case 284: planar = values(entry).at(0); break;
      case 339: format = values(entry).at(0); break;
      default: break;
    }
  }
  if (width == 0 || height == 0) throw FormatError("TIFF: missing dimensions");
  if (compression != 1) throw FormatError("TIFF: only uncompressed supported");
  if (planar != 1) throw FormatError("TIFF: only chunky layout supported");
  if (photometric != 1 && photometric != 2)
    throw FormatError("TIFF: unsupported photometric interpretation");
  if (samples < (photometric == 2 ? 3u : 1u))
    throw FormatError("TIFF: too few samples per pixel");
  if (bits.empty()) bits = {1};
  const std::uint64_t depth = bits[0];
  const bool is_float = format == 3;
  if (!((format == 1 && (depth == 8 || depth == 16)) ||
        (is_float && depth == 32)))
    throw FormatError("TIFF: unsupported sample format");
  if (offsets.empty()) throw FormatError("TIFF: missing strip offsets");
  rows_per_strip = std::min(rows_per_strip, height);

  const std::uint64_t bps = depth / 8;
  const std::uint64_t row_bytes = width * samples * bps;
  const double maxval = depth == 8 ? 255.0 : 65535.0;
  std::vector<double> data(width * height * 3);
  for (std::uint64_t y = 0; y < height; ++y) {
    const std::uint64_t strip = y / rows_per_strip;
    if (strip >= offsets.size()) throw FormatError("TIFF: missing strip");
    const std::uint64_t row_at =
        offsets[strip] + (y % rows_per_strip) * row_bytes;
    for (std::uint64_t x = 0; x < width; ++x) {
      for (std::uint64_t c = 0; c < 3; ++c) {
        const std::uint64_t s = photometric == 2 ? c : 0;
        const std::uint64_t at = row_at + (x * samples + s) * bps;
        const std::uint64_t raw = t.get(at, int(bps));
        double v;
        if (is_float) {
          v = std::bit_cast<float>(static_cast<std::uint32_t>(raw));
          if (!std::isfinite(v) || v < 0.0)
            throw FormatError("TIFF: negative or non-finite sample", at);
        } else {
          v = to_linear(double(raw) / maxval, transfer);
        }
        data[(y * width + x) * 3 + c] = v;
      }
    }
  }
  return LinearImage(width, height, std::move(data));
}

void encode_tiff(const fs::path& path, const LinearImage& image,
                 bool float_samples, double scale) {
  const std::uint32_t w = static_cast<std::uint32_t>(image.width());
  const std::uint32_t h = static_cast<std::uint32_t>(image.height());
  const std::uint32_t bps = float_samples ? 4 : 2;
  const std::uint32_t pixel_bytes = w * h * 3 * bps;

  binio::Writer out;
  out.bytes(std::string_view("II*\0", 4));
  const std::uint32_t data_at = 8;
  const std::uint32_t bits_at = data_at + pixel_bytes;
  const std::uint32_t ifd_at = bits_at + 6 + ((bits_at + 6) & 1);
  out.u32(ifd_at);
  for (double v : image.data()) {
    if (float_samples)
      out.f32(static_cast<float>(v));
    else
      out.u16(quantize16(v, scale));
  }
  for (int c = 0; c < 3; ++c) out.u16(static_cast<std::uint16_t>(8 * bps));
  if ((bits_at + 6) & 1) out.u8(0);

  struct Entry {
    std::uint16_t tag, type;
    std::uint32_t count, value;
  };
  const std::vector<Entry> entries = {
      {256, 4, 1, w},
      {257, 4, 1, h},
      {258, 3, 3, bits_at},
      {259, 3, 1, 1},
      {262, 3, 1, 2},
      {273, 4, 1, data_at},
      {277, 3, 1, 3},
      {278, 4, 1, h},
      {279, 4, 1, pixel_bytes},
      {284, 3, 1, 1},
      {339, 3, 1, float_samples ? 3u : 1u},
  };
  out.u16(static_cast<std::uint16_t>(entries.size()));
  for (const auto& e : entries) {
    out.u16(e.tag);
    out.u16(e.type);
    out.u32(e.count);
    if (e.type == 3 && e.count == 1) {
      out.u16(static_cast<std::uint16_t>(e.value));
      out.u16(0);
    } else {
      out.u32(e.value);
    }
  }
  out.u32(0);
  write_file_atomic(path, out.buffer());
}

}  // namespace

LinearImage read_image(const fs::path& path, Transfer transfer) {
  const std::string bytes = read_file(path);
  try {
    if (is_png(bytes)) return decode_png(bytes, transfer);
    if (is_tiff(bytes)) return decode_tiff(bytes, transfer);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  throw FormatError(path.string() + ": not a PNG or TIFF file");
}

void write_png16(const fs::path& path, const LinearImage& image,
                 double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InputError("PNG scale must be finite and positive");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_fail, png_warn);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) throw IoError("png_create_info_struct failed");

  std::vector<char> encoded;
  png_set_write_fn(
      png, &encoded,
      [](png_structp p, png_bytep data, png_size_t n) {
        auto* buf = static_cast<std::vector<char>*>(png_get_io_ptr(p));
        buf->insert(buf->end(), data, data + n);
      },
      [](png_structp) {});

  const auto w = static_cast<png_uint_32>(image.width());
  const auto h = static_cast<png_uint_32>(image.height());
  png_set_IHDR(png, info, w, h, 16, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_gAMA(png, info, 1.0);
  png_write_info(png, info);
  std::vector<png_byte> row(std::size_t(w) * 6);
  for (png_uint_32 y = 0; y < h; ++y) {
    for (png_uint_32 x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const std::uint16_t q = quantize16(image.at(x, y, std::size_t(c)), scale);
        row[(std::size_t(x) * 3 + std::size_t(c)) * 2] = png_byte(q >> 8);
        row[(std::size_t(x) * 3 + std::size_t(c)) * 2 + 1] = png_byte(q & 0xff);
      }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  write_file_atomic(path, encoded);
}

void write_tiff_float(const fs::path& path, const LinearImage& image) {
  encode_tiff(path, image, true, 1.0);
}

void write_tiff16(const fs::path& path, const LinearImage& image,
                  double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InputError("TIFF scale must be finite and positive");
  encode_tiff(path, image, false, scale);
}

}  // namespace illumkit
