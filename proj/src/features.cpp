#include "illumkit/features.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "binary_io.hpp"
#include "illumkit/error.hpp"
#include "illumkit/fileutil.hpp"

namespace illumkit {

FeatureVector extract_histogram_features(const LinearImage& image,
                                         int bins_per_axis) {
  if (bins_per_axis < 2) throw InputError("bins_per_axis must be >= 2");
  const auto bins = static_cast<std::size_t>(bins_per_axis);
  FeatureVector fv{std::vector<double>(bins * bins, 0.0), "hist"};

  auto bin_of = [&](double v) {
    const auto b = static_cast<std::size_t>(std::floor(v * double(bins)));
    return std::min(b, bins - 1);
  };

  bool any = false;
  const auto data = image.data();
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const double r = data[3 * i], g = data[3 * i + 1], b = data[3 * i + 2];
    const double sum = r + g + b;
    if (sum <= 0.0) continue;
    fv.values[bin_of(r / sum) * bins + bin_of(g / sum)] = 1.0;
    any = true;
  }
  if (!any) throw InputError("histogram of an all-zero image");
  return fv;
}

LinearImage resize_bilinear(const LinearImage& image, std::size_t width,
                            std::size_t height) {
  if (width == 0 || height == 0) throw InputError("resize to an empty image");
  if (width == image.width() && height == image.height()) return image;

  struct Tap {
    std::size_t lo, hi;
    double t;
  };
  auto taps = [](std::size_t src, std::size_t dst) {
    std::vector<Tap> out(dst);
    const double scale = double(src) / double(dst);
    for (std::size_t i = 0; i < dst; ++i) {
      double s = (double(i) + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, double(src - 1));
      const auto lo = static_cast<std::size_t>(std::floor(s));
      const std::size_t hi = std::min(lo + 1, src - 1);
      out[i] = {lo, hi, s - double(lo)};
    }
    return out;
  };
  const auto tx = taps(image.width(), width);
  const auto ty = taps(image.height(), height);

  std::vector<double> out(width * height * 3);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const auto [x0, x1, fx] = tx[x];
      const auto [y0, y1, fy] = ty[y];
      for (std::size_t c = 0; c < 3; ++c) {
        const double top =
            (1 - fx) * image.at(x0, y0, c) + fx * image.at(x1, y0, c);
        const double bottom =
            (1 - fx) * image.at(x0, y1, c) + fx * image.at(x1, y1, c);
        out[(y * width + x) * 3 + c] = (1 - fy) * top + fy * bottom;
      }
    }
  }
  return LinearImage(width, height, std::move(out));
}

LinearImage resize_for_cnn(const LinearImage& image) {
  return resize_bilinear(image, kCnnInputSize, kCnnInputSize);
}

std::vector<FeatureRecord> parse_feature_file(std::string_view bytes) {
  binio::Reader in(bytes);
  const std::uint64_t magic_at = in.offset();
  if (in.bytes(8, "magic") != std::string_view(kFeatureMagic, 8))
    throw FormatError("bad FeatureFile magic", magic_at);
  const std::uint64_t version_at = in.offset();
  if (in.u32("version") != kFeatureVersion)
    throw FormatError("unsupported FeatureFile version", version_at);
  const std::uint32_t n = in.u32("record count");
  const std::uint64_t dim_at = in.offset();
  const std::uint32_t d = in.u32("dimension");
  const std::string tag = in.short_string("source tag");
  if (d == 0 && n > 0) throw FormatError("zero feature dimension", dim_at);

  std::vector<FeatureRecord> records;
  std::unordered_set<std::string> seen;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint64_t record_at = in.offset();
    std::string id = in.short_string("image id");
    if (!seen.insert(id).second)
      throw FormatError("duplicate image id '" + id + "'", record_at);
    FeatureVector fv{std::vector<double>(d), tag};
    for (std::uint32_t k = 0; k < d; ++k) {
      const std::uint64_t value_at = in.offset();
      if (bytes.size() - value_at < 4)
        throw FormatError("record '" + id + "' shorter than dimension " +
                              std::to_string(d),
                          value_at);
      fv.values[k] = in.f32("feature value");
      if (!std::isfinite(fv.values[k]))
        throw FormatError("non-finite feature value", value_at);
    }
    records.push_back({std::move(id), std::move(fv)});
  }
  if (!in.at_end())
    throw FormatError("trailing bytes after last record", in.offset());
  return records;
}

std::vector<char> serialize_feature_file(
    const std::vector<FeatureRecord>& records, const std::string& source_tag) {
  if (records.empty()) throw InputError("no feature records to save");
  const std::size_t d = records.front().features.dim();
  binio::Writer out;
  out.bytes(std::string_view(kFeatureMagic, 8));
  out.u32(kFeatureVersion);
  out.u32(static_cast<std::uint32_t>(records.size()));
  out.u32(static_cast<std::uint32_t>(d));
  out.short_string(source_tag, "source tag");
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    validate_features(r.features);
    if (r.features.dim() != d)
      throw InputError("inconsistent feature dimension for '" + r.image_id +
                       "'");
    if (!seen.insert(r.image_id).second)
      throw InputError("duplicate image id '" + r.image_id + "'");
    out.short_string(r.image_id, "image id");
    for (double v : r.features.values) out.f32(static_cast<float>(v));
  }
  return out.buffer();
}

std::vector<FeatureRecord> load_feature_file(
    const std::filesystem::path& path) {
  return parse_feature_file(read_file(path));
}

void save_feature_file(const std::vector<FeatureRecord>& records,
                       const std::string& source_tag,
                       const std::filesystem::path& path) {
  write_file_atomic(path, serialize_feature_file(records, source_tag));
}

}  // namespace illumkit
