#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "illumkit/core.hpp"

namespace illumkit {

inline constexpr int kDefaultHistogramBins = 25;
inline constexpr std::size_t kCnnInputSize = 224;

// Binarized (r, g) chromaticity occupancy histogram with bins_per_axis^2
// cells, cell index = r_bin * bins_per_axis + g_bin. Pixels with
// R + G + B = 0 are skipped. Source tag is "hist".
FeatureVector extract_histogram_features(const LinearImage& image,
                                         int bins_per_axis =
                                             kDefaultHistogramBins);

// Bilinear resampling with pixel-center alignment and edge clamping.
LinearImage resize_bilinear(const LinearImage& image, std::size_t width,
                            std::size_t height);

// Stretch to 224 x 224 (aspect ratio is not preserved).
LinearImage resize_for_cnn(const LinearImage& image);

struct FeatureRecord {
  std::string image_id;
  FeatureVector features;
};

// Binary FeatureFile container:
//   "ILKFEAT1" | u32 version=1 | u32 N | u32 d | u16 len + tag |
//   N x (u16 len + image_id | d x f32), all little-endian.
// Values are stored as f32, so load(save(x)) is bit-exact for any x that is
// already f32-representable.
inline constexpr char kFeatureMagic[] = "ILKFEAT1";
inline constexpr std::uint32_t kFeatureVersion = 1;

std::vector<FeatureRecord> parse_feature_file(std::string_view bytes);
std::vector<char> serialize_feature_file(
    const std::vector<FeatureRecord>& records, const std::string& source_tag);

std::vector<FeatureRecord> load_feature_file(
    const std::filesystem::path& path);
void save_feature_file(const std::vector<FeatureRecord>& records,
                       const std::string& source_tag,
                       const std::filesystem::path& path);

}  // namespace illumkit
