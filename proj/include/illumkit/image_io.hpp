#pragma once

#include <filesystem>

#include "illumkit/core.hpp"

namespace illumkit {

enum class Transfer { kLinear, kGamma22 };

// Reads 8/16-bit PNG, or baseline uncompressed TIFF with 8/16-bit unsigned
// or 32-bit float samples. Integer samples are scaled to [0, 1]; float
// samples are taken as-is. Gray images are expanded to RGB, alpha is
// dropped. With Transfer::kGamma22 an inverse 2.2 gamma is applied.
LinearImage read_image(const std::filesystem::path& path,
                       Transfer transfer = Transfer::kLinear);

// 16-bit RGB PNG of round(clamp(v * scale, 0, 65535)). Written atomically.
void write_png16(const std::filesystem::path& path, const LinearImage& image,
                 double scale);

// Uncompressed little-endian RGB TIFF with 32-bit float samples.
void write_tiff_float(const std::filesystem::path& path,
                      const LinearImage& image);

// Uncompressed little-endian RGB TIFF with 16-bit samples,
// round(clamp(v * scale, 0, 65535)).
void write_tiff16(const std::filesystem::path& path, const LinearImage& image,
                  double scale);

}  // namespace illumkit
