#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "illumkit/core.hpp"
#include "illumkit/rng.hpp"

namespace testing {

using illumkit::LinearImage;
using illumkit::Rgb;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("illumkit_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline LinearImage random_image(std::size_t w, std::size_t h,
                                illumkit::Rng& rng, double lo = 0.0,
                                double hi = 1.0) {
  std::vector<double> data(w * h * 3);
  for (double& v : data) v = rng.uniform(lo, hi);
  return LinearImage(w, h, std::move(data));
}

inline Rgb random_direction(illumkit::Rng& rng, double lo = 0.05) {
  Rgb v{rng.uniform(lo, 1.0), rng.uniform(lo, 1.0), rng.uniform(lo, 1.0)};
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (double& x : v) x /= n;
  return v;
}

// Angle in degrees computed directly from the definition.
inline double angle_deg(const Rgb& a, const Rgb& b) {
  double dot = 0, na = 0, nb = 0;
  for (int c = 0; c < 3; ++c) {
    dot += a[c] * b[c];
    na += a[c] * a[c];
    nb += b[c] * b[c];
  }
  const double cosv = std::max(-1.0, std::min(1.0, dot / std::sqrt(na * nb)));
  return std::acos(cosv) * 180.0 / 3.14159265358979323846;
}

}  // namespace testing
