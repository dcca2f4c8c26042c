#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "salrate/types.hpp"

namespace testsupport {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("salrate-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Textured noise over gradients; amplitude keeps most samples off the rails.
inline salrate::VideoSequence textured_video(int width, int height, int frames,
                                             uint32_t seed) {
  salrate::VideoSequence video;
  video.width = width;
  video.height = height;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> noise(-24, 24);
  for (int f = 0; f < frames; ++f) {
    std::vector<uint8_t> plane(static_cast<size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double base = 60.0 + 0.35 * x + 0.25 * y + 2.0 * f;
        int v = static_cast<int>(base) + noise(rng);
        plane[static_cast<size_t>(y) * width + x] =
            static_cast<uint8_t>(std::clamp(v, 0, 255));
      }
    }
    video.frames.push_back(std::move(plane));
  }
  return video;
}

inline std::vector<uint8_t> random_frame(int width, int height, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(0, 255);
  std::vector<uint8_t> plane(static_cast<size_t>(width) * height);
  for (uint8_t& v : plane) v = static_cast<uint8_t>(d(rng));
  return plane;
}

// Two Gaussian lobes whose centers drift with the frame phase t in [0,1].
inline salrate::SaliencyMap two_lobe_map(int width, int height, double t) {
  salrate::SaliencyMap map(width, height);
  const double cx1 = 0.25 * width + 8.0 * t;
  const double cy1 = 0.5 * height;
  const double s1 = 0.14 * width;
  const double cx2 = 0.75 * width - 6.0 * t;
  const double cy2 = 0.42 * height;
  const double s2 = 0.11 * width;
  double peak = 0.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double d1 = ((x - cx1) * (x - cx1) + (y - cy1) * (y - cy1)) / (2.0 * s1 * s1);
      const double d2 = ((x - cx2) * (x - cx2) + (y - cy2) * (y - cy2)) / (2.0 * s2 * s2);
      double v = std::max(d1 <= 8.0 ? std::exp(-d1) : 0.0, d2 <= 8.0 ? std::exp(-d2) : 0.0);
      map.at(x, y) = v;
      peak = std::max(peak, v);
    }
  }
  if (peak > 0.0) {
    for (double& v : map.values) v /= peak;
  }
  return map;
}

inline std::vector<salrate::SaliencyMap> two_lobe_sequence(int width, int height, int frames) {
  std::vector<salrate::SaliencyMap> maps;
  for (int f = 0; f < frames; ++f) {
    maps.push_back(two_lobe_map(width, height, frames > 1 ? double(f) / (frames - 1) : 0.0));
  }
  return maps;
}

inline salrate::PixelMap random_map(int width, int height, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  salrate::PixelMap map(width, height);
  for (double& v : map.values) v = d(rng);
  return map;
}

}  // namespace testsupport
