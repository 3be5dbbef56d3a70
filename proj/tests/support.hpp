#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "evcorner/event.hpp"
#include "evcorner/grid.hpp"

namespace testsupport {

inline evc::Image8 random_image(std::uint32_t w, std::uint32_t h, std::mt19937_64& rng,
                                bool binary = false) {
  evc::Image8 img(w, h);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& v : img.data()) {
    const int r = d(rng);
    v = static_cast<std::uint8_t>(binary ? (r < 128 ? 0 : 255) : r);
  }
  return img;
}

// Uniform random events with strictly increasing timestamps.
inline std::vector<evc::Event> random_events(std::size_t n, std::uint32_t w, std::uint32_t h,
                                             std::mt19937_64& rng, evc::Timestamp max_gap = 50) {
  std::uniform_int_distribution<std::uint32_t> dx(0, w - 1), dy(0, h - 1);
  std::uniform_int_distribution<evc::Timestamp> gap(0, max_gap);
  std::vector<evc::Event> out;
  out.reserve(n);
  evc::Timestamp t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += gap(rng);
    out.push_back({t, static_cast<std::uint16_t>(dx(rng)), static_cast<std::uint16_t>(dy(rng)),
                   (rng() & 1) != 0});
  }
  return out;
}

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("evcorner_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
