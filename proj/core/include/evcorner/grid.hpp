#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "evcorner/event.hpp"

namespace evc {

// Dense row-major width x height array.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(std::uint32_t width, std::uint32_t height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {}
  explicit Grid(const SensorGeometry& g, T fill = T{})
      : Grid(g.width, g.height, fill) {}

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  SensorGeometry geometry() const noexcept { return {width_, height_}; }
  std::size_t size() const noexcept { return data_.size(); }

  T& at(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)];
  }
  const T& at(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)];
  }

  std::span<T> row(int y) noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, width_};
  }
  std::span<const T> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, width_};
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<T> data_;
};

using Image8 = Grid<std::uint8_t>;
using ScoreMap = Grid<double>;

}  // namespace evc
