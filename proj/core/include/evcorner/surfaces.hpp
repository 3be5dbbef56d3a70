#pragma once

#include <cstddef>
#include <cstdint>

#include "evcorner/event.hpp"
#include "evcorner/grid.hpp"

namespace evc {

// Zero-threshold for a threshold-ordinal surface: 4 * k_tos.
// Throws InvalidParameter for k_tos < 1.
int tos_default_threshold(int k_tos);

// Threshold-ordinal surface. A firing pixel is set to 255 after every cell
// of its (2k+1)^2 neighbourhood (itself included) is decremented by one;
// decremented cells that drop below the zero-threshold snap to 0. Cell
// values therefore always lie in {0} U [t_tos, 255].
class TosSurface {
 public:
  TosSurface() = default;
  // t_tos < 0 selects tos_default_threshold(k_tos).
  TosSurface(SensorGeometry geometry, int k_tos, int t_tos = -1);

  const SensorGeometry& geometry() const noexcept { return geometry_; }
  int k_tos() const noexcept { return k_tos_; }
  int t_tos() const noexcept { return t_tos_; }

  const Image8& image() const noexcept { return grid_; }
  std::uint8_t at(int x, int y) const noexcept { return grid_.at(x, y); }

  // Applies one event; returns the number of cells visited, which is at
  // most (2k+1)^2 whatever the sensor size. Throws GeometryViolation.
  std::size_t update(const Event& e);

  // Same as update() without the bounds check.
  std::size_t update_unchecked(int x, int y) noexcept;

  // Direct cell access for test setup and snapshot restore.
  void set(int x, int y, std::uint8_t value) noexcept { grid_.at(x, y) = value; }
  void assign(const Image8& image);
  void clear() noexcept { grid_.fill(0); }

  friend bool operator==(const TosSurface&, const TosSurface&) = default;

 private:
  SensorGeometry geometry_{};
  int k_tos_ = 3;
  int t_tos_ = 12;
  Image8 grid_;
};

inline std::size_t tos_update(TosSurface& surface, const Event& e) {
  return surface.update(e);
}

// Surface of active events: each cell holds the timestamp of the last
// event at that pixel, 0 meaning never fired.
class SaeSurface {
 public:
  SaeSurface() = default;
  explicit SaeSurface(SensorGeometry geometry)
      : geometry_(geometry), grid_(geometry, 0) {}

  const SensorGeometry& geometry() const noexcept { return geometry_; }
  const Grid<Timestamp>& grid() const noexcept { return grid_; }
  Timestamp at(int x, int y) const noexcept { return grid_.at(x, y); }

  void update(const Event& e);
  void update_unchecked(const Event& e) noexcept { grid_.at(e.x, e.y) = e.t; }

 private:
  SensorGeometry geometry_{};
  Grid<Timestamp> grid_;
};

inline void sae_update(SaeSurface& surface, const Event& e) { surface.update(e); }

// Sliding-window binary image: a cell reads true iff the pixel fired within
// `window` microseconds of the query time.
class BinaryWindowSurface {
 public:
  BinaryWindowSurface() = default;
  BinaryWindowSurface(SensorGeometry geometry, Timestamp window);

  const SensorGeometry& geometry() const noexcept { return geometry_; }
  Timestamp window() const noexcept { return window_; }

  void update(const Event& e);
  void update_unchecked(const Event& e) noexcept { stamp_.at(e.x, e.y) = e.t + 1; }

  // Throws GeometryViolation for cells outside the sensor.
  bool read(int x, int y, Timestamp now) const;

  bool read_unchecked(int x, int y, Timestamp now) const noexcept {
    const Timestamp s = stamp_.at(x, y);
    if (s == 0) return false;
    const Timestamp fired = s - 1;
    return now < fired || now - fired <= window_;
  }

  // The binary image at `now` with values {0, 255}.
  Image8 render(Timestamp now) const;

 private:
  SensorGeometry geometry_{};
  Timestamp window_ = 10'000;
  Grid<Timestamp> stamp_;  // last fire time + 1, 0 = never fired
};

inline bool binary_window_read(const BinaryWindowSurface& surface, int x, int y,
                               Timestamp now) {
  return surface.read(x, y, now);
}

}  // namespace evc
