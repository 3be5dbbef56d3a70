#include "evcorner/surfaces.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "evcorner/error.hpp"

namespace evc {

int tos_default_threshold(int k_tos) {
  if (k_tos < 1) throw InvalidParameter(fmt::format("k_tos must be >= 1, got {}", k_tos));
  return 2 * 2 * k_tos;
}

TosSurface::TosSurface(SensorGeometry geometry, int k_tos, int t_tos)
    : geometry_(geometry), k_tos_(k_tos), grid_(geometry, 0) {
  validate(geometry);
  t_tos_ = t_tos < 0 ? tos_default_threshold(k_tos) : t_tos;
  if (k_tos < 1) throw InvalidParameter(fmt::format("k_tos must be >= 1, got {}", k_tos));
  if (t_tos_ > 255) throw InvalidParameter(fmt::format("t_tos must be <= 255, got {}", t_tos_));
}

std::size_t TosSurface::update(const Event& e) {
  check_in_geometry(e, geometry_);
  return update_unchecked(e.x, e.y);
}

std::size_t TosSurface::update_unchecked(int x, int y) noexcept {
  const int w = static_cast<int>(geometry_.width);
  const int h = static_cast<int>(geometry_.height);
  const int x0 = std::max(0, x - k_tos_);
  const int x1 = std::min(w - 1, x + k_tos_);
  const int y0 = std::max(0, y - k_tos_);
  const int y1 = std::min(h - 1, y + k_tos_);
  const auto threshold = static_cast<std::uint8_t>(t_tos_);
  const int n = x1 - x0 + 1;
  for (int yy = y0; yy <= y1; ++yy) {
    std::uint8_t* cell = grid_.row(yy).data() + x0;
    for (int i = 0; i < n; ++i) {
      // saturating decrement, then snap below the zero-threshold
      const std::uint8_t v = static_cast<std::uint8_t>(cell[i] - (cell[i] != 0));
      cell[i] = v < threshold ? 0 : v;
    }
  }
  grid_.at(x, y) = 255;
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(y1 - y0 + 1);
}

void TosSurface::assign(const Image8& image) {
  if (image.geometry() != geometry_) throw InvalidParameter("snapshot geometry mismatch");
  grid_ = image;
}

void SaeSurface::update(const Event& e) {
  check_in_geometry(e, geometry_);
  update_unchecked(e);
}

BinaryWindowSurface::BinaryWindowSurface(SensorGeometry geometry, Timestamp window)
    : geometry_(geometry), window_(window), stamp_(geometry, 0) {
  validate(geometry);
  if (window == 0) throw InvalidParameter("binary window must be > 0");
}

void BinaryWindowSurface::update(const Event& e) {
  check_in_geometry(e, geometry_);
  update_unchecked(e);
}

bool BinaryWindowSurface::read(int x, int y, Timestamp now) const {
  if (!geometry_.contains(x, y)) {
    throw GeometryViolation(
        fmt::format("cell ({}, {}) outside {}x{} sensor", x, y, geometry_.width, geometry_.height),
        0);
  }
  return read_unchecked(x, y, now);
}

Image8 BinaryWindowSurface::render(Timestamp now) const {
  Image8 out(geometry_, 0);
  for (int y = 0; y < static_cast<int>(geometry_.height); ++y) {
    for (int x = 0; x < static_cast<int>(geometry_.width); ++x) {
      out.at(x, y) = read_unchecked(x, y, now) ? 255 : 0;
    }
  }
  return out;
}

}  // namespace evc
