#pragma once

#include <cstdint>
#include <vector>

#include "evcorner/event.hpp"
#include "evcorner/grid.hpp"

namespace evc {

struct HarrisParams {
  int block_size = 7;      // side of the box window aggregating gradient products
  int sobel_aperture = 5;  // odd, >= 3
  double kappa = 0.04;

  friend bool operator==(const HarrisParams&, const HarrisParams&) = default;
};

// Throws InvalidParameter when an invariant does not hold.
void validate(const HarrisParams& params);

// Reflect-101 border mapping (abcd|cba...); valid for any n >= 1.
constexpr int reflect101(int p, int n) noexcept {
  if (n == 1) return 0;
  while (p < 0 || p >= n) {
    if (p < 0) p = -p;
    if (p >= n) p = 2 * n - 2 - p;
  }
  return p;
}

// Precomputed Sobel kernels and response scaling for one HarrisParams.
//
// Derivatives are integer Sobel sums, and the windowed gradient products are
// accumulated as exact 64-bit integers; scaling to real values happens only
// in response(). The full-frame and per-pixel paths therefore produce
// bit-identical scores. The scale follows the usual convention for 8-bit
// input, 1 / (2^(aperture-1) * block_size * 255) per derivative, with
// products summed (not averaged) over the block.
class HarrisKernel {
 public:
  explicit HarrisKernel(const HarrisParams& params);

  const HarrisParams& params() const noexcept { return params_; }
  const std::vector<int>& smooth() const noexcept { return smooth_; }
  const std::vector<int>& deriv() const noexcept { return deriv_; }
  int sobel_radius() const noexcept { return params_.sobel_aperture / 2; }
  // Box window offsets are [box_lo, box_hi] inclusive.
  int box_lo() const noexcept { return -(params_.block_size / 2); }
  int box_hi() const noexcept { return params_.block_size - 1 - params_.block_size / 2; }
  double derivative_scale() const noexcept { return scale_; }

  double response(std::int64_t gxx, std::int64_t gxy, std::int64_t gyy) const noexcept {
    const double a = static_cast<double>(gxx) * scale2_;
    const double b = static_cast<double>(gxy) * scale2_;
    const double c = static_cast<double>(gyy) * scale2_;
    const double tr = a + c;
    return (a * c - b * b) - params_.kappa * tr * tr;
  }

  // Throws ImageTooSmall unless both sides are >= sobel_aperture.
  void check_size(const SensorGeometry& g) const;

  // Response at (x, y) evaluated from the local neighbourhood only.
  // `read(x, y)` returns the intensity of an in-range pixel.
  template <typename Reader>
  double patch(const Reader& read, const SensorGeometry& g, int x, int y) const;

  struct Workspace {
    std::vector<int> xmap, ymap, bxmap, bymap;   // reflected coordinates
    std::vector<int> row_tag;                    // source row held by each cache slot
    std::vector<std::int32_t> cache_d, cache_s;  // horizontal Sobel rows
    std::vector<std::int32_t> ix, iy;            // one row of derivatives
    std::vector<std::int64_t> prod;              // one row of products
    std::vector<std::int64_t> ring_h;            // horizontal box sums
    std::vector<std::int64_t> col;               // running vertical sums
  };

  // Full-frame response map. `out` is resized to the image geometry.
  void map(const Image8& image, ScoreMap& out, Workspace& ws) const;

 private:
  HarrisParams params_;
  std::vector<int> smooth_;
  std::vector<int> deriv_;
  double scale_ = 1.0;
  double scale2_ = 1.0;
};

template <typename Reader>
double HarrisKernel::patch(const Reader& read, const SensorGeometry& g, int x, int y) const {
  const int w = static_cast<int>(g.width);
  const int h = static_cast<int>(g.height);
  const int r = sobel_radius();
  const int n = params_.sobel_aperture;
  std::int64_t gxx = 0, gxy = 0, gyy = 0;
  for (int by = box_lo(); by <= box_hi(); ++by) {
    const int qy = reflect101(y + by, h);
    for (int bx = box_lo(); bx <= box_hi(); ++bx) {
      const int qx = reflect101(x + bx, w);
      std::int32_t dx = 0, dy = 0;
      for (int i = 0; i < n; ++i) {
        const int sy = reflect101(qy + i - r, h);
        std::int32_t acc_d = 0, acc_s = 0;
        for (int j = 0; j < n; ++j) {
          const std::int32_t v = read(reflect101(qx + j - r, w), sy);
          acc_d += deriv_[j] * v;
          acc_s += smooth_[j] * v;
        }
        dx += smooth_[i] * acc_d;
        dy += deriv_[i] * acc_s;
      }
      gxx += static_cast<std::int64_t>(dx) * dx;
      gxy += static_cast<std::int64_t>(dx) * dy;
      gyy += static_cast<std::int64_t>(dy) * dy;
    }
  }
  return response(gxx, gxy, gyy);
}

struct Derivatives {
  Grid<double> ix;
  Grid<double> iy;
};

// Scaled Sobel derivatives with reflect-101 borders. Throws ImageTooSmall.
Derivatives sobel_derivatives(const Image8& image, const HarrisParams& params);

// R = det(M) - kappa * tr(M)^2 at every pixel. Throws ImageTooSmall.
ScoreMap harris_response_map(const Image8& image, const HarrisParams& params);

// Same value as harris_response_map(image)[y][x], computed locally.
// Throws GeometryViolation or ImageTooSmall.
double harris_response_patch(const Image8& image, int x, int y, const HarrisParams& params);

}  // namespace evc
