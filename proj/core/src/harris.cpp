#include "evcorner/harris.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "evcorner/error.hpp"

namespace evc {
namespace {

// Row `n - 1` of Pascal's triangle.
std::vector<int> binomial(int n) {
  std::vector<int> row{1};
  for (int i = 1; i < n; ++i) {
    std::vector<int> next(row.size() + 1, 0);
    for (std::size_t k = 0; k < row.size(); ++k) {
      next[k] += row[k];
      next[k + 1] += row[k];
    }
    row = std::move(next);
  }
  return row;
}

std::vector<int> derivative_kernel(int aperture) {
  const std::vector<int> base = binomial(aperture - 2);
  std::vector<int> out(aperture, 0);
  // base convolved with [-1, 0, 1]
  for (std::size_t k = 0; k < base.size(); ++k) {
    out[k] -= base[k];
    out[k + 2] += base[k];
  }
  return out;
}

// Sliding sums of src[map[x + k]], k in [0, len), for x in [0, n).
void window_sums(const std::int64_t* src, const int* map, int n, int len, std::int64_t* dst) {
  std::int64_t s = 0;
  for (int k = 0; k < len; ++k) s += src[map[k]];
  dst[0] = s;
  for (int x = 1; x < n; ++x) {
    s += src[map[x + len - 1]] - src[map[x - 1]];
    dst[x] = s;
  }
}

// Horizontal derivative and smoothing passes over one source row.
void sobel_row(const HarrisKernel& k, const std::uint8_t* src, const std::vector<int>& xmap,
               int w, std::int32_t* rd, std::int32_t* rs) {
  const int r = k.sobel_radius();
  const int n = k.params().sobel_aperture;
  const int* de = k.deriv().data();
  const int* sm = k.smooth().data();
  auto border = [&](int x) {
    std::int32_t acc_d = 0, acc_s = 0;
    for (int j = 0; j < n; ++j) {
      const std::int32_t v = src[xmap[x + j]];
      acc_d += de[j] * v;
      acc_s += sm[j] * v;
    }
    rd[x] = acc_d;
    rs[x] = acc_s;
  };
  for (int x = 0; x < r; ++x) border(x);
  for (int x = r; x < w - r; ++x) {
    const std::uint8_t* p = src + x - r;
    std::int32_t acc_d = 0, acc_s = 0;
    for (int j = 0; j < n; ++j) {
      acc_d += de[j] * p[j];
      acc_s += sm[j] * p[j];
    }
    rd[x] = acc_d;
    rs[x] = acc_s;
  }
  for (int x = w - r; x < w; ++x) border(x);
}

void prepare_derivatives(const HarrisKernel& k, const Image8& image, HarrisKernel::Workspace& ws) {
  const int w = static_cast<int>(image.width());
  const int h = static_cast<int>(image.height());
  const int r = k.sobel_radius();
  const int n = k.params().sobel_aperture;
  const auto uw = static_cast<std::size_t>(w);
  ws.xmap.resize(static_cast<std::size_t>(w + 2 * r));
  ws.ymap.resize(static_cast<std::size_t>(h + 2 * r));
  for (int i = 0; i < w + 2 * r; ++i) ws.xmap[i] = reflect101(i - r, w);
  for (int i = 0; i < h + 2 * r; ++i) ws.ymap[i] = reflect101(i - r, h);
  const auto slots = static_cast<std::size_t>(n + 1);
  ws.row_tag.assign(slots, -1);
  ws.cache_d.resize(slots * uw);
  ws.cache_s.resize(slots * uw);
  ws.ix.resize(uw);
  ws.iy.resize(uw);
}

// Integer derivatives of source row `y` into ws.ix / ws.iy. Horizontal
// Sobel rows are cached; a miss evicts the slot farthest from `y`.
void derivative_row(const HarrisKernel& k, const Image8& image, int y, HarrisKernel::Workspace& ws) {
  const int w = static_cast<int>(image.width());
  const int n = k.params().sobel_aperture;
  const auto uw = static_cast<std::size_t>(w);
  const auto& sm = k.smooth();
  const auto& de = k.deriv();
  std::int32_t* ix = ws.ix.data();
  std::int32_t* iy = ws.iy.data();
  std::fill(ix, ix + w, 0);
  std::fill(iy, iy + w, 0);
  for (int i = 0; i < n; ++i) {
    const int src = ws.ymap[y + i];
    std::size_t slot = 0;
    int worst = -1;
    bool hit = false;
    for (std::size_t s = 0; s < ws.row_tag.size(); ++s) {
      const int tag = ws.row_tag[s];
      if (tag == src) {
        slot = s;
        hit = true;
        break;
      }
      const int dist = tag < 0 ? std::numeric_limits<int>::max() : std::abs(tag - y);
      if (dist > worst) {
        worst = dist;
        slot = s;
      }
    }
    const std::int32_t* rd = ws.cache_d.data() + slot * uw;
    const std::int32_t* rs = ws.cache_s.data() + slot * uw;
    if (!hit) {
      sobel_row(k, image.row(src).data(), ws.xmap, w, ws.cache_d.data() + slot * uw,
                ws.cache_s.data() + slot * uw);
      ws.row_tag[slot] = src;
    }
    const std::int32_t cs = sm[i];
    const std::int32_t cd = de[i];
    for (int x = 0; x < w; ++x) {
      ix[x] += cs * rd[x];
      iy[x] += cd * rs[x];
    }
  }
}

}  // namespace

void validate(const HarrisParams& params) {
  if (params.sobel_aperture != 3 && params.sobel_aperture != 5 && params.sobel_aperture != 7) {
    throw InvalidParameter(
        fmt::format("sobel_aperture must be 3, 5 or 7, got {}", params.sobel_aperture));
  }
  if (params.block_size < 1 || params.block_size > 63) {
    throw InvalidParameter(fmt::format("block_size must be in [1, 63], got {}", params.block_size));
  }
  if (!(params.kappa > 0.0) || !std::isfinite(params.kappa)) {
    throw InvalidParameter(fmt::format("kappa must be positive and finite, got {}", params.kappa));
  }
}

HarrisKernel::HarrisKernel(const HarrisParams& params) : params_(params) {
  validate(params);
  smooth_ = binomial(params.sobel_aperture);
  deriv_ = derivative_kernel(params.sobel_aperture);
  scale_ = 1.0 / (static_cast<double>(1 << (params.sobel_aperture - 1)) * params.block_size * 255.0);
  scale2_ = scale_ * scale_;
}

void HarrisKernel::check_size(const SensorGeometry& g) const {
  const auto a = static_cast<std::uint32_t>(params_.sobel_aperture);
  if (g.width < a || g.height < a) {
    throw ImageTooSmall(fmt::format("image {}x{} smaller than the {}x{} Sobel aperture", g.width,
                                    g.height, a, a));
  }
}

void HarrisKernel::map(const Image8& image, ScoreMap& out, Workspace& ws) const {
  check_size(image.geometry());
  prepare_derivatives(*this, image, ws);

  const int w = static_cast<int>(image.width());
  const int h = static_cast<int>(image.height());
  const auto uw = static_cast<std::size_t>(w);
  const int len = params_.block_size;

  ws.bxmap.resize(static_cast<std::size_t>(w + len - 1));
  ws.bymap.resize(static_cast<std::size_t>(h + len - 1));
  for (int i = 0; i < w + len - 1; ++i) ws.bxmap[i] = reflect101(i + box_lo(), w);
  for (int i = 0; i < h + len - 1; ++i) ws.bymap[i] = reflect101(i + box_lo(), h);

  // Ring of `len` horizontally summed product rows (xx, xy, yy planes per
  // slot), indexed by position in the reflected row sequence.
  const std::size_t slot = 3 * uw;
  ws.ring_h.resize(static_cast<std::size_t>(len) * slot);
  ws.prod.resize(3 * uw);
  ws.col.assign(3 * uw, 0);
  auto ring = [&](int j) { return ws.ring_h.data() + static_cast<std::size_t>(j % len) * slot; };
  auto fill_row = [&](int j) {
    derivative_row(*this, image, ws.bymap[j], ws);
    const std::int32_t* ix = ws.ix.data();
    const std::int32_t* iy = ws.iy.data();
    std::int64_t* pxx = ws.prod.data();
    std::int64_t* pxy = pxx + uw;
    std::int64_t* pyy = pxy + uw;
    for (int x = 0; x < w; ++x) {
      const std::int64_t dx = ix[x];
      const std::int64_t dy = iy[x];
      pxx[x] = dx * dx;
      pxy[x] = dx * dy;
      pyy[x] = dy * dy;
    }
    std::int64_t* dst = ring(j);
    window_sums(pxx, ws.bxmap.data(), w, len, dst);
    window_sums(pxy, ws.bxmap.data(), w, len, dst + uw);
    window_sums(pyy, ws.bxmap.data(), w, len, dst + 2 * uw);
  };
  auto accumulate = [&](int j, int sign) {
    const std::int64_t* src = ring(j);
    std::int64_t* col = ws.col.data();
    for (std::size_t i = 0; i < slot; ++i) col[i] += sign * src[i];
  };

  if (out.width() != image.width() || out.height() != image.height()) {
    out = ScoreMap(image.geometry(), 0.0);
  }
  for (int j = 0; j < len - 1; ++j) {
    fill_row(j);
    accumulate(j, 1);
  }
  for (int y = 0; y < h; ++y) {
    const int j = y + len - 1;
    if (y > 0) accumulate(y - 1, -1);  // same slot as j
    fill_row(j);
    accumulate(j, 1);
    const std::int64_t* gxx = ws.col.data();
    const std::int64_t* gxy = gxx + uw;
    const std::int64_t* gyy = gxy + uw;
    double* dst = out.row(y).data();
    for (int x = 0; x < w; ++x) dst[x] = response(gxx[x], gxy[x], gyy[x]);
  }
}

Derivatives sobel_derivatives(const Image8& image, const HarrisParams& params) {
  const HarrisKernel kernel(params);
  kernel.check_size(image.geometry());
  HarrisKernel::Workspace ws;
  prepare_derivatives(kernel, image, ws);
  Derivatives d{Grid<double>(image.geometry(), 0.0), Grid<double>(image.geometry(), 0.0)};
  const double s = kernel.derivative_scale();
  for (int y = 0; y < static_cast<int>(image.height()); ++y) {
    derivative_row(kernel, image, y, ws);
    auto dx = d.ix.row(y);
    auto dy = d.iy.row(y);
    for (std::size_t x = 0; x < dx.size(); ++x) {
      dx[x] = ws.ix[x] * s;
      dy[x] = ws.iy[x] * s;
    }
  }
  return d;
}

ScoreMap harris_response_map(const Image8& image, const HarrisParams& params) {
  const HarrisKernel kernel(params);
  HarrisKernel::Workspace ws;
  ScoreMap out;
  kernel.map(image, out, ws);
  return out;
}

double harris_response_patch(const Image8& image, int x, int y, const HarrisParams& params) {
  const HarrisKernel kernel(params);
  kernel.check_size(image.geometry());
  if (!image.geometry().contains(x, y)) {
    throw GeometryViolation(fmt::format("pixel ({}, {}) outside {}x{} image", x, y, image.width(),
                                        image.height()),
                            0);
  }
  return kernel.patch([&image](int px, int py) { return static_cast<std::int32_t>(image.at(px, py)); },
                      image.geometry(), x, y);
}

}  // namespace evc
