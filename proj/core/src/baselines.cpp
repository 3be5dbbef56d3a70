#include "evcorner/baselines.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <cctype>
#include <string>

#include "evcorner/error.hpp"

namespace evc {
namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t since_ns(Clock::time_point t0) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

template <std::size_t N>
void gather(const SaeSurface& sae, const std::array<RingOffset, N>& ring, int x, int y,
            Timestamp* out) noexcept {
  for (std::size_t i = 0; i < N; ++i) out[i] = sae.at(x + ring[i].dx, y + ring[i].dy);
}

// Rings reach 4 pixels out; events closer to the border are not classified.
bool ring_fits(const SensorGeometry& g, const Event& e) noexcept {
  constexpr int r = 4;
  return e.x >= r && e.y >= r && e.x + r < static_cast<int>(g.width) &&
         e.y + r < static_cast<int>(g.height);
}

void check_bounds(int lmin, int lmax, int n, std::string_view ring) {
  if (lmin < 1 || lmax < lmin || lmax >= n) {
    throw InvalidParameter(
        fmt::format("{} ring arc bounds [{}, {}] must satisfy 1 <= min <= max < {}", ring, lmin,
                    lmax, n));
  }
}

}  // namespace

void validate(const EHarrisConfig& config) {
  if (config.window == 0) throw InvalidParameter("eHarris window must be > 0");
  if (!std::isfinite(config.threshold_tr)) throw InvalidParameter("threshold_tr must be finite");
  validate(config.harris);
}

void validate(const ArcRingConfig& config) {
  if (config.inner_radius != 3 || config.outer_radius != 4) {
    throw InvalidParameter(fmt::format("ring radii are fixed at 3 and 4, got {} and {}",
                                       config.inner_radius, config.outer_radius));
  }
  check_bounds(config.inner_min, config.inner_max, static_cast<int>(kRing3.size()), "inner");
  check_bounds(config.outer_min, config.outer_max, static_cast<int>(kRing4.size()), "outer");
}

int fast_ring_arc(std::span<const Timestamp> ring, int lmin, int lmax) noexcept {
  const int n = static_cast<int>(ring.size());
  for (int i = 0; i < n; ++i) {
    for (int len = lmin; len <= lmax && len < n; ++len) {
      // arc ends must be newer than their outside neighbours
      if (ring[i] < ring[(i + n - 1) % n]) continue;
      if (ring[(i + len - 1) % n] < ring[(i + len) % n]) continue;
      Timestamp min_t = ring[i];
      for (int j = 1; j < len; ++j) min_t = std::min(min_t, ring[(i + j) % n]);
      bool newer = true;
      for (int j = len; j < n; ++j) {
        if (ring[(i + j) % n] >= min_t) {
          newer = false;
          break;
        }
      }
      if (newer) return len;
    }
  }
  return 0;
}

int arc_newest_segment(std::span<const Timestamp> ring, int lmin) noexcept {
  const int n = static_cast<int>(ring.size());
  if (n == 0) return 0;
  const int newest = static_cast<int>(std::max_element(ring.begin(), ring.end()) - ring.begin());
  int cw = (newest + 1) % n;
  int ccw = (newest + n - 1) % n;
  Timestamp min_t = ring[newest];
  int size = 1;
  const int take = std::min(lmin, n);
  for (int i = 1; i < take; ++i) {
    if (ring[cw] >= ring[ccw]) {
      min_t = std::min(min_t, ring[cw]);
      cw = (cw + 1) % n;
    } else {
      min_t = std::min(min_t, ring[ccw]);
      ccw = (ccw + n - 1) % n;
    }
    size = i + 1;
  }
  for (int i = take; i < n; ++i) {
    Timestamp t;
    if (ring[cw] >= ring[ccw]) {
      t = ring[cw];
      cw = (cw + 1) % n;
    } else {
      t = ring[ccw];
      ccw = (ccw + n - 1) % n;
    }
    if (t >= min_t) size = i + 1;
  }
  return size;
}

bool arc_ring_accepts(std::span<const Timestamp> ring, int lmin, int lmax) noexcept {
  const int n = static_cast<int>(ring.size());
  const int s = arc_newest_segment(ring, lmin);
  return (s >= lmin && s <= lmax) || (s >= n - lmax && s <= n - lmin);
}

EHarrisDetector::EHarrisDetector(SensorGeometry geometry, EHarrisConfig config)
    : geometry_(geometry), config_(config), kernel_(config.harris),
      surface_(geometry, config.window) {
  validate(config_);
  kernel_.check_size(geometry_);
}

void EHarrisDetector::process(std::span<const Event> batch, std::vector<CornerTag>& out) {
  const auto t0 = Clock::now();
  out.reserve(out.size() + batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Event& e = batch[i];
    check_in_geometry(e, geometry_, i);
    surface_.update_unchecked(e);
    const Timestamp now = e.t;
    const double score = kernel_.patch(
        [this, now](int px, int py) -> std::int32_t {
          return surface_.read_unchecked(px, py, now) ? 255 : 0;
        },
        geometry_, e.x, e.y);
    out.push_back({e, score > config_.threshold_tr, score});
  }
  counters_.events += batch.size();
  counters_.phase1_ns += since_ns(t0);
}

FastDetector::FastDetector(SensorGeometry geometry, ArcRingConfig config)
    : config_(config), sae_(geometry) {
  validate(geometry);
  validate(config_);
}

void FastDetector::process(std::span<const Event> batch, std::vector<CornerTag>& out) {
  const auto t0 = Clock::now();
  out.reserve(out.size() + batch.size());
  std::array<Timestamp, 16> inner{};
  std::array<Timestamp, 20> outer{};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Event& e = batch[i];
    check_in_geometry(e, sae_.geometry(), i);
    sae_.update_unchecked(e);
    int arc = 0;
    if (ring_fits(sae_.geometry(), e)) {
      gather(sae_, kRing3, e.x, e.y, inner.data());
      arc = fast_ring_arc(inner, config_.inner_min, config_.inner_max);
      if (arc > 0) {
        gather(sae_, kRing4, e.x, e.y, outer.data());
        if (fast_ring_arc(outer, config_.outer_min, config_.outer_max) == 0) arc = 0;
      }
    }
    out.push_back({e, arc > 0, static_cast<double>(arc)});
  }
  counters_.events += batch.size();
  counters_.phase1_ns += since_ns(t0);
}

ArcDetector::ArcDetector(SensorGeometry geometry, ArcRingConfig config)
    : config_(config), sae_(geometry) {
  validate(geometry);
  validate(config_);
}

void ArcDetector::process(std::span<const Event> batch, std::vector<CornerTag>& out) {
  const auto t0 = Clock::now();
  out.reserve(out.size() + batch.size());
  std::array<Timestamp, 16> inner{};
  std::array<Timestamp, 20> outer{};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Event& e = batch[i];
    check_in_geometry(e, sae_.geometry(), i);
    sae_.update_unchecked(e);
    bool corner = false;
    int segment = 0;
    if (ring_fits(sae_.geometry(), e)) {
      gather(sae_, kRing3, e.x, e.y, inner.data());
      corner = arc_ring_accepts(inner, config_.inner_min, config_.inner_max);
      if (corner) {
        segment = arc_newest_segment(inner, config_.inner_min);
        gather(sae_, kRing4, e.x, e.y, outer.data());
        corner = arc_ring_accepts(outer, config_.outer_min, config_.outer_max);
      }
    }
    out.push_back({e, corner, corner ? static_cast<double>(segment) : 0.0});
  }
  counters_.events += batch.size();
  counters_.phase1_ns += since_ns(t0);
}

namespace {

std::vector<CornerTag> run_once(Detector& detector, const EventStream& stream) {
  std::vector<CornerTag> tags;
  detector.process(stream.view(), tags);
  return tags;
}

}  // namespace

std::vector<CornerTag> eharris_detect(const EventStream& stream, const EHarrisConfig& config) {
  EHarrisDetector d(stream.geometry(), config);
  return run_once(d, stream);
}

std::vector<CornerTag> fast_detect(const EventStream& stream, const ArcRingConfig& config) {
  FastDetector d(stream.geometry(), config);
  return run_once(d, stream);
}

std::vector<CornerTag> arc_detect(const EventStream& stream, const ArcRingConfig& config) {
  ArcDetector d(stream.geometry(), config);
  return run_once(d, stream);
}

DetectorKind parse_detector_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "luvharris") return DetectorKind::luvharris;
  if (lower == "eharris") return DetectorKind::eharris;
  if (lower == "fast" || lower == "efast") return DetectorKind::fast;
  if (lower == "arc" || lower == "arc*") return DetectorKind::arc;
  throw InvalidParameter(
      fmt::format("unknown detector '{}' (expected luvharris, eharris, fast or arc)", name));
}

std::string_view to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::luvharris: return "luvharris";
    case DetectorKind::eharris: return "eharris";
    case DetectorKind::fast: return "fast";
    case DetectorKind::arc: return "arc";
  }
  return "unknown";
}

std::unique_ptr<Detector> make_detector(DetectorKind kind, const SensorGeometry& geometry,
                                        const DetectorSuite& suite) {
  switch (kind) {
    case DetectorKind::luvharris:
      return std::make_unique<LuvHarrisDetector>(geometry, suite.luvharris);
    case DetectorKind::eharris: return std::make_unique<EHarrisDetector>(geometry, suite.eharris);
    case DetectorKind::fast: return std::make_unique<FastDetector>(geometry, suite.arc);
    case DetectorKind::arc: return std::make_unique<ArcDetector>(geometry, suite.arc);
  }
  throw InvalidParameter("unknown detector kind");
}

std::vector<CornerTag> run_detector(DetectorKind kind, const EventStream& stream,
                                    const DetectorSuite& suite) {
  // luvHarris output depends on when the look-up is refreshed, so it runs
  // under the paced pipeline rather than as one batch.
  if (kind == DetectorKind::luvharris) return run_pipeline(stream, suite.luvharris).tags;
  auto detector = make_detector(kind, stream.geometry(), suite);
  return run_once(*detector, stream);
}

std::vector<SweepPoint> decision_parameter_sweep(DetectorKind kind, const DetectorSuite& suite,
                                                 const EventStream& stream, std::size_t n_points) {
  if (n_points < 2) throw InvalidParameter(fmt::format("n_points must be >= 2, got {}", n_points));
  std::vector<SweepPoint> sweep;

  if (kind == DetectorKind::luvharris || kind == DetectorKind::eharris) {
    const std::vector<CornerTag> base = run_detector(kind, stream, suite);
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& t : base) {
      if (t.score > 0.0) {
        hi = std::max(hi, t.score);
        lo = std::min(lo, t.score);
      }
    }
    if (hi <= 0.0) {
      hi = 1.0;
      lo = 1.0;
    }
    // Strictest accepts nothing; loosest accepts every positive response.
    lo *= 0.5;
    const double ratio = lo / hi;
    for (std::size_t i = 0; i < n_points; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(n_points - 1);
      const double tr = hi * std::pow(ratio, f);
      SweepPoint p{tr, base};
      for (auto& t : p.tags) t.is_corner = t.score > tr;
      sweep.push_back(std::move(p));
    }
    return sweep;
  }

  int last_inner = -1;
  int last_outer = -1;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double angle =
        90.0 + 90.0 * static_cast<double>(i) / static_cast<double>(n_points - 1);
    DetectorSuite s = suite;
    s.arc.inner_max = std::max(s.arc.inner_min, static_cast<int>(std::lround(angle / 22.5)));
    s.arc.outer_max = std::max(s.arc.outer_min, static_cast<int>(std::lround(angle / 18.0)));
    if (s.arc.inner_max == last_inner && s.arc.outer_max == last_outer) continue;
    last_inner = s.arc.inner_max;
    last_outer = s.arc.outer_max;
    sweep.push_back({angle, run_detector(kind, stream, s)});
  }
  return sweep;
}

}  // namespace evc
