#include "evcorner/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "evcorner/error.hpp"
#include "evcorner/grid.hpp"

namespace evc::synth {
namespace {

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }
Vec2 unit(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? Vec2{a.x / n, a.y / n} : Vec2{1.0, 0.0};
}
Vec2 rotate(Vec2 a, double deg) {
  const double r = deg * std::numbers::pi / 180.0;
  return {a.x * std::cos(r) - a.y * std::sin(r), a.x * std::sin(r) + a.y * std::cos(r)};
}

// Triangle wave folding x into [0, len].
double fold(double x, double len) {
  if (len <= 0.0) return 0.0;
  double m = std::fmod(x, 2.0 * len);
  if (m < 0.0) m += 2.0 * len;
  return m <= len ? m : 2.0 * len - m;
}

Vec2 origin_at(const MovingShape& s, double t) {
  const Vec2 p = s.origin + t * s.velocity;
  if (!s.bounce) return p;
  return {s.lo.x + fold(p.x - s.lo.x, s.hi.x - s.lo.x), s.lo.y + fold(p.y - s.lo.y, s.hi.y - s.lo.y)};
}

struct InsideTest {
  // Vertices in counter-clockwise order (see ccw()).
  bool operator()(const Polygon& poly, Vec2 p) const {
    const auto& v = poly.vertices;
    if (v.size() < 3) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2 a = v[i];
      const Vec2 b = v[(i + 1) % v.size()];
      if (cross(b - a, p - a) < 0.0) return false;
    }
    return true;
  }
  bool operator()(const Wedge& w, Vec2 p) const {
    const double n = norm(p);
    const double half = 0.5 * w.opening_deg * std::numbers::pi / 180.0;
    const bool in = n == 0.0 || dot(p, unit(w.bisector)) >= n * std::cos(half);
    return in != w.concave;
  }
  bool operator()(const HalfPlane& h, Vec2 p) const { return dot(p, h.normal) <= 0.0; }
  bool operator()(const Stripe& s, Vec2 p) const {
    const double d = dot(p, unit(s.normal));
    return d >= 0.0 && d <= s.width;
  }
};

MovingShape ccw(MovingShape s) {
  if (auto* poly = std::get_if<Polygon>(&s.shape)) {
    auto& v = poly->vertices;
    double area = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) area += cross(v[i], v[(i + 1) % v.size()]);
    if (area < 0.0) std::reverse(v.begin(), v.end());
  }
  return s;
}

bool inside(const MovingShape& s, Vec2 pixel, double t) {
  return std::visit([&](const auto& shape) { return InsideTest{}(shape, pixel - origin_at(s, t)); },
                    s.shape);
}

// Pixel rectangle that can change state while the shape moves from t0 to t1.
struct Box {
  int x0, y0, x1, y1;
};

Box candidate_box(const MovingShape& s, double t0, double t1, const SensorGeometry& g) {
  const Box full{0, 0, static_cast<int>(g.width) - 1, static_cast<int>(g.height) - 1};
  const auto* poly = std::get_if<Polygon>(&s.shape);
  if (poly == nullptr || poly->vertices.empty()) return full;
  double lx = std::numeric_limits<double>::infinity(), ly = lx, hx = -lx, hy = -lx;
  for (double t : {t0, t1}) {
    const Vec2 o = origin_at(s, t);
    for (const Vec2& v : poly->vertices) {
      lx = std::min(lx, o.x + v.x);
      hx = std::max(hx, o.x + v.x);
      ly = std::min(ly, o.y + v.y);
      hy = std::max(hy, o.y + v.y);
    }
  }
  Box b{static_cast<int>(std::floor(lx)) - 1, static_cast<int>(std::floor(ly)) - 1,
        static_cast<int>(std::ceil(hx)) + 1, static_cast<int>(std::ceil(hy)) + 1};
  b.x0 = std::max(b.x0, full.x0);
  b.y0 = std::max(b.y0, full.y0);
  b.x1 = std::min(b.x1, full.x1);
  b.y1 = std::min(b.y1, full.y1);
  return b;
}

std::vector<Vec2> corners_at(const Scene& scene, double t) {
  std::vector<Vec2> out;
  for (const auto& s : scene.shapes) {
    const Vec2 o = origin_at(s, t);
    if (const auto* poly = std::get_if<Polygon>(&s.shape)) {
      for (const Vec2& v : poly->vertices) out.push_back(o + v);
    } else if (std::holds_alternative<Wedge>(s.shape)) {
      out.push_back(o);
    }
  }
  return out;
}

double max_speed(const Scene& scene) {
  double v = 0.0;
  for (const auto& s : scene.shapes) v = std::max(v, norm(s.velocity));
  return v;
}

MovingShape moving(Shape shape, Vec2 origin, Vec2 velocity) {
  MovingShape m;
  m.shape = std::move(shape);
  m.origin = origin;
  m.velocity = velocity;
  return m;
}

Event make_event(double t_us, int x, int y, bool p) {
  return {static_cast<Timestamp>(std::llround(t_us)), static_cast<std::uint16_t>(x),
          static_cast<std::uint16_t>(y), p};
}

}  // namespace

Recording generate(const Scene& scene) {
  validate(scene.geometry);
  if (!(scene.max_step_px > 0.0)) throw InvalidParameter("max_step_px must be positive");
  if (scene.secondary.min_delay_us > scene.secondary.max_delay_us) {
    throw InvalidParameter("secondary wave delay range is empty");
  }
  std::mt19937_64 rng(scene.seed);
  std::vector<Event> events;
  const double duration_s = static_cast<double>(scene.duration_us) * 1e-6;
  const double start_us = static_cast<double>(scene.start_us);

  const double speed = max_speed(scene);
  if (speed > 0.0 && duration_s > 0.0) {
    const double dt = scene.max_step_px / speed;
    const auto steps = static_cast<std::size_t>(std::ceil(duration_s / dt));
    const double step = duration_s / static_cast<double>(steps);
    const int iters = std::max(
        1, static_cast<int>(std::ceil(std::log2(std::max(2.0, step * 1e6 / 0.25)))));
    std::bernoulli_distribution repeat(std::clamp(scene.secondary.probability, 0.0, 1.0));
    std::uniform_int_distribution<Timestamp> delay(scene.secondary.min_delay_us,
                                                   scene.secondary.max_delay_us);
    const SensorGeometry& g = scene.geometry;
    for (const auto& original : scene.shapes) {
      const MovingShape shape = ccw(original);
      // State of every pixel at the start of the current step.
      Grid<std::uint8_t> state(g, 0);
      for (int y = 0; y < static_cast<int>(g.height); ++y) {
        for (int x = 0; x < static_cast<int>(g.width); ++x) {
          state.at(x, y) = inside(shape, {static_cast<double>(x), static_cast<double>(y)}, 0.0);
        }
      }
      for (std::size_t k = 0; k < steps; ++k) {
        const double t0 = step * static_cast<double>(k);
        const double t1 = k + 1 == steps ? duration_s : t0 + step;
        const Box b = candidate_box(shape, t0, t1, g);
        for (int y = b.y0; y <= b.y1; ++y) {
          for (int x = b.x0; x <= b.x1; ++x) {
            const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
            const bool before = state.at(x, y) != 0;
            const bool after = inside(shape, p, t1);
            if (before == after) continue;
            state.at(x, y) = after;
            double lo = t0, hi = t1;
            for (int i = 0; i < iters; ++i) {
              const double mid = 0.5 * (lo + hi);
              (inside(shape, p, mid) == before ? lo : hi) = mid;
            }
            const double t_us = start_us + hi * 1e6;
            events.push_back(make_event(t_us, x, y, after));
            if (scene.secondary.probability > 0.0 && repeat(rng)) {
              events.push_back(make_event(t_us + static_cast<double>(delay(rng)), x, y, after));
            }
          }
        }
      }
    }
  }

  if (scene.noise_rate_eps > 0.0 && duration_s > 0.0) {
    std::poisson_distribution<std::uint64_t> count(scene.noise_rate_eps * duration_s);
    std::uniform_real_distribution<double> when(0.0, static_cast<double>(scene.duration_us));
    std::uniform_int_distribution<int> xs(0, static_cast<int>(scene.geometry.width) - 1);
    std::uniform_int_distribution<int> ys(0, static_cast<int>(scene.geometry.height) - 1);
    std::bernoulli_distribution pol(0.5);
    const std::uint64_t n = count(rng);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double t = start_us + when(rng);
      const int x = xs(rng);
      const int y = ys(rng);
      events.push_back(make_event(t, x, y, pol(rng)));
    }
  }

  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });

  Recording rec;
  rec.corner_distance.reserve(events.size());
  for (const Event& e : events) {
    const double t = (static_cast<double>(e.t) - start_us) * 1e-6;
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& c : corners_at(scene, t)) {
      best = std::min(best, norm(Vec2{static_cast<double>(e.x), static_cast<double>(e.y)} - c));
    }
    rec.corner_distance.push_back(best);
  }
  rec.stream = EventStream::trusted(scene.geometry, std::move(events));
  return rec;
}

std::string_view to_string(Fixture fixture) {
  switch (fixture) {
    case Fixture::corner90: return "corner90";
    case Fixture::corner270: return "corner270";
    case Fixture::straight_edge: return "straight_edge";
    case Fixture::secondary_wave: return "secondary_wave";
    case Fixture::salt_pepper: return "salt_pepper";
  }
  return "unknown";
}

Fixture parse_fixture(std::string_view name) {
  for (Fixture f : kAllFixtures) {
    if (to_string(f) == name) return f;
  }
  throw InvalidParameter(fmt::format("unknown fixture '{}'", name));
}

Scene fixture_scene(Fixture fixture, std::uint64_t seed) {
  Scene s;
  s.geometry = {64, 64};
  s.start_us = 1'000;
  s.duration_us = 50'000;
  s.seed = seed;
  constexpr double kSpeed = 600.0;  // px/s
  // Slight rotation keeps edges off the pixel grid so no two pixels of an
  // edge fire at the same instant.
  constexpr double kTilt = 10.0;
  switch (fixture) {
    case Fixture::corner90: {
      const Vec2 back = rotate(unit({-1.0, -1.0}), kTilt);
      s.shapes.push_back(moving(Wedge{back, 90.0, false}, {16.0, 16.0}, -kSpeed * back));
      break;
    }
    case Fixture::corner270: {
      const Vec2 ahead = rotate(unit({1.0, 1.0}), kTilt);
      s.shapes.push_back(moving(Wedge{ahead, 90.0, true}, {16.0, 16.0}, kSpeed * ahead));
      break;
    }
    case Fixture::straight_edge: {
      const Vec2 n = rotate({1.0, 0.0}, kTilt);
      s.shapes.push_back(moving(HalfPlane{n}, {14.0, 32.0}, kSpeed * n));
      break;
    }
    case Fixture::secondary_wave: {
      const Vec2 n = rotate({1.0, 0.0}, kTilt);
      s.shapes.push_back(moving(Stripe{n, 3.0}, {10.0, 32.0}, kSpeed * n));
      s.secondary = {0.6, 500, 3'000};
      break;
    }
    case Fixture::salt_pepper:
      s.noise_rate_eps = 40'000.0;
      break;
  }
  return s;
}

Recording make_fixture(Fixture fixture, std::uint64_t seed) {
  return generate(fixture_scene(fixture, seed));
}

Scene texture_scene(SensorGeometry geometry, Timestamp duration_us, std::size_t shape_count,
                    double speed_px_s, double noise_rate_eps, std::uint64_t seed) {
  validate(geometry);
  Scene s;
  s.geometry = geometry;
  s.start_us = 1'000;
  s.duration_us = duration_us;
  s.noise_rate_eps = noise_rate_eps;
  s.seed = seed;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const double w = geometry.width - 1.0;
  const double h = geometry.height - 1.0;
  std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h);
  const double max_side = std::max(4.0, std::min(w, h) / 6.0);
  std::uniform_real_distribution<double> side(4.0, max_side);
  std::uniform_real_distribution<double> angle(0.0, 360.0);
  for (std::size_t i = 0; i < shape_count; ++i) {
    const double a = side(rng) / 2.0;
    const double b = side(rng) / 2.0;
    const double rot = angle(rng);
    Polygon rect;
    for (Vec2 v : {Vec2{-a, -b}, Vec2{a, -b}, Vec2{a, b}, Vec2{-a, b}}) {
      rect.vertices.push_back(rotate(v, rot));
    }
    const Vec2 dir = rotate({1.0, 0.0}, angle(rng));
    MovingShape m = moving(rect, {ux(rng), uy(rng)}, speed_px_s * dir);
    m.bounce = true;
    m.lo = {0.0, 0.0};
    m.hi = {w, h};
    s.shapes.push_back(std::move(m));
  }
  return s;
}

EventStream random_stream(SensorGeometry geometry, std::size_t count, double rate_eps,
                          std::uint64_t seed) {
  validate(geometry);
  if (!(rate_eps > 0.0)) throw InvalidParameter("rate_eps must be positive");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(rate_eps / 1e6);
  std::uniform_int_distribution<int> xs(0, static_cast<int>(geometry.width) - 1);
  std::uniform_int_distribution<int> ys(0, static_cast<int>(geometry.height) - 1);
  std::bernoulli_distribution pol(0.5);
  std::vector<Event> events;
  events.reserve(count);
  double t = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    t += gap(rng);
    const int x = xs(rng);
    const int y = ys(rng);
    events.push_back(make_event(std::floor(t), x, y, pol(rng)));
  }
  return EventStream::trusted(geometry, std::move(events));
}

EventStream retime(const EventStream& base, std::span<const RateSegment> segments) {
  const auto src = base.view();
  std::vector<Event> out;
  std::size_t next = 0;
  Timestamp seg_start = src.empty() ? 0 : src.front().t;
  for (const RateSegment& seg : segments) {
    if (seg.rate_eps < 0.0) throw InvalidParameter("segment rate must be >= 0");
    const auto n = static_cast<std::size_t>(
        std::llround(seg.rate_eps * static_cast<double>(seg.duration_us) * 1e-6));
    if (next + n > src.size()) {
      throw InvalidParameter(fmt::format("base stream has {} events, segments need at least {}",
                                         src.size(), next + n));
    }
    if (n > 0) {
      const double first = static_cast<double>(src[next].t);
      const double span = static_cast<double>(src[next + n - 1].t) - first;
      // The chunk fills [seg_start, seg_start + duration * (n - 1) / n].
      const double target = static_cast<double>(seg.duration_us) * static_cast<double>(n - 1) /
                            static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        Event e = src[next + i];
        const double rel = span > 0.0 ? (static_cast<double>(e.t) - first) / span
                                       : static_cast<double>(i) / static_cast<double>(n);
        e.t = seg_start + static_cast<Timestamp>(std::floor(rel * target));
        out.push_back(e);
      }
    }
    next += n;
    seg_start += seg.duration_us;
  }
  return EventStream::trusted(base.geometry(), std::move(out));
}

std::vector<double> corner_scores(std::span<const double> corner_distance, double sigma) {
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  std::vector<double> out;
  out.reserve(corner_distance.size());
  for (double d : corner_distance) {
    out.push_back(std::isfinite(d) ? std::exp(-d * d / (2.0 * sigma * sigma)) : 0.0);
  }
  return out;
}

}  // namespace evc::synth
