#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "evcorner/event.hpp"

namespace evc::synth {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Shapes are bright regions in their own frame; the frame origin follows the
// shape's trajectory. Pixel centres sit on integer coordinates.

// Convex polygon, vertices in either winding. Every vertex is a true corner.
struct Polygon {
  std::vector<Vec2> vertices;
};

// Wedge with apex at the origin: the points within opening/2 of the bisector
// direction. With `concave`, the bright region is the complement instead
// (a 360 - opening corner). The apex is a true corner.
struct Wedge {
  Vec2 bisector{-1.0, -1.0};
  double opening_deg = 90.0;
  bool concave = false;
};

// dot(p, normal) <= 0. No corners.
struct HalfPlane {
  Vec2 normal{1.0, 0.0};
};

// 0 <= dot(p, normal) <= width, normal unit length. No corners.
struct Stripe {
  Vec2 normal{1.0, 0.0};
  double width = 3.0;
};

using Shape = std::variant<Polygon, Wedge, HalfPlane, Stripe>;

struct MovingShape {
  Shape shape;
  Vec2 origin;    // position at the start of the scene
  Vec2 velocity;  // pixels per second
  // When set, the origin bounces inside [lo, hi] on each axis.
  bool bounce = false;
  Vec2 lo;
  Vec2 hi;
};

struct SecondaryWave {
  double probability = 0.0;  // chance that an edge event fires again
  Timestamp min_delay_us = 500;
  Timestamp max_delay_us = 3'000;
};

struct Scene {
  SensorGeometry geometry{64, 64};
  Timestamp start_us = 0;
  Timestamp duration_us = 50'000;
  std::vector<MovingShape> shapes;
  double noise_rate_eps = 0.0;  // uniformly placed noise events per second
  SecondaryWave secondary{};
  double max_step_px = 0.25;    // motion per simulation step
  std::uint64_t seed = 1;
};

struct Recording {
  EventStream stream;
  // Distance from each event to the nearest true corner at the event's
  // time; +inf when the scene has none.
  std::vector<double> corner_distance;
};

// Emits an event whenever a pixel centre crosses a shape boundary, timed by
// bisection within the simulation step; polarity is ON when the pixel turns
// bright. Noise and secondary-wave repeats are merged in time order.
Recording generate(const Scene& scene);

enum class Fixture { corner90, corner270, straight_edge, secondary_wave, salt_pepper };

inline constexpr Fixture kAllFixtures[] = {Fixture::corner90, Fixture::corner270,
                                           Fixture::straight_edge, Fixture::secondary_wave,
                                           Fixture::salt_pepper};

std::string_view to_string(Fixture fixture);
Fixture parse_fixture(std::string_view name);

// 64x64 scenes: a convex 90 degree corner and a concave 270 degree corner
// advancing apex-first along the diagonal, a straight edge, a 3 pixel bar
// whose edges fire a delayed second wave, and uniform noise.
Scene fixture_scene(Fixture fixture, std::uint64_t seed = 1);
Recording make_fixture(Fixture fixture, std::uint64_t seed = 1);

// Many bouncing rectangles of random size and velocity, plus noise.
Scene texture_scene(SensorGeometry geometry, Timestamp duration_us, std::size_t shape_count,
                    double speed_px_s, double noise_rate_eps, std::uint64_t seed);

// Uniformly random events at a constant mean rate.
EventStream random_stream(SensorGeometry geometry, std::size_t count, double rate_eps,
                          std::uint64_t seed);

struct RateSegment {
  Timestamp duration_us;
  double rate_eps;
};

// Re-times consecutive chunks of `base` so each segment has the requested
// event rate, preserving order and relative spacing inside each chunk.
// Throws InvalidParameter if base is too short.
EventStream retime(const EventStream& base, std::span<const RateSegment> segments);

// Ground-truth score from corner distance: exp(-d^2 / (2 sigma^2)).
std::vector<double> corner_scores(std::span<const double> corner_distance, double sigma = 1.5);

}  // namespace evc::synth
