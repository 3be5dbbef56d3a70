#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace evc {

// Microseconds since the start of the recording.
using Timestamp = std::uint64_t;

struct Event {
  Timestamp t = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  bool p = false;  // polarity, ON == true

  friend bool operator==(const Event&, const Event&) = default;
};

struct SensorGeometry {
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && static_cast<std::uint32_t>(x) < width &&
           static_cast<std::uint32_t>(y) < height;
  }
  std::size_t area() const noexcept {
    return static_cast<std::size_t>(width) * height;
  }

  friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

// Throws InvalidParameter unless width and height are both >= 1.
void validate(const SensorGeometry& geometry);

// Throws GeometryViolation if the event falls outside the sensor.
void check_in_geometry(const Event& e, const SensorGeometry& geometry,
                       std::size_t index = 0);

class EventStream {
 public:
  EventStream() = default;

  // Validates the whole sequence; throws GeometryViolation or
  // TimestampRegression with the index of the first offending event.
  EventStream(SensorGeometry geometry, std::vector<Event> events);

  // Skips validation; for producers that construct valid data by design.
  static EventStream trusted(SensorGeometry geometry, std::vector<Event> events);

  const SensorGeometry& geometry() const noexcept { return geometry_; }
  const std::vector<Event>& events() const noexcept { return events_; }
  std::span<const Event> view() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  // Stream time covered, last.t - first.t; zero for fewer than two events.
  Timestamp span_us() const noexcept;

  friend bool operator==(const EventStream&, const EventStream&) = default;

 private:
  SensorGeometry geometry_{};
  std::vector<Event> events_;
};

struct CornerTag {
  Event event;
  bool is_corner = false;
  double score = 0.0;

  friend bool operator==(const CornerTag&, const CornerTag&) = default;
};

}  // namespace evc
