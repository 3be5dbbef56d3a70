#include "evcorner/event.hpp"

#include <fmt/format.h>

#include "evcorner/error.hpp"

namespace evc {

void validate(const SensorGeometry& geometry) {
  if (geometry.width < 1 || geometry.height < 1) {
    throw InvalidParameter(
        fmt::format("sensor geometry {}x{} must be at least 1x1", geometry.width, geometry.height));
  }
}

void check_in_geometry(const Event& e, const SensorGeometry& geometry, std::size_t index) {
  if (e.x >= geometry.width || e.y >= geometry.height) {
    throw GeometryViolation(fmt::format("event {} at ({}, {}) outside {}x{} sensor", index, e.x,
                                        e.y, geometry.width, geometry.height),
                            index);
  }
}

EventStream::EventStream(SensorGeometry geometry, std::vector<Event> events)
    : geometry_(geometry), events_(std::move(events)) {
  validate(geometry_);
  for (std::size_t i = 0; i < events_.size(); ++i) {
    check_in_geometry(events_[i], geometry_, i);
    if (i > 0 && events_[i].t < events_[i - 1].t) {
      throw TimestampRegression(fmt::format("event {} at t={} precedes previous t={}", i,
                                            events_[i].t, events_[i - 1].t),
                                i);
    }
  }
}

EventStream EventStream::trusted(SensorGeometry geometry, std::vector<Event> events) {
  EventStream s;
  s.geometry_ = geometry;
  s.events_ = std::move(events);
  return s;
}

Timestamp EventStream::span_us() const noexcept {
  if (events_.size() < 2) return 0;
  return events_.back().t - events_.front().t;
}

}  // namespace evc
