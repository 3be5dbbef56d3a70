#include "evcorner/filters.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "evcorner/error.hpp"
#include "evcorner/grid.hpp"

namespace evc {

void validate(const FilterConfig& config) {
  if (config.sp_neighborhood < 0) {
    throw InvalidParameter(
        fmt::format("sp_neighborhood must be >= 0, got {}", config.sp_neighborhood));
  }
}

EventStream refractory_filter(const EventStream& stream, Timestamp period) {
  if (period == 0) return stream;
  // last retained time + 1, 0 = none yet
  Grid<Timestamp> last(stream.geometry(), 0);
  std::vector<Event> kept;
  kept.reserve(stream.size());
  for (const Event& e : stream.events()) {
    Timestamp& slot = last.at(e.x, e.y);
    if (slot != 0 && e.t - (slot - 1) < period) continue;
    slot = e.t + 1;
    kept.push_back(e);
  }
  return EventStream::trusted(stream.geometry(), std::move(kept));
}

EventStream sp_filter(const EventStream& stream, Timestamp window, int neighborhood) {
  if (neighborhood < 0) throw InvalidParameter("sp neighborhood must be >= 0");
  const SensorGeometry& g = stream.geometry();
  const int w = static_cast<int>(g.width);
  const int h = static_cast<int>(g.height);
  Grid<Timestamp> last(g, 0);  // last raw event time + 1
  std::vector<Event> kept;
  kept.reserve(stream.size());
  for (const Event& e : stream.events()) {
    const int x0 = std::max(0, e.x - neighborhood);
    const int x1 = std::min(w - 1, e.x + neighborhood);
    const int y0 = std::max(0, e.y - neighborhood);
    const int y1 = std::min(h - 1, e.y + neighborhood);
    bool supported = false;
    for (int y = y0; y <= y1 && !supported; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (x == e.x && y == e.y) continue;
        const Timestamp s = last.at(x, y);
        if (s != 0 && e.t - (s - 1) <= window) {
          supported = true;
          break;
        }
      }
    }
    last.at(e.x, e.y) = e.t + 1;
    if (supported) kept.push_back(e);
  }
  return EventStream::trusted(g, std::move(kept));
}

EventStream apply_filters(const EventStream& stream, const FilterConfig& config) {
  validate(config);
  EventStream out = refractory_filter(stream, config.refractory);
  if (config.sp_window > 0) out = sp_filter(out, config.sp_window, config.sp_neighborhood);
  return out;
}

}  // namespace evc
