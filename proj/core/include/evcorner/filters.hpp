#pragma once

#include "evcorner/event.hpp"

namespace evc {

struct FilterConfig {
  Timestamp refractory = 5'000;  // 0 disables
  Timestamp sp_window = 10'000;  // 0 disables (in apply_filters)
  int sp_neighborhood = 1;       // Chebyshev radius
};

void validate(const FilterConfig& config);

// Drops an event iff the last retained event at the same pixel is less than
// `period` microseconds older. Polarity is ignored.
EventStream refractory_filter(const EventStream& stream, Timestamp period);

// Salt-and-pepper removal: keeps an event iff an earlier event (in stream
// order) at another pixel within Chebyshev distance `neighborhood` occurred
// at most `window` microseconds before it. Every input event supports its
// neighbours, whether or not it is itself retained.
EventStream sp_filter(const EventStream& stream, Timestamp window, int neighborhood);

// Refractory period first, then salt-and-pepper; a zero period/window skips
// that stage.
EventStream apply_filters(const EventStream& stream, const FilterConfig& config);

}  // namespace evc
