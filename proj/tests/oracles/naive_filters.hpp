#pragma once

#include <cstdlib>
#include <vector>

#include "evcorner/event.hpp"

namespace oracle {

// Keeps an event unless the most recent kept event at its pixel is less
// than `period` older. Rescans the kept prefix for every event.
inline std::vector<evc::Event> refractory(const std::vector<evc::Event>& in,
                                          evc::Timestamp period) {
  std::vector<evc::Event> kept;
  for (const evc::Event& e : in) {
    bool drop = false;
    for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
      if (it->x == e.x && it->y == e.y) {
        drop = e.t - it->t < period;
        break;
      }
    }
    if (!drop) kept.push_back(e);
  }
  return kept;
}

// Keeps an event iff some earlier input event at a different pixel within
// Chebyshev distance r is at most `window` older.
inline std::vector<evc::Event> salt_pepper(const std::vector<evc::Event>& in,
                                           evc::Timestamp window, int r) {
  std::vector<evc::Event> kept;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const evc::Event& e = in[i];
    bool support = false;
    for (std::size_t j = 0; j < i && !support; ++j) {
      const evc::Event& o = in[j];
      const int dx = std::abs(int(o.x) - int(e.x));
      const int dy = std::abs(int(o.y) - int(e.y));
      const bool same = dx == 0 && dy == 0;
      support = !same && dx <= r && dy <= r && e.t - o.t <= window;
    }
    if (support) kept.push_back(e);
  }
  return kept;
}

}  // namespace oracle
