#pragma once

#include <vector>

#include "evcorner/event.hpp"
#include "oracles/naive_harris.hpp"
#include "oracles/naive_tos.hpp"

namespace oracle {

struct IdealTag {
  bool corner;
  double score;
};

// Per event: apply the event to the surface, then evaluate the Harris
// response at the event pixel on the updated surface.
inline std::vector<IdealTag> ideal_harris_on_tos(const std::vector<evc::Event>& events, int w,
                                                 int h, int k, int t, const NaiveHarrisParams& p,
                                                 double threshold) {
  NaiveTos tos(w, h, k, t);
  const auto read = [&](int x, int y) { return double(tos.at(x, y)); };
  std::vector<IdealTag> out;
  out.reserve(events.size());
  for (const evc::Event& e : events) {
    tos.windowed_update(e.x, e.y);
    const double score = naive_harris_at(read, w, h, e.x, e.y, p);
    out.push_back({score > threshold, score});
  }
  return out;
}

}  // namespace oracle
