#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evcorner/event.hpp"

namespace evc {

// Wall-clock cost split used by the throughput model: per-event work
// (phase 1) and event-independent work such as look-up regeneration
// (phase 2).
struct PhaseCounters {
  std::uint64_t events = 0;           // V
  std::uint64_t phase1_ns = 0;
  std::uint64_t generations = 0;      // W
  std::uint64_t phase2_ns = 0;
};

// Common streaming interface. process() receives every event that is
// pending at the time of the call and appends exactly one tag per event,
// in input order.
class Detector {
 public:
  virtual ~Detector() = default;

  virtual std::string_view name() const = 0;
  virtual void process(std::span<const Event> batch, std::vector<CornerTag>& out) = 0;

  // Phase timing, when the detector records it.
  virtual std::optional<PhaseCounters> phase_counters() const { return std::nullopt; }
};

}  // namespace evc
