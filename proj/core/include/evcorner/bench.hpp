#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "evcorner/detector.hpp"
#include "evcorner/event.hpp"

namespace evc {

struct DelaySample {
  // Times are relative to the first event (stream) and to the start of the
  // replay (wall clock).
  Timestamp stream_time = 0;  // end of the packet
  double delay_us = 0.0;      // completion wall time minus stream_time, clamped at 0
  double released_us = 0.0;   // wall time the pacer queued the packet
};

struct DelayTrace {
  std::vector<DelaySample> samples;
  Timestamp packet_us = 1'000;
  double max_delay_us() const noexcept;
};

struct ReplayOptions {
  Timestamp packet_us = 1'000;
  std::size_t queue_capacity = 1 << 16;  // packets; the pacer blocks when full
};

// Streams packets of `packet_us` stream time to the detector no earlier than
// their stream time (relative to the first event), from a pacer thread
// through a bounded queue. The detector side drains every queued packet per
// call, so a slow detector sees growing batches. Nothing is dropped.
DelayTrace paced_replay(Detector& detector, const EventStream& stream,
                        const ReplayOptions& options = {});

using DetectorFactory = std::function<std::unique_ptr<Detector>()>;

struct ThroughputOptions {
  int runs = 5;
  double min_seconds = 1.0;       // per run; the stream is repeated until reached
  std::size_t min_events = 100'000;
};

struct ThroughputResult {
  double median_eps = 0.0;
  double mean_eps = 0.0;
  double stddev_eps = 0.0;
  std::vector<double> runs_eps;
};

// Maximum event rate: each run builds a fresh detector and hands it the
// whole stream at once (every event pending), timing process() only.
// Throws StreamTooShort if the stream has fewer than min_events events.
ThroughputResult measure_throughput(const DetectorFactory& factory, const EventStream& stream,
                                    const ThroughputOptions& options = {});

// P = q1 * V + q2 * W, with measured per-event and per-generation costs.
struct ThroughputModel {
  double q1_ns = 0.0;  // per event
  double q2_ns = 0.0;  // per look-up generation
  std::uint64_t events = 0;       // V
  std::uint64_t generations = 0;  // W
  double measured_ns = 0.0;       // wall time of the run the counts come from

  double predicted_ns() const noexcept {
    return q1_ns * static_cast<double>(events) + q2_ns * static_cast<double>(generations);
  }
};

// Feeds the stream packet by packet (packet_us of stream time per call) as
// fast as possible and reads the detector's phase counters. Throws
// InstrumentationUnavailable for detectors that do not record them.
ThroughputModel fit_throughput_model(const DetectorFactory& factory, const EventStream& stream,
                                     Timestamp packet_us = 1'000);

// Applies fitted costs to a run over another stream: V, W and measured_ns
// come from that run, q1/q2 from `fitted`.
ThroughputModel predict_throughput(const ThroughputModel& fitted, const DetectorFactory& factory,
                                   const EventStream& held_out, Timestamp packet_us = 1'000);

// Tags nothing; records phase-1 time only.
class PassThroughDetector final : public Detector {
 public:
  std::string_view name() const override { return "pass-through"; }
  void process(std::span<const Event> batch, std::vector<CornerTag>& out) override;
  std::optional<PhaseCounters> phase_counters() const override { return counters_; }

 private:
  PhaseCounters counters_{};
};

}  // namespace evc
