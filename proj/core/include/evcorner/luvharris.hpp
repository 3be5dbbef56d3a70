#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "evcorner/detector.hpp"
#include "evcorner/event.hpp"
#include "evcorner/grid.hpp"
#include "evcorner/harris.hpp"
#include "evcorner/surfaces.hpp"

namespace evc {

enum class PipelineMode { alternating, dual_thread };

PipelineMode parse_pipeline_mode(std::string_view name);
std::string_view to_string(PipelineMode mode);

// Hooks that make the pipeline deterministic for oracle tests. Production
// runs leave both at their defaults.
struct LuvHarrisTestHooks {
  // Alternating mode: phase 1 consumes exactly this many events before each
  // regeneration instead of everything pending. 0 disables.
  std::size_t force_batch_size = 0;
  // Alternating mode: regenerate after each TOS update and before that
  // event's look-up, so every event sees a table built from a surface that
  // already includes it.
  bool regenerate_per_event = false;
};

struct LuvHarrisConfig {
  int k_tos = 3;
  int t_tos = -1;  // < 0 selects 4 * k_tos
  HarrisParams harris{};
  double threshold_tr = 0.5;
  PipelineMode mode = PipelineMode::alternating;
  // Dual-thread mode: events applied per hold of the surface lock.
  std::size_t lock_chunk = 256;
  LuvHarrisTestHooks hooks{};
};

void validate(const LuvHarrisConfig& config);

// Full-frame Harris scores of a TOS snapshot.
struct HarrisLut {
  ScoreMap scores;
  Timestamp generated_at = 0;          // time of the last event in the snapshot
  std::uint64_t generation_index = 0;  // 0 is the all-zero cold-start table
};

HarrisLut initial_lut(const SensorGeometry& geometry);

// Constant-time look-up. Throws GeometryViolation.
CornerTag classify_event(const Event& e, const HarrisLut& lut, double threshold_tr);

HarrisLut regenerate_lut(const TosSurface& snapshot, const HarrisParams& params,
                         Timestamp latest_event_t, std::uint64_t previous_generation);

// Histogram of look-up staleness, v_t - L_t in microseconds. Bucket 0 holds
// zero; bucket b >= 1 holds [2^(b-1), 2^b).
struct StalenessHistogram {
  static constexpr std::size_t kBuckets = 42;
  std::array<std::uint64_t, kBuckets> counts{};

  static std::size_t bucket_of(Timestamp staleness) noexcept;
  void add(Timestamp staleness) noexcept { ++counts[bucket_of(staleness)]; }
  std::uint64_t total() const noexcept;
};

struct PipelineStats {
  std::uint64_t events_processed = 0;
  std::uint64_t lut_generations = 0;
  std::uint64_t max_batch_size = 0;  // most events classified by one table
  StalenessHistogram t_err{};
  std::uint64_t tos_cells_visited = 0;
};

// luvHarris as a streaming detector.
//
// Alternating mode: each process() call is one cycle. Phase 1 updates the
// TOS and classifies every event of the batch against the current table;
// phase 2 then regenerates the table from the updated surface.
//
// Dual-thread mode: process() runs phase 1 only, while a background thread
// repeatedly snapshots the surface (under a lock held between whole events)
// and publishes a fresh table by pointer swap.
class LuvHarrisDetector final : public Detector {
 public:
  LuvHarrisDetector(SensorGeometry geometry, LuvHarrisConfig config);
  ~LuvHarrisDetector() override;

  LuvHarrisDetector(const LuvHarrisDetector&) = delete;
  LuvHarrisDetector& operator=(const LuvHarrisDetector&) = delete;

  std::string_view name() const override { return "luvHarris"; }
  void process(std::span<const Event> batch, std::vector<CornerTag>& out) override;
  std::optional<PhaseCounters> phase_counters() const override;

  // Dual-thread: blocks until a table covering every applied event is
  // published. Alternating: no-op.
  void synchronize();

  PipelineStats stats() const;
  TosSurface snapshot() const;
  std::shared_ptr<const HarrisLut> current_lut() const;
  const LuvHarrisConfig& config() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct PipelineResult {
  std::vector<CornerTag> tags;
  PipelineStats stats;
};

// Runs a recorded stream through luvHarris as if it were arriving live;
// each cycle consumes every event whose timestamp has been reached.
// Alternating mode uses a virtual clock that advances with the wall time
// spent processing and jumps to the next event when the detector catches
// up. Dual-thread mode replays in real time, so the background thread keeps
// working while the event side waits. With hooks.force_batch_size set,
// batches are fixed instead.
PipelineResult run_pipeline(const EventStream& stream, const LuvHarrisConfig& config);

}  // namespace evc
