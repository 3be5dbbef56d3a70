#include "evcorner/luvharris.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <stop_token>
#include <thread>

#include "evcorner/error.hpp"

namespace evc {
namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point from, Clock::time_point to) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(to - from).count());
}

}  // namespace

PipelineMode parse_pipeline_mode(std::string_view name) {
  if (name == "alternating") return PipelineMode::alternating;
  if (name == "dual_thread" || name == "dual") return PipelineMode::dual_thread;
  throw InvalidParameter(fmt::format("unknown pipeline mode '{}'", name));
}

std::string_view to_string(PipelineMode mode) {
  return mode == PipelineMode::alternating ? "alternating" : "dual_thread";
}

void validate(const LuvHarrisConfig& config) {
  if (config.k_tos < 1) throw InvalidParameter(fmt::format("k_tos must be >= 1, got {}", config.k_tos));
  if (config.t_tos > 255) throw InvalidParameter(fmt::format("t_tos must be <= 255, got {}", config.t_tos));
  if (!std::isfinite(config.threshold_tr)) throw InvalidParameter("threshold_tr must be finite");
  if (config.lock_chunk < 1) throw InvalidParameter("lock_chunk must be >= 1");
  validate(config.harris);
}

HarrisLut initial_lut(const SensorGeometry& geometry) {
  HarrisLut lut;
  lut.scores = ScoreMap(geometry, 0.0);
  return lut;
}

CornerTag classify_event(const Event& e, const HarrisLut& lut, double threshold_tr) {
  check_in_geometry(e, lut.scores.geometry());
  const double score = lut.scores.at(e.x, e.y);
  return {e, score > threshold_tr, score};
}

HarrisLut regenerate_lut(const TosSurface& snapshot, const HarrisParams& params,
                         Timestamp latest_event_t, std::uint64_t previous_generation) {
  HarrisLut lut;
  lut.scores = harris_response_map(snapshot.image(), params);
  lut.generated_at = latest_event_t;
  lut.generation_index = previous_generation + 1;
  return lut;
}

std::size_t StalenessHistogram::bucket_of(Timestamp staleness) noexcept {
  const auto b = static_cast<std::size_t>(std::bit_width(staleness));
  return std::min(b, kBuckets - 1);
}

std::uint64_t StalenessHistogram::total() const noexcept {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

struct LuvHarrisDetector::Impl {
  SensorGeometry geometry;
  LuvHarrisConfig config;
  HarrisKernel kernel;
  TosSurface tos;

  // Guards everything below in dual-thread mode.
  mutable std::mutex mu;
  std::condition_variable_any cv;
  std::shared_ptr<const HarrisLut> lut;
  Timestamp latest_t = 0;
  std::uint64_t applied = 0;            // events folded into the TOS
  std::uint64_t published_applied = 0;  // events covered by the published table
  PipelineStats stats;
  PhaseCounters counters;
  std::uint64_t events_on_current = 0;
  std::uint64_t current_generation = 0;

  // Owned by whichever thread regenerates.
  std::shared_ptr<HarrisLut> spare;
  HarrisKernel::Workspace ws;
  Image8 snapshot_image;

  std::jthread harris_thread;

  Impl(SensorGeometry g, LuvHarrisConfig c)
      : geometry(g), config(std::move(c)), kernel(config.harris),
        tos(g, config.k_tos, config.t_tos), lut(std::make_shared<HarrisLut>(initial_lut(g))) {
    kernel.check_size(g);
  }

  // Builds a table from `image` into a recycled buffer.
  std::shared_ptr<HarrisLut> build(const Image8& image, Timestamp t, std::uint64_t generation) {
    std::shared_ptr<HarrisLut> next =
        (spare && spare.use_count() == 1) ? std::move(spare) : std::make_shared<HarrisLut>();
    kernel.map(image, next->scores, ws);
    next->generated_at = t;
    next->generation_index = generation;
    return next;
  }

  // Caller holds mu (or is single-threaded).
  void publish(std::shared_ptr<HarrisLut> next) {
    spare = std::const_pointer_cast<HarrisLut>(std::exchange(lut, std::move(next)));
    ++stats.lut_generations;
  }

  void note_generation(std::uint64_t generation) {
    if (generation != current_generation) {
      stats.max_batch_size = std::max(stats.max_batch_size, events_on_current);
      events_on_current = 0;
      current_generation = generation;
    }
  }

  // Phase 1 for one event against `table`.
  CornerTag apply(const Event& e, std::size_t index, const HarrisLut& table) {
    check_in_geometry(e, geometry, index);
    stats.tos_cells_visited += tos.update_unchecked(e.x, e.y);
    latest_t = e.t;
    ++applied;
    const double score = table.scores.at(e.x, e.y);
    stats.t_err.add(e.t >= table.generated_at ? e.t - table.generated_at : 0);
    ++stats.events_processed;
    ++events_on_current;
    return {e, score > config.threshold_tr, score};
  }

  std::uint64_t regenerate_inline() {
    const auto t0 = Clock::now();
    auto next = build(tos.image(), latest_t, lut->generation_index + 1);
    publish(std::move(next));
    published_applied = applied;
    const std::uint64_t ns = elapsed_ns(t0, Clock::now());
    ++counters.generations;
    counters.phase2_ns += ns;
    return ns;
  }

  void process_alternating(std::span<const Event> batch, std::vector<CornerTag>& out) {
    const auto t0 = Clock::now();
    std::uint64_t regen_ns = 0;
    const bool per_event = config.hooks.regenerate_per_event;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Event& e = batch[i];
      if (per_event) {
        check_in_geometry(e, geometry, i);
        stats.tos_cells_visited += tos.update_unchecked(e.x, e.y);
        latest_t = e.t;
        ++applied;
        regen_ns += regenerate_inline();
        note_generation(lut->generation_index);
        const double score = lut->scores.at(e.x, e.y);
        stats.t_err.add(0);
        ++stats.events_processed;
        ++events_on_current;
        out.push_back({e, score > config.threshold_tr, score});
      } else {
        note_generation(lut->generation_index);
        out.push_back(apply(e, i, *lut));
      }
    }
    if (!batch.empty() && !per_event) regen_ns += regenerate_inline();
    counters.events += batch.size();
    counters.phase1_ns += elapsed_ns(t0, Clock::now()) - regen_ns;
  }

  void process_dual(std::span<const Event> batch, std::vector<CornerTag>& out) {
    const auto t0 = Clock::now();
    const std::size_t chunk = config.lock_chunk;
    for (std::size_t begin = 0; begin < batch.size(); begin += chunk) {
      const std::size_t end = std::min(batch.size(), begin + chunk);
      {
        std::lock_guard lk(mu);
        const std::shared_ptr<const HarrisLut> table = lut;
        note_generation(table->generation_index);
        for (std::size_t i = begin; i < end; ++i) out.push_back(apply(batch[i], i, *table));
      }
      cv.notify_all();
    }
    std::lock_guard lk(mu);
    counters.events += batch.size();
    counters.phase1_ns += elapsed_ns(t0, Clock::now());
  }

  void harris_loop(std::stop_token stop) {
    std::uint64_t snap_applied = 0;
    while (true) {
      Timestamp snap_t = 0;
      std::uint64_t generation = 0;
      Clock::time_point t0;
      {
        std::unique_lock lk(mu);
        if (!cv.wait(lk, stop, [&] { return applied != snap_applied; })) return;
        t0 = Clock::now();
        snapshot_image = tos.image();
        snap_t = latest_t;
        snap_applied = applied;
        generation = lut->generation_index + 1;
      }
      auto next = build(snapshot_image, snap_t, generation);
      {
        std::lock_guard lk(mu);
        publish(std::move(next));
        published_applied = snap_applied;
        ++counters.generations;
        counters.phase2_ns += elapsed_ns(t0, Clock::now());
      }
      cv.notify_all();
    }
  }
};

LuvHarrisDetector::LuvHarrisDetector(SensorGeometry geometry, LuvHarrisConfig config) {
  validate(geometry);
  validate(config);
  impl_ = std::make_unique<Impl>(geometry, std::move(config));
  if (impl_->config.mode == PipelineMode::dual_thread) {
    impl_->harris_thread = std::jthread([impl = impl_.get()](std::stop_token st) { impl->harris_loop(st); });
  }
}

LuvHarrisDetector::~LuvHarrisDetector() {
  if (impl_ && impl_->harris_thread.joinable()) {
    impl_->harris_thread.request_stop();
    impl_->cv.notify_all();
    impl_->harris_thread.join();
  }
}

void LuvHarrisDetector::process(std::span<const Event> batch, std::vector<CornerTag>& out) {
  out.reserve(out.size() + batch.size());
  if (impl_->config.mode == PipelineMode::dual_thread) {
    impl_->process_dual(batch, out);
  } else {
    impl_->process_alternating(batch, out);
  }
}

std::optional<PhaseCounters> LuvHarrisDetector::phase_counters() const {
  std::lock_guard lk(impl_->mu);
  return impl_->counters;
}

void LuvHarrisDetector::synchronize() {
  if (impl_->config.mode != PipelineMode::dual_thread) return;
  std::unique_lock lk(impl_->mu);
  impl_->cv.wait(lk, [this] { return impl_->published_applied == impl_->applied; });
}

PipelineStats LuvHarrisDetector::stats() const {
  std::lock_guard lk(impl_->mu);
  PipelineStats s = impl_->stats;
  s.max_batch_size = std::max(s.max_batch_size, impl_->events_on_current);
  return s;
}

TosSurface LuvHarrisDetector::snapshot() const {
  std::lock_guard lk(impl_->mu);
  return impl_->tos;
}

std::shared_ptr<const HarrisLut> LuvHarrisDetector::current_lut() const {
  std::lock_guard lk(impl_->mu);
  return impl_->lut;
}

const LuvHarrisConfig& LuvHarrisDetector::config() const noexcept { return impl_->config; }

PipelineResult run_pipeline(const EventStream& stream, const LuvHarrisConfig& config) {
  LuvHarrisDetector detector(stream.geometry(), config);
  PipelineResult result;
  result.tags.reserve(stream.size());
  const auto events = stream.view();

  if (config.hooks.force_batch_size > 0 && config.mode == PipelineMode::alternating) {
    const std::size_t b = config.hooks.force_batch_size;
    for (std::size_t i = 0; i < events.size(); i += b) {
      detector.process(events.subspan(i, std::min(b, events.size() - i)), result.tags);
    }
  } else if (config.hooks.regenerate_per_event && config.mode == PipelineMode::alternating) {
    detector.process(events, result.tags);
  } else if (config.mode == PipelineMode::dual_thread) {
    // Real-time replay: the Harris thread keeps running while the event
    // thread waits for the next event to be produced.
    const auto start = Clock::now();
    const Timestamp t0 = events.empty() ? 0 : events.front().t;
    std::size_t i = 0;
    while (i < events.size()) {
      const auto now_us = static_cast<Timestamp>(
          std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count());
      auto first = events.begin() + static_cast<std::ptrdiff_t>(i);
      auto last = std::upper_bound(first, events.end(), t0 + now_us,
                                   [](Timestamp c, const Event& e) { return c < e.t; });
      if (first == last) {
        std::this_thread::sleep_until(start + std::chrono::microseconds(first->t - t0));
        continue;
      }
      const auto n = static_cast<std::size_t>(last - first);
      detector.process(events.subspan(i, n), result.tags);
      i += n;
    }
  } else {
    // Virtual clock in stream microseconds, advanced by processing time;
    // idle time is skipped since nothing runs between batches.
    std::size_t i = 0;
    double clock = events.empty() ? 0.0 : static_cast<double>(events.front().t);
    while (i < events.size()) {
      auto first = events.begin() + static_cast<std::ptrdiff_t>(i);
      auto last = std::upper_bound(first, events.end(), clock,
                                   [](double c, const Event& e) { return c < static_cast<double>(e.t); });
      if (first == last) {
        clock = static_cast<double>(first->t);
        continue;
      }
      const auto t0 = Clock::now();
      const auto n = static_cast<std::size_t>(last - first);
      detector.process(events.subspan(i, n), result.tags);
      i += n;
      clock += static_cast<double>(elapsed_ns(t0, Clock::now())) / 1000.0;
    }
  }
  detector.synchronize();
  result.stats = detector.stats();
  return result;
}

}  // namespace evc
