#include "evcorner/bench.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "evcorner/error.hpp"

namespace evc {
namespace {

using Clock = std::chrono::steady_clock;

double us_since(Clock::time_point start, Clock::time_point now) {
  return std::chrono::duration<double, std::micro>(now - start).count();
}

struct Packet {
  std::size_t begin = 0;
  std::size_t end = 0;
  Timestamp stream_end = 0;  // relative to the first event
  double released_us = 0.0;
};

// Non-empty packets of `packet_us` stream time, in order.
std::vector<Packet> split_packets(std::span<const Event> events, Timestamp packet_us) {
  std::vector<Packet> packets;
  if (events.empty()) return packets;
  const Timestamp t0 = events.front().t;
  std::size_t i = 0;
  while (i < events.size()) {
    const Timestamp k = (events[i].t - t0) / packet_us;
    const Timestamp end_rel = (k + 1) * packet_us;
    std::size_t j = i;
    while (j < events.size() && events[j].t - t0 < end_rel) ++j;
    packets.push_back({i, j, end_rel, 0.0});
    i = j;
  }
  return packets;
}

class PacketQueue {
 public:
  explicit PacketQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(Packet p) {
    std::unique_lock lk(mu_);
    not_full_.wait(lk, [&] { return queue_.size() < capacity_; });
    queue_.push_back(p);
    not_empty_.notify_one();
  }

  void close() {
    std::lock_guard lk(mu_);
    closed_ = true;
    not_empty_.notify_one();
  }

  // Everything queued; empty once closed and drained.
  std::vector<Packet> drain() {
    std::unique_lock lk(mu_);
    not_empty_.wait(lk, [&] { return !queue_.empty() || closed_; });
    std::vector<Packet> out(queue_.begin(), queue_.end());
    queue_.clear();
    not_full_.notify_all();
    return out;
  }

 private:
  std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<Packet> queue_;
  std::size_t capacity_;
  bool closed_ = false;
};

std::vector<CornerTag>& scratch_tags(std::vector<CornerTag>& tags, std::size_t n) {
  tags.clear();
  tags.reserve(n);
  return tags;
}

}  // namespace

double DelayTrace::max_delay_us() const noexcept {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.delay_us);
  return m;
}

DelayTrace paced_replay(Detector& detector, const EventStream& stream,
                        const ReplayOptions& options) {
  if (options.packet_us == 0) throw InvalidParameter("packet_us must be > 0");
  if (options.queue_capacity == 0) throw InvalidParameter("queue_capacity must be > 0");
  DelayTrace trace;
  trace.packet_us = options.packet_us;
  const auto events = stream.view();
  const std::vector<Packet> packets = split_packets(events, options.packet_us);
  if (packets.empty()) return trace;
  trace.samples.reserve(packets.size());

  PacketQueue queue(options.queue_capacity);
  const auto start = Clock::now();
  std::jthread pacer([&] {
    for (Packet p : packets) {
      std::this_thread::sleep_until(start + std::chrono::microseconds(p.stream_end));
      p.released_us = us_since(start, Clock::now());
      queue.push(p);
    }
    queue.close();
  });

  std::vector<CornerTag> tags;
  while (true) {
    const std::vector<Packet> ready = queue.drain();
    if (ready.empty()) break;
    const std::size_t begin = ready.front().begin;
    const std::size_t end = ready.back().end;
    detector.process(events.subspan(begin, end - begin), scratch_tags(tags, end - begin));
    const double done = us_since(start, Clock::now());
    for (const Packet& p : ready) {
      const double delay = done - static_cast<double>(p.stream_end);
      trace.samples.push_back({p.stream_end, std::max(0.0, delay), p.released_us});
    }
  }
  return trace;
}

ThroughputResult measure_throughput(const DetectorFactory& factory, const EventStream& stream,
                                    const ThroughputOptions& options) {
  if (stream.size() < options.min_events) {
    throw StreamTooShort(fmt::format("throughput needs at least {} events, stream has {}",
                                     options.min_events, stream.size()));
  }
  if (options.runs < 1) throw InvalidParameter("runs must be >= 1");
  ThroughputResult result;
  std::vector<CornerTag> tags;
  for (int run = 0; run < options.runs; ++run) {
    double seconds = 0.0;
    std::size_t events = 0;
    while (seconds < options.min_seconds || events == 0) {
      auto detector = factory();
      scratch_tags(tags, stream.size());
      const auto t0 = Clock::now();
      detector->process(stream.view(), tags);
      seconds += std::chrono::duration<double>(Clock::now() - t0).count();
      events += stream.size();
    }
    result.runs_eps.push_back(static_cast<double>(events) / seconds);
  }
  std::vector<double> sorted = result.runs_eps;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  result.median_eps = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double sum = 0.0;
  for (double v : sorted) sum += v;
  result.mean_eps = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : sorted) ss += (v - result.mean_eps) * (v - result.mean_eps);
  result.stddev_eps = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return result;
}

namespace {

struct PacketRun {
  PhaseCounters counters;
  double wall_ns = 0.0;
};

PacketRun run_packets(const DetectorFactory& factory, const EventStream& stream,
                      Timestamp packet_us) {
  if (packet_us == 0) throw InvalidParameter("packet_us must be > 0");
  auto detector = factory();
  if (!detector->phase_counters()) {
    throw InstrumentationUnavailable(
        fmt::format("detector '{}' does not record phase counters", detector->name()));
  }
  const auto events = stream.view();
  const std::vector<Packet> packets = split_packets(events, packet_us);
  std::vector<CornerTag> tags;
  tags.reserve(stream.size());
  const auto t0 = Clock::now();
  for (const Packet& p : packets) detector->process(events.subspan(p.begin, p.end - p.begin), tags);
  PacketRun run;
  run.wall_ns = std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
  run.counters = *detector->phase_counters();
  return run;
}

}  // namespace

ThroughputModel fit_throughput_model(const DetectorFactory& factory, const EventStream& stream,
                                     Timestamp packet_us) {
  const PacketRun run = run_packets(factory, stream, packet_us);
  ThroughputModel m;
  m.events = run.counters.events;
  m.generations = run.counters.generations;
  m.measured_ns = run.wall_ns;
  m.q1_ns = m.events > 0 ? static_cast<double>(run.counters.phase1_ns) / m.events : 0.0;
  m.q2_ns = m.generations > 0 ? static_cast<double>(run.counters.phase2_ns) / m.generations : 0.0;
  return m;
}

ThroughputModel predict_throughput(const ThroughputModel& fitted, const DetectorFactory& factory,
                                   const EventStream& held_out, Timestamp packet_us) {
  const PacketRun run = run_packets(factory, held_out, packet_us);
  ThroughputModel m = fitted;
  m.events = run.counters.events;
  m.generations = run.counters.generations;
  m.measured_ns = run.wall_ns;
  return m;
}

void PassThroughDetector::process(std::span<const Event> batch, std::vector<CornerTag>& out) {
  const auto t0 = Clock::now();
  for (const Event& e : batch) out.push_back({e, false, 0.0});
  counters_.events += batch.size();
  counters_.phase1_ns += static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

}  // namespace evc
