#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "evcorner/detector.hpp"
#include "evcorner/event.hpp"
#include "evcorner/harris.hpp"
#include "evcorner/luvharris.hpp"
#include "evcorner/surfaces.hpp"

namespace evc {

// eHarris: Harris evaluated per event on a sliding-window binary image.
struct EHarrisConfig {
  Timestamp window = 10'000;
  HarrisParams harris{};
  double threshold_tr = 0.5;
};

void validate(const EHarrisConfig& config);

// Arc acceptance bounds for the radius-3 (16 pixel) and radius-4 (20 pixel)
// Bresenham rings. Defaults are the published eFAST/Arc* values.
struct ArcRingConfig {
  int inner_radius = 3;
  int outer_radius = 4;
  int inner_min = 3;
  int inner_max = 6;
  int outer_min = 4;
  int outer_max = 8;
};

void validate(const ArcRingConfig& config);

struct RingOffset {
  int dx;
  int dy;
};

inline constexpr std::array<RingOffset, 16> kRing3{{
    {0, 3}, {1, 3}, {2, 2}, {3, 1}, {3, 0}, {3, -1}, {2, -2}, {1, -3},
    {0, -3}, {-1, -3}, {-2, -2}, {-3, -1}, {-3, 0}, {-3, 1}, {-2, 2}, {-1, 3}}};

inline constexpr std::array<RingOffset, 20> kRing4{{
    {0, 4}, {1, 4}, {2, 3}, {3, 2}, {4, 1}, {4, 0}, {4, -1}, {3, -2}, {2, -3}, {1, -4},
    {0, -4}, {-1, -4}, {-2, -3}, {-3, -2}, {-4, -1}, {-4, 0}, {-4, 1}, {-3, 2}, {-2, 3}, {-1, 4}}};

// eFAST ring test: some contiguous arc of length in [lmin, lmax] holds
// timestamps strictly newer than every other element of the ring. Scans
// start positions, then lengths; returns the first accepted length, 0 if
// none.
int fast_ring_arc(std::span<const Timestamp> ring, int lmin, int lmax) noexcept;

// Arc* ring test: grows the newest segment greedily from the newest
// element, always taking the newer of its two neighbours. The first lmin
// elements are taken unconditionally; the segment then extends to the last
// traversed element that is not older than the oldest of those lmin.
// Returns the segment length.
int arc_newest_segment(std::span<const Timestamp> ring, int lmin) noexcept;

// Arc* acceptance: segment length in [lmin, lmax] (convex corner) or in
// [N - lmax, N - lmin] (concave corner).
bool arc_ring_accepts(std::span<const Timestamp> ring, int lmin, int lmax) noexcept;

class EHarrisDetector final : public Detector {
 public:
  EHarrisDetector(SensorGeometry geometry, EHarrisConfig config);
  std::string_view name() const override { return "eHarris"; }
  void process(std::span<const Event> batch, std::vector<CornerTag>& out) override;
  std::optional<PhaseCounters> phase_counters() const override { return counters_; }

 private:
  SensorGeometry geometry_;
  EHarrisConfig config_;
  HarrisKernel kernel_;
  BinaryWindowSurface surface_;
  PhaseCounters counters_{};
};

class FastDetector final : public Detector {
 public:
  FastDetector(SensorGeometry geometry, ArcRingConfig config);
  std::string_view name() const override { return "FAST"; }
  void process(std::span<const Event> batch, std::vector<CornerTag>& out) override;
  std::optional<PhaseCounters> phase_counters() const override { return counters_; }

 private:
  ArcRingConfig config_;
  SaeSurface sae_;
  PhaseCounters counters_{};
};

class ArcDetector final : public Detector {
 public:
  ArcDetector(SensorGeometry geometry, ArcRingConfig config);
  std::string_view name() const override { return "ARC"; }
  void process(std::span<const Event> batch, std::vector<CornerTag>& out) override;
  std::optional<PhaseCounters> phase_counters() const override { return counters_; }

 private:
  ArcRingConfig config_;
  SaeSurface sae_;
  PhaseCounters counters_{};
};

std::vector<CornerTag> eharris_detect(const EventStream& stream, const EHarrisConfig& config);
std::vector<CornerTag> fast_detect(const EventStream& stream, const ArcRingConfig& config);
std::vector<CornerTag> arc_detect(const EventStream& stream, const ArcRingConfig& config);

enum class DetectorKind { luvharris, eharris, fast, arc };

DetectorKind parse_detector_kind(std::string_view name);
std::string_view to_string(DetectorKind kind);

struct DetectorSuite {
  LuvHarrisConfig luvharris{};
  EHarrisConfig eharris{};
  ArcRingConfig arc{};
};

std::unique_ptr<Detector> make_detector(DetectorKind kind, const SensorGeometry& geometry,
                                        const DetectorSuite& suite);

// Runs the detector once over the whole stream.
std::vector<CornerTag> run_detector(DetectorKind kind, const EventStream& stream,
                                    const DetectorSuite& suite);

struct SweepPoint {
  double parameter;  // T_R for Harris detectors, max arc angle (deg) for arc detectors
  std::vector<CornerTag> tags;
};

// Tag sets across the detector's decision parameter, ordered from the
// strictest to the loosest setting. Harris detectors run once and are
// re-thresholded at n_points log-spaced T_R values; arc detectors re-run
// with the maximum arc angle stepped from 90 to 180 degrees (duplicate
// integer bounds collapse, so fewer than n_points may be returned).
// Throws InvalidParameter for n_points < 2.
std::vector<SweepPoint> decision_parameter_sweep(DetectorKind kind, const DetectorSuite& suite,
                                                 const EventStream& stream, std::size_t n_points);

}  // namespace evc
