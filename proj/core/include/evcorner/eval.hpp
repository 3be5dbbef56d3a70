#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evcorner/baselines.hpp"
#include "evcorner/event.hpp"

namespace evc {

// Per-event ground-truth corner scores, binarized so that the top
// `corner_fraction` of events (rounded to nearest) are corners. Ties at the
// cut are broken by event index, earlier first.
struct GroundTruth {
  std::vector<double> scores;
  double corner_fraction = 0.20;
  std::vector<std::uint8_t> is_corner;
  std::size_t corner_count = 0;
  double cut_score = 0.0;   // lowest score labelled corner
  bool ties_at_cut = false; // some non-corner shares cut_score
};

GroundTruth binarize_ground_truth(std::vector<double> scores, double corner_fraction = 0.20);

// Score file: "# evcorner v1 gtscores <count>" then one real per line.
std::vector<double> read_gt_scores(const std::filesystem::path& path);
void write_gt_scores(std::span<const double> scores, const std::filesystem::path& path);

// Throws CountMismatch when the file and the stream disagree on length.
GroundTruth load_ground_truth(const std::filesystem::path& path, const EventStream& stream,
                              double corner_fraction = 0.20);

struct PrPoint {
  double parameter = 0.0;
  std::optional<double> precision;  // empty when nothing was detected
  double recall = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

struct PrCurve {
  std::string detector;
  std::string dataset;
  std::vector<PrPoint> points;  // sweep order
};

// Throws Misalignment if any sweep point's tag count differs from the
// ground truth.
PrCurve pr_curve(std::span<const SweepPoint> sweep, const GroundTruth& gt,
                 std::string detector = {}, std::string dataset = {});

// Precision at `target_recall`, interpolating linearly between the
// bracketing points; among points at exactly the target recall the best
// precision wins. Throws RecallNotSpanned.
double precision_at_recall(const PrCurve& curve, double target_recall = 0.5);

// (p - p_baseline) / p_baseline
double relative_improvement(double precision, double baseline_precision);

}  // namespace evc
