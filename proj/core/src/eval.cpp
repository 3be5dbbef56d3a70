#include "evcorner/eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evcorner/error.hpp"
#include "evcorner/io.hpp"
#include "text.hpp"

namespace evc {

using namespace detail;

GroundTruth binarize_ground_truth(std::vector<double> scores, double corner_fraction) {
  if (!(corner_fraction > 0.0 && corner_fraction < 1.0)) {
    throw InvalidParameter(fmt::format("corner_fraction must be in (0, 1), got {}", corner_fraction));
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw InvalidParameter(fmt::format("ground-truth score {} is NaN", i));
  }
  GroundTruth gt;
  gt.corner_fraction = corner_fraction;
  const std::size_t n = scores.size();
  gt.corner_count = static_cast<std::size_t>(std::llround(corner_fraction * static_cast<double>(n)));
  gt.is_corner.assign(n, 0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  for (std::size_t i = 0; i < gt.corner_count; ++i) gt.is_corner[order[i]] = 1;
  if (gt.corner_count > 0) {
    gt.cut_score = scores[order[gt.corner_count - 1]];
    gt.ties_at_cut = gt.corner_count < n && scores[order[gt.corner_count]] == gt.cut_score;
  }
  gt.scores = std::move(scores);
  return gt;
}

std::vector<double> read_gt_scores(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  LineReader lines(text);
  std::string_view line;
  if (!lines.next(line)) throw FormatError("empty file: missing header", 1);
  std::vector<std::string_view> head = split_fields(trim(line), ' ');
  head.erase(std::remove(head.begin(), head.end(), std::string_view{}), head.end());
  std::uint64_t declared = 0;
  if (head.size() != 5 || head[0] != "#" || head[1] != "evcorner" || head[2] != "v1" ||
      head[3] != "gtscores" || !parse_number(head[4], declared)) {
    throw FormatError("expected '# evcorner v1 gtscores <count>' header", 1);
  }
  std::vector<double> scores;
  scores.reserve(declared);
  while (lines.next(line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    double v = 0.0;
    if (!parse_number(line, v) || std::isnan(v)) {
      throw FormatError(fmt::format("bad score on line {}", lines.number()), lines.number());
    }
    scores.push_back(v);
  }
  if (scores.size() != declared) {
    throw FormatError(
        fmt::format("header declares {} scores, file holds {}", declared, scores.size()),
        lines.number());
  }
  return scores;
}

void write_gt_scores(std::span<const double> scores, const std::filesystem::path& path) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "# evcorner v1 gtscores {}\n", scores.size());
  for (double s : scores) fmt::format_to(std::back_inserter(buf), "{}\n", format_score(s));
  spit(path, std::string_view(buf.data(), buf.size()));
}

GroundTruth load_ground_truth(const std::filesystem::path& path, const EventStream& stream,
                              double corner_fraction) {
  std::vector<double> scores = read_gt_scores(path);
  if (scores.size() != stream.size()) {
    throw CountMismatch(fmt::format("'{}' has {} scores for {} events", path.string(),
                                    scores.size(), stream.size()));
  }
  return binarize_ground_truth(std::move(scores), corner_fraction);
}

PrCurve pr_curve(std::span<const SweepPoint> sweep, const GroundTruth& gt, std::string detector,
                 std::string dataset) {
  PrCurve curve{std::move(detector), std::move(dataset), {}};
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const auto& tags = sweep[k].tags;
    if (tags.size() != gt.is_corner.size()) {
      throw Misalignment(fmt::format("sweep point {} has {} tags, ground truth has {} events", k,
                                     tags.size(), gt.is_corner.size()));
    }
    PrPoint p;
    p.parameter = sweep[k].parameter;
    for (std::size_t i = 0; i < tags.size(); ++i) {
      const bool truth = gt.is_corner[i] != 0;
      if (tags[i].is_corner) {
        ++(truth ? p.tp : p.fp);
      } else if (truth) {
        ++p.fn;
      }
    }
    if (p.tp + p.fp > 0) p.precision = static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp);
    if (p.tp + p.fn > 0) p.recall = static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fn);
    curve.points.push_back(p);
  }
  return curve;
}

double precision_at_recall(const PrCurve& curve, double target_recall) {
  std::vector<const PrPoint*> defined;
  for (const auto& p : curve.points) {
    if (p.precision) defined.push_back(&p);
  }
  std::optional<double> exact;
  for (const PrPoint* p : defined) {
    if (p->recall == target_recall) exact = std::max(exact.value_or(0.0), *p->precision);
  }
  if (exact) return *exact;
  for (std::size_t i = 0; i + 1 < defined.size(); ++i) {
    const PrPoint& a = *defined[i];
    const PrPoint& b = *defined[i + 1];
    if ((a.recall - target_recall) * (b.recall - target_recall) < 0.0) {
      const double f = (target_recall - a.recall) / (b.recall - a.recall);
      return *a.precision + f * (*b.precision - *a.precision);
    }
  }
  throw RecallNotSpanned(fmt::format("curve '{}' on '{}' does not span recall {}", curve.detector,
                                     curve.dataset, target_recall));
}

double relative_improvement(double precision, double baseline_precision) {
  if (!(baseline_precision > 0.0)) {
    throw InvalidParameter("baseline precision must be positive");
  }
  return (precision - baseline_precision) / baseline_precision;
}

}  // namespace evc
