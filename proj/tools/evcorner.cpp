#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evcorner/baselines.hpp"
#include "evcorner/bench.hpp"
#include "evcorner/config.hpp"
#include "evcorner/error.hpp"
#include "evcorner/eval.hpp"
#include "evcorner/filters.hpp"
#include "evcorner/io.hpp"
#include "evcorner/render.hpp"
#include "evcorner/surfaces.hpp"
#include "evcorner/synth.hpp"

namespace fs = std::filesystem;
using namespace evc;

namespace {

// Options shared by every subcommand that reads an event file.
struct Input {
  fs::path path;
  std::string format;  // empty: guess from the extension
  std::string ts_unit = "us";

  void add_to(CLI::App& cmd) {
    cmd.add_option("-i,--in", path, "event file")->required()->check(CLI::ExistingFile);
    cmd.add_option("--format", format, "csv or bin (default: from extension)");
    cmd.add_option("--ts-unit", ts_unit, "CSV timestamp unit")
        ->check(CLI::IsMember({"us", "s"}));
  }

  EventStream read() const {
    const StreamFormat f = format.empty() ? guess_stream_format(path) : parse_stream_format(format);
    ReadOptions opts;
    opts.ts_unit = ts_unit == "s" ? TimeUnit::seconds : TimeUnit::microseconds;
    return read_stream(path, f, opts);
  }
};

StreamFormat output_format(const fs::path& path, const std::string& format) {
  return format.empty() ? guess_stream_format(path) : parse_stream_format(format);
}

ToolkitConfig load(const std::optional<fs::path>& config) {
  return config ? load_config(*config) : ToolkitConfig{};
}

std::size_t count_corners(const std::vector<CornerTag>& tags) {
  std::size_t n = 0;
  for (const CornerTag& t : tags) n += t.is_corner;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event-camera corner detection toolkit"};
  app.require_subcommand(1);
  std::optional<fs::path> config_path;
  app.add_option("-c,--config", config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);

  // detect
  auto* detect = app.add_subcommand("detect", "tag every event as corner or not");
  Input detect_in;
  detect_in.add_to(*detect);
  std::string detector = "luvharris";
  fs::path tags_out;
  detect->add_option("-d,--detector", detector, "luvharris, eharris, fast or arc");
  detect->add_option("-o,--out", tags_out, "tag CSV")->required();

  // filter
  auto* filter = app.add_subcommand("filter", "refractory and salt-and-pepper filtering");
  Input filter_in;
  filter_in.add_to(*filter);
  fs::path filter_out;
  std::string filter_format;
  std::optional<Timestamp> refractory_us, sp_window_us;
  std::optional<int> sp_neighborhood;
  filter->add_option("-o,--out", filter_out, "filtered event file")->required();
  filter->add_option("--out-format", filter_format, "csv or bin (default: from extension)");
  filter->add_option("--refractory-us", refractory_us, "refractory period, 0 disables");
  filter->add_option("--sp-window-us", sp_window_us, "salt-and-pepper window, 0 disables");
  filter->add_option("--sp-neighborhood", sp_neighborhood, "salt-and-pepper Chebyshev radius");

  // bench
  auto* bench = app.add_subcommand("bench", "paced-replay delay and maximum throughput");
  Input bench_in;
  bench_in.add_to(*bench);
  std::vector<std::string> bench_detectors{"luvharris", "arc", "fast", "eharris"};
  Timestamp packet_us = 1'000;
  fs::path bench_dir = "bench_out";
  int runs = 5;
  bool skip_delay = false, skip_throughput = false;
  bench->add_option("-d,--detectors", bench_detectors, "detectors to run");
  bench->add_option("--packet-us", packet_us, "replay packet length")->check(CLI::PositiveNumber);
  bench->add_option("--out-dir", bench_dir, "directory for delay_<detector>.csv");
  bench->add_option("--runs", runs, "throughput runs (median reported)")->check(CLI::PositiveNumber);
  bench->add_flag("--no-delay", skip_delay, "skip the paced replay");
  bench->add_flag("--no-throughput", skip_throughput, "skip the throughput measurement");

  // render
  auto* render = app.add_subcommand("render", "PGM frames of the TOS or of corner trails");
  Input render_in;
  render_in.add_to(*render);
  std::string mode = "trails";
  Timestamp window_us = 100'000;
  fs::path render_dir = "frames";
  std::string render_detector = "luvharris";
  render->add_option("--mode", mode, "tos or trails")->check(CLI::IsMember({"tos", "trails"}));
  render->add_option("--window-us", window_us, "stream time per frame")->check(CLI::PositiveNumber);
  render->add_option("--out-dir", render_dir, "output directory");
  render->add_option("-d,--detector", render_detector, "detector for trails");

  // pr
  auto* pr = app.add_subcommand("pr", "precision-recall curve against ground-truth scores");
  Input pr_in;
  pr_in.add_to(*pr);
  fs::path gt_path, pr_out;
  std::vector<std::string> pr_detectors{"luvharris", "eharris", "fast", "arc"};
  std::size_t points = 20;
  double fraction = 0.20;
  pr->add_option("-g,--gt", gt_path, "ground-truth score file")->required()->check(CLI::ExistingFile);
  pr->add_option("-d,--detectors", pr_detectors, "detectors to sweep");
  pr->add_option("--points", points, "sweep points")->check(CLI::Range(2, 1000));
  pr->add_option("--corner-fraction", fraction, "fraction of events labelled corner");
  pr->add_option("--out-dir", pr_out, "directory for pr_<detector>.csv");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic recording");
  std::string fixture;
  std::vector<std::uint32_t> texture;
  Timestamp duration_us = 1'000'000;
  std::size_t shapes = 40;
  double speed = 300.0, noise = 20'000.0;
  std::uint64_t seed = 1;
  fs::path synth_out, synth_gt;
  std::string synth_format;
  auto* fixture_opt = synth_cmd->add_option(
      "--fixture", fixture, "corner90, corner270, straight_edge, secondary_wave or salt_pepper");
  synth_cmd->add_option("--texture", texture, "texture scene of WIDTH HEIGHT")
      ->expected(2)
      ->excludes(fixture_opt);
  synth_cmd->add_option("--duration-us", duration_us, "texture scene duration");
  synth_cmd->add_option("--shapes", shapes, "texture shape count");
  synth_cmd->add_option("--speed", speed, "texture shape speed in px/s");
  synth_cmd->add_option("--noise", noise, "uniform noise rate in events/s");
  synth_cmd->add_option("--seed", seed, "random seed");
  synth_cmd->add_option("-o,--out", synth_out, "event file")->required();
  synth_cmd->add_option("--out-format", synth_format, "csv or bin (default: from extension)");
  synth_cmd->add_option("--gt-out", synth_gt, "ground-truth score file");

  // convert
  auto* convert = app.add_subcommand("convert", "convert between CSV and packed binary");
  Input convert_in;
  convert_in.add_to(*convert);
  fs::path convert_out;
  std::string convert_format;
  convert->add_option("-o,--out", convert_out, "output event file")->required();
  convert->add_option("--out-format", convert_format, "csv or bin (default: from extension)");

  CLI11_PARSE(app, argc, argv);

  try {
    const ToolkitConfig config = load(config_path);

    if (*detect) {
      const EventStream s = detect_in.read();
      const auto tags = run_detector(parse_detector_kind(detector), s, config.detectors);
      write_tags(tags, s.geometry(), tags_out);
      fmt::print("{}: {} events, {} corners\n", detector, tags.size(), count_corners(tags));
    } else if (*filter) {
      FilterConfig f = config.filters;
      if (refractory_us) f.refractory = *refractory_us;
      if (sp_window_us) f.sp_window = *sp_window_us;
      if (sp_neighborhood) f.sp_neighborhood = *sp_neighborhood;
      const EventStream s = filter_in.read();
      const EventStream out = apply_filters(s, f);
      write_stream(out, filter_out, output_format(filter_out, filter_format));
      fmt::print("kept {} of {} events\n", out.size(), s.size());
    } else if (*bench) {
      const EventStream s = bench_in.read();
      fmt::print("{:<12} {:>14} {:>12} {:>16}\n", "detector", "events/s", "stddev", "max delay ms");
      for (const std::string& name : bench_detectors) {
        const DetectorKind kind = parse_detector_kind(name);
        std::string max_delay = "-";
        if (!skip_delay) {
          auto det = make_detector(kind, s.geometry(), config.detectors);
          ReplayOptions opts;
          opts.packet_us = packet_us;
          const DelayTrace trace = paced_replay(*det, s, opts);
          fs::create_directories(bench_dir);
          export_plot_data(trace, bench_dir / fmt::format("delay_{}.csv", name));
          max_delay = fmt::format("{:.3f}", trace.max_delay_us() / 1e3);
        }
        std::string eps = "-", sd = "-";
        if (!skip_throughput) {
          ThroughputOptions opts;
          opts.runs = runs;
          const ThroughputResult r = measure_throughput(
              [&] { return make_detector(kind, s.geometry(), config.detectors); }, s, opts);
          eps = fmt::format("{:.0f}", r.median_eps);
          sd = fmt::format("{:.0f}", r.stddev_eps);
        }
        fmt::print("{:<12} {:>14} {:>12} {:>16}\n", name, eps, sd, max_delay);
      }
    } else if (*render) {
      const EventStream s = render_in.read();
      std::size_t written = 0;
      if (mode == "trails") {
        const auto tags = run_detector(parse_detector_kind(render_detector), s, config.detectors);
        written = write_frames(render_trails(tags, s.geometry(), window_us), render_dir, "trails").size();
      } else {
        const auto& luv = config.detectors.luvharris;
        TosSurface tos(s.geometry(), luv.k_tos, luv.t_tos);
        std::vector<Image8> frames;
        if (!s.empty()) {
          Timestamp next = s.events().front().t + window_us;
          for (const Event& e : s.events()) {
            while (e.t >= next) {
              frames.push_back(tos.image());
              next += window_us;
            }
            tos.update(e);
          }
          frames.push_back(tos.image());
        }
        written = write_frames(frames, render_dir, "tos").size();
      }
      fmt::print("wrote {} frames to {}\n", written, render_dir.string());
    } else if (*pr) {
      const EventStream s = pr_in.read();
      const GroundTruth gt = load_ground_truth(gt_path, s, fraction);
      fmt::print("{:<12} {:>12}\n", "detector", "P@R=0.5");
      for (const std::string& name : pr_detectors) {
        const DetectorKind kind = parse_detector_kind(name);
        const PrCurve curve = pr_curve(decision_parameter_sweep(kind, config.detectors, s, points),
                                       gt, name, pr_in.path.stem().string());
        if (!pr_out.empty()) {
          fs::create_directories(pr_out);
          export_plot_data(curve, pr_out / fmt::format("pr_{}.csv", name));
        }
        std::string p50;
        try {
          p50 = fmt::format("{:.4f}", precision_at_recall(curve, 0.5));
        } catch (const RecallNotSpanned&) {
          p50 = "n/a";
        }
        fmt::print("{:<12} {:>12}\n", name, p50);
      }
    } else if (*synth_cmd) {
      synth::Recording r;
      if (!texture.empty()) {
        r = synth::generate(
            synth::texture_scene({texture[0], texture[1]}, duration_us, shapes, speed, noise, seed));
      } else if (!fixture.empty()) {
        r = synth::make_fixture(synth::parse_fixture(fixture), seed);
      } else {
        throw InvalidParameter("synth needs --fixture or --texture");
      }
      write_stream(r.stream, synth_out, output_format(synth_out, synth_format));
      if (!synth_gt.empty()) write_gt_scores(synth::corner_scores(r.corner_distance), synth_gt);
      fmt::print("{} events over {} us\n", r.stream.size(), r.stream.span_us());
    } else if (*convert) {
      const EventStream s = convert_in.read();
      write_stream(s, convert_out, output_format(convert_out, convert_format));
      fmt::print("{} events\n", s.size());
    }
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
