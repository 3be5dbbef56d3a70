#include "evcorner/config.hpp"

#include <fmt/format.h>

#include "evcorner/error.hpp"
#include "text.hpp"

namespace evc {

using namespace detail;

namespace {

template <typename T>
T value_as(std::string_view key, std::string_view value, std::size_t line) {
  T v{};
  if (!parse_number(value, v)) {
    throw FormatError(fmt::format("bad value '{}' for '{}' on line {}", value, key, line), line);
  }
  return v;
}

}  // namespace

ToolkitConfig parse_config(std::string_view text, ToolkitConfig base) {
  ToolkitConfig c = std::move(base);
  auto& luv = c.detectors.luvharris;
  auto& eh = c.detectors.eharris;
  auto& arc = c.detectors.arc;
  auto& f = c.filters;

  LineReader lines(text);
  std::string_view line;
  while (lines.next(line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t n = lines.number();
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(fmt::format("expected 'key = value' on line {}", n), n);
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "k_tos") {
      luv.k_tos = value_as<int>(key, value, n);
    } else if (key == "t_tos") {
      luv.t_tos = value_as<int>(key, value, n);
    } else if (key == "block_size") {
      luv.harris.block_size = eh.harris.block_size = value_as<int>(key, value, n);
    } else if (key == "sobel_aperture") {
      luv.harris.sobel_aperture = eh.harris.sobel_aperture = value_as<int>(key, value, n);
    } else if (key == "kappa") {
      luv.harris.kappa = eh.harris.kappa = value_as<double>(key, value, n);
    } else if (key == "threshold_tr") {
      luv.threshold_tr = value_as<double>(key, value, n);
    } else if (key == "mode") {
      try {
        luv.mode = parse_pipeline_mode(value);
      } catch (const InvalidParameter& e) {
        throw FormatError(fmt::format("{} on line {}", e.what(), n), n);
      }
    } else if (key == "eharris_window_us") {
      eh.window = value_as<Timestamp>(key, value, n);
    } else if (key == "eharris_threshold_tr") {
      eh.threshold_tr = value_as<double>(key, value, n);
    } else if (key == "arc_inner_min") {
      arc.inner_min = value_as<int>(key, value, n);
    } else if (key == "arc_inner_max") {
      arc.inner_max = value_as<int>(key, value, n);
    } else if (key == "arc_outer_min") {
      arc.outer_min = value_as<int>(key, value, n);
    } else if (key == "arc_outer_max") {
      arc.outer_max = value_as<int>(key, value, n);
    } else if (key == "refractory_us") {
      f.refractory = value_as<Timestamp>(key, value, n);
    } else if (key == "sp_window_us") {
      f.sp_window = value_as<Timestamp>(key, value, n);
    } else if (key == "sp_neighborhood") {
      f.sp_neighborhood = value_as<int>(key, value, n);
    } else {
      throw FormatError(fmt::format("unknown key '{}' on line {}", key, n), n);
    }
  }

  validate(luv);
  validate(eh);
  validate(arc);
  validate(f);
  return c;
}

ToolkitConfig load_config(const std::filesystem::path& path, ToolkitConfig base) {
  return parse_config(slurp(path), std::move(base));
}

std::string to_config_text(const ToolkitConfig& config) {
  const auto& luv = config.detectors.luvharris;
  const auto& eh = config.detectors.eharris;
  const auto& arc = config.detectors.arc;
  const auto& f = config.filters;
  const int t_tos = luv.t_tos < 0 ? tos_default_threshold(luv.k_tos) : luv.t_tos;
  fmt::memory_buffer b;
  auto out = std::back_inserter(b);
  fmt::format_to(out, "# luvHarris\n");
  fmt::format_to(out, "k_tos = {}\nt_tos = {}\n", luv.k_tos, t_tos);
  fmt::format_to(out, "block_size = {}\nsobel_aperture = {}\nkappa = {}\n", luv.harris.block_size,
                 luv.harris.sobel_aperture, luv.harris.kappa);
  fmt::format_to(out, "threshold_tr = {}\nmode = {}\n", luv.threshold_tr, to_string(luv.mode));
  fmt::format_to(out, "# eHarris\n");
  fmt::format_to(out, "eharris_window_us = {}\neharris_threshold_tr = {}\n", eh.window,
                 eh.threshold_tr);
  fmt::format_to(out, "# FAST / ARC\n");
  fmt::format_to(out, "arc_inner_min = {}\narc_inner_max = {}\narc_outer_min = {}\narc_outer_max = {}\n",
                 arc.inner_min, arc.inner_max, arc.outer_min, arc.outer_max);
  fmt::format_to(out, "# filters\n");
  fmt::format_to(out, "refractory_us = {}\nsp_window_us = {}\nsp_neighborhood = {}\n", f.refractory,
                 f.sp_window, f.sp_neighborhood);
  return fmt::to_string(b);
}

}  // namespace evc
