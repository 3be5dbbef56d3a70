#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "evcorner/baselines.hpp"
#include "evcorner/filters.hpp"

namespace evc {

struct ToolkitConfig {
  DetectorSuite detectors{};
  FilterConfig filters{};
};

// key = value lines; '#' starts a comment. Recognised keys:
//   k_tos t_tos block_size sobel_aperture kappa threshold_tr mode
//   eharris_window_us eharris_threshold_tr
//   arc_inner_min arc_inner_max arc_outer_min arc_outer_max
//   refractory_us sp_window_us sp_neighborhood
// The Harris kernel keys apply to both luvHarris and eHarris. Throws
// FormatError (with line number) or InvalidParameter.
ToolkitConfig parse_config(std::string_view text, ToolkitConfig base = {});
ToolkitConfig load_config(const std::filesystem::path& path, ToolkitConfig base = {});
std::string to_config_text(const ToolkitConfig& config);

}  // namespace evc
