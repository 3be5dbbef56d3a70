#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "evcorner/bench.hpp"
#include "evcorner/eval.hpp"
#include "evcorner/event.hpp"
#include "evcorner/grid.hpp"
#include "evcorner/surfaces.hpp"

namespace evc {

inline constexpr std::uint8_t kTrailDim = 64;
inline constexpr std::uint8_t kTrailBright = 255;

// Binary PGM (P5), maxval 255.
void write_pgm(const Image8& image, const std::filesystem::path& path);
Image8 read_pgm(const std::filesystem::path& path);

void render_tos(const TosSurface& surface, const std::filesystem::path& path);

// One frame per `window` of stream time starting at the first tag: events
// are drawn at kTrailDim, corner events at kTrailBright (corners win).
std::vector<Image8> render_trails(std::span<const CornerTag> tags, const SensorGeometry& geometry,
                                  Timestamp window = 100'000);

// Writes frames as <prefix>_<index>.pgm and returns the paths.
std::vector<std::filesystem::path> write_frames(std::span<const Image8> frames,
                                                const std::filesystem::path& out_dir,
                                                const std::string& prefix);

// "stream_time_us,delay_us"
std::string delay_csv(const DelayTrace& trace);
// "parameter,precision,recall"; points with undefined precision are omitted.
std::string pr_csv(const PrCurve& curve);

void export_plot_data(const DelayTrace& trace, const std::filesystem::path& path);
void export_plot_data(const PrCurve& curve, const std::filesystem::path& path);

}  // namespace evc
