#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "evcorner/event.hpp"

namespace evc {

enum class StreamFormat { csv, packed_binary };

// Unit of the timestamp column in CSV input. Seconds are parsed as a real
// number and rounded to the nearest microsecond.
enum class TimeUnit { microseconds, seconds };

struct ReadOptions {
  TimeUnit ts_unit = TimeUnit::microseconds;
};

// Format name as used on the command line: "csv" or "bin".
StreamFormat parse_stream_format(std::string_view name);

// Picks packed_binary for ".bin"/".evc" extensions, csv otherwise.
StreamFormat guess_stream_format(const std::filesystem::path& path);

// CSV layout, one event per row after the header (an optional column-name
// row "t_us,x,y,p" is skipped):
//   # evcorner v1 csv <width> <height>
//   <t_us>,<x>,<y>,<p>
// packed_binary layout (little-endian, no padding):
//   "EVC1" u32 width u32 height u64 count, then count * (u64 t, u16 x, u16 y, u8 p)
EventStream read_stream(const std::filesystem::path& path, StreamFormat format,
                        const ReadOptions& options = {});

void write_stream(const EventStream& stream, const std::filesystem::path& path,
                  StreamFormat format);

// Tag CSV, likewise with an optional column-name row:
//   # evcorner v1 tags <width> <height>
//   <t_us>,<x>,<y>,<p>,<is_corner>,<score>
// Scores are printed in fixed notation with at least six decimals and at
// least six significant digits.
void write_tags(std::span<const CornerTag> tags, const SensorGeometry& geometry,
                const std::filesystem::path& path);

struct TagFile {
  SensorGeometry geometry;
  std::vector<CornerTag> tags;
};

TagFile read_tags(const std::filesystem::path& path);

// The score formatting used by write_tags, exposed for tests and exporters.
std::string format_score(double score);

}  // namespace evc
