#include "evcorner/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "evcorner/error.hpp"
#include "text.hpp"

namespace evc {
namespace {

using namespace detail;

constexpr char kMagic[4] = {'E', 'V', 'C', '1'};
constexpr std::size_t kBinHeader = 4 + 4 + 4 + 8;
constexpr std::size_t kBinRecord = 8 + 2 + 2 + 1;

// "# evcorner v1 <kind> <a> <b>" -> (a, b)
std::pair<std::uint64_t, std::uint64_t> parse_header(std::string_view line, std::string_view kind,
                                                      int expected_numbers) {
  std::istringstream in{std::string(line)};
  std::string hash, tag, version, got_kind;
  in >> hash >> tag >> version >> got_kind;
  if (hash != "#" || tag != "evcorner" || version != "v1" || got_kind != kind) {
    throw FormatError(fmt::format("expected '# evcorner v1 {} ...' header", kind), 1);
  }
  std::uint64_t a = 0, b = 0;
  std::string rest;
  if (!(in >> a)) throw FormatError("header is missing a size field", 1);
  if (expected_numbers > 1 && !(in >> b)) throw FormatError("header is missing a size field", 1);
  if (in >> rest) throw FormatError("trailing content in header", 1);
  return {a, b};
}

SensorGeometry header_geometry(std::string_view line, std::string_view kind) {
  const auto [w, h] = parse_header(line, kind, 2);
  if (w < 1 || h < 1 || w > 65536 || h > 65536) {
    throw FormatError(fmt::format("invalid sensor geometry {}x{} in header", w, h), 1);
  }
  return {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h)};
}

Event parse_event_fields(const std::vector<std::string_view>& f, std::size_t line_no,
                         std::size_t index, const SensorGeometry& g, TimeUnit unit) {
  Event e;
  if (unit == TimeUnit::microseconds) {
    if (!parse_number(f[0], e.t)) throw FormatError(fmt::format("bad timestamp on line {}", line_no), line_no);
  } else {
    double seconds = 0.0;
    if (!parse_number(f[0], seconds) || !(seconds >= 0.0) || !std::isfinite(seconds)) {
      throw FormatError(fmt::format("bad timestamp on line {}", line_no), line_no);
    }
    e.t = static_cast<Timestamp>(std::llround(seconds * 1e6));
  }
  std::uint64_t x = 0, y = 0, p = 0;
  if (!parse_number(f[1], x) || !parse_number(f[2], y)) {
    throw FormatError(fmt::format("bad coordinate on line {}", line_no), line_no);
  }
  if (!parse_number(f[3], p) || p > 1) {
    throw FormatError(fmt::format("polarity must be 0 or 1 on line {}", line_no), line_no);
  }
  if (x >= g.width || y >= g.height) {
    throw GeometryViolation(fmt::format("event {} at ({}, {}) outside {}x{} sensor (line {})",
                                        index, x, y, g.width, g.height, line_no),
                            index);
  }
  e.x = static_cast<std::uint16_t>(x);
  e.y = static_cast<std::uint16_t>(y);
  e.p = p == 1;
  return e;
}

void check_order(const std::vector<Event>& events) {
  const std::size_t i = events.size() - 1;
  if (i > 0 && events[i].t < events[i - 1].t) {
    throw TimestampRegression(
        fmt::format("event {} at t={} precedes previous t={}", i, events[i].t, events[i - 1].t), i);
  }
}

EventStream read_csv(const std::string& text, const ReadOptions& options) {
  LineReader lines(text);
  std::string_view line;
  if (!lines.next(line)) throw FormatError("empty file: missing header", 1);
  const SensorGeometry g = header_geometry(line, "csv");
  std::vector<Event> events;
  while (lines.next(line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (events.empty() && line == "t_us,x,y,p") continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != 4) {
      throw FormatError(fmt::format("expected 4 fields on line {}", lines.number()), lines.number());
    }
    events.push_back(parse_event_fields(fields, lines.number(), events.size(), g, options.ts_unit));
    check_order(events);
  }
  return EventStream::trusted(g, std::move(events));
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

template <typename T>
void store_le(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(b, sizeof(T));
}

EventStream read_binary(const std::string& data) {
  if (data.size() < kBinHeader) throw FormatError("truncated header", data.size());
  if (std::memcmp(data.data(), kMagic, 4) != 0) throw FormatError("bad magic, expected EVC1", 0);
  const SensorGeometry g{load_le<std::uint32_t>(data.data() + 4),
                         load_le<std::uint32_t>(data.data() + 8)};
  if (g.width < 1 || g.height < 1) throw FormatError("invalid sensor geometry in header", 4);
  const std::uint64_t count = load_le<std::uint64_t>(data.data() + 12);
  const std::size_t body = data.size() - kBinHeader;
  if (count > body / kBinRecord || body != count * kBinRecord) {
    throw FormatError(fmt::format("body of {} bytes does not hold {} events", body, count),
                      kBinHeader + std::min<std::size_t>(body, count * kBinRecord));
  }
  std::vector<Event> events;
  events.reserve(count);
  const char* p = data.data() + kBinHeader;
  for (std::uint64_t i = 0; i < count; ++i, p += kBinRecord) {
    Event e;
    e.t = load_le<std::uint64_t>(p);
    e.x = load_le<std::uint16_t>(p + 8);
    e.y = load_le<std::uint16_t>(p + 10);
    const auto pol = static_cast<unsigned char>(p[12]);
    if (pol > 1) {
      throw FormatError(fmt::format("polarity byte {} for event {}", pol, i),
                        kBinHeader + i * kBinRecord + 12);
    }
    e.p = pol == 1;
    check_in_geometry(e, g, events.size());
    events.push_back(e);
    check_order(events);
  }
  return EventStream::trusted(g, std::move(events));
}

std::string write_csv_text(const EventStream& stream) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "# evcorner v1 csv {} {}\n", stream.geometry().width,
                 stream.geometry().height);
  for (const Event& e : stream.events()) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{}\n", e.t, e.x, e.y, e.p ? 1 : 0);
  }
  return fmt::to_string(buf);
}

std::string write_binary_bytes(const EventStream& stream) {
  std::string out;
  out.reserve(kBinHeader + stream.size() * kBinRecord);
  out.append(kMagic, 4);
  store_le<std::uint32_t>(out, stream.geometry().width);
  store_le<std::uint32_t>(out, stream.geometry().height);
  store_le<std::uint64_t>(out, stream.size());
  for (const Event& e : stream.events()) {
    store_le<std::uint64_t>(out, e.t);
    store_le<std::uint16_t>(out, e.x);
    store_le<std::uint16_t>(out, e.y);
    out.push_back(e.p ? 1 : 0);
  }
  return out;
}

}  // namespace

StreamFormat parse_stream_format(std::string_view name) {
  if (name == "csv") return StreamFormat::csv;
  if (name == "bin" || name == "binary" || name == "packed_binary") return StreamFormat::packed_binary;
  throw InvalidParameter(fmt::format("unknown stream format '{}'", name));
}

StreamFormat guess_stream_format(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".bin" || ext == ".evc") ? StreamFormat::packed_binary : StreamFormat::csv;
}

EventStream read_stream(const std::filesystem::path& path, StreamFormat format,
                        const ReadOptions& options) {
  const std::string data = slurp(path);
  return format == StreamFormat::csv ? read_csv(data, options) : read_binary(data);
}

void write_stream(const EventStream& stream, const std::filesystem::path& path,
                  StreamFormat format) {
  spit(path, format == StreamFormat::csv ? write_csv_text(stream) : write_binary_bytes(stream));
}

std::string format_score(double score) {
  int decimals = 6;
  if (score != 0.0 && std::isfinite(score)) {
    const int magnitude = static_cast<int>(std::floor(std::log10(std::fabs(score))));
    decimals = std::max(6, 5 - magnitude);
  }
  return fmt::format("{:.{}f}", score, decimals);
}

void write_tags(std::span<const CornerTag> tags, const SensorGeometry& geometry,
                const std::filesystem::path& path) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "# evcorner v1 tags {} {}\n", geometry.width,
                 geometry.height);
  for (const CornerTag& tag : tags) {
    const Event& e = tag.event;
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{}\n", e.t, e.x, e.y, e.p ? 1 : 0,
                   tag.is_corner ? 1 : 0, format_score(tag.score));
  }
  spit(path, std::string_view(buf.data(), buf.size()));
}

TagFile read_tags(const std::filesystem::path& path) {
  const std::string text = slurp(path);
  LineReader lines(text);
  std::string_view line;
  if (!lines.next(line)) throw FormatError("empty file: missing header", 1);
  TagFile file;
  file.geometry = header_geometry(line, "tags");
  while (lines.next(line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (file.tags.empty() && line == "t_us,x,y,p,is_corner,score") continue;
    const auto f = split_fields(line, ',');
    if (f.size() != 6) {
      throw FormatError(fmt::format("expected 6 fields on line {}", lines.number()), lines.number());
    }
    CornerTag tag;
    tag.event = parse_event_fields(f, lines.number(), file.tags.size(), file.geometry,
                                   TimeUnit::microseconds);
    std::uint64_t corner = 0;
    if (!parse_number(f[4], corner) || corner > 1) {
      throw FormatError(fmt::format("is_corner must be 0 or 1 on line {}", lines.number()),
                        lines.number());
    }
    tag.is_corner = corner == 1;
    if (!parse_number(f[5], tag.score)) {
      throw FormatError(fmt::format("bad score on line {}", lines.number()), lines.number());
    }
    file.tags.push_back(tag);
  }
  return file;
}

}  // namespace evc
