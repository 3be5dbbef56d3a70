#include "evcorner/render.hpp"

#include <fmt/format.h>

#include <cctype>

#include "evcorner/error.hpp"
#include "text.hpp"

namespace evc {

using namespace detail;

void write_pgm(const Image8& image, const std::filesystem::path& path) {
  std::string out = fmt::format("P5\n{} {}\n255\n", image.width(), image.height());
  const auto data = image.data();
  out.append(reinterpret_cast<const char*>(data.data()), data.size());
  spit(path, out);
}

Image8 read_pgm(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  std::size_t pos = 0;
  // Header tokens are whitespace separated; '#' comments run to end of line.
  auto token = [&]() -> std::string_view {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return std::string_view(data).substr(start, pos - start);
  };
  if (token() != "P5") throw FormatError(fmt::format("'{}' is not a binary PGM", path.string()), 0);
  std::uint32_t w = 0, h = 0, maxval = 0;
  if (!parse_number(token(), w) || !parse_number(token(), h) || !parse_number(token(), maxval) ||
      w == 0 || h == 0) {
    throw FormatError(fmt::format("bad PGM header in '{}'", path.string()), pos);
  }
  if (maxval != 255) throw FormatError(fmt::format("unsupported PGM maxval {}", maxval), pos);
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (data.size() < pos || data.size() - pos != n) {
    throw FormatError(fmt::format("PGM raster holds {} bytes, expected {}",
                                  data.size() < pos ? 0 : data.size() - pos, n),
                      pos);
  }
  Image8 image(w, h);
  std::copy(data.begin() + static_cast<std::ptrdiff_t>(pos), data.end(), image.data().begin());
  return image;
}

void render_tos(const TosSurface& surface, const std::filesystem::path& path) {
  write_pgm(surface.image(), path);
}

std::vector<Image8> render_trails(std::span<const CornerTag> tags, const SensorGeometry& geometry,
                                  Timestamp window) {
  if (window == 0) throw InvalidParameter("trail window must be > 0");
  validate(geometry);
  std::vector<Image8> frames;
  if (tags.empty()) return frames;
  const Timestamp t0 = tags.front().event.t;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Event& e = tags[i].event;
    check_in_geometry(e, geometry, i);
    if (e.t < t0) {
      throw TimestampRegression(fmt::format("tag {} at t={} precedes the first tag", i, e.t), i);
    }
    const std::size_t k = (e.t - t0) / window;
    while (frames.size() <= k) frames.emplace_back(geometry, 0);
    std::uint8_t& px = frames[k].at(e.x, e.y);
    if (tags[i].is_corner) {
      px = kTrailBright;
    } else if (px == 0) {
      px = kTrailDim;
    }
  }
  return frames;
}

std::vector<std::filesystem::path> write_frames(std::span<const Image8> frames,
                                                const std::filesystem::path& out_dir,
                                                const std::string& prefix) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    paths.push_back(out_dir / fmt::format("{}_{:05d}.pgm", prefix, i));
    write_pgm(frames[i], paths.back());
  }
  return paths;
}

std::string delay_csv(const DelayTrace& trace) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "stream_time_us,delay_us\n");
  for (const auto& s : trace.samples) {
    fmt::format_to(std::back_inserter(buf), "{},{:.3f}\n", s.stream_time, s.delay_us);
  }
  return fmt::to_string(buf);
}

std::string pr_csv(const PrCurve& curve) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "parameter,precision,recall\n");
  for (const auto& p : curve.points) {
    if (!p.precision) continue;
    fmt::format_to(std::back_inserter(buf), "{},{},{}\n", p.parameter, *p.precision, p.recall);
  }
  return fmt::to_string(buf);
}

void export_plot_data(const DelayTrace& trace, const std::filesystem::path& path) {
  spit(path, delay_csv(trace));
}

void export_plot_data(const PrCurve& curve, const std::filesystem::path& path) {
  spit(path, pr_csv(curve));
}

}  // namespace evc
