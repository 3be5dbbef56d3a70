#include <gtest/gtest.h>

#include <fstream>
#include <queue>
#include <random>

#include "evcorner/baselines.hpp"
#include "evcorner/error.hpp"
#include "evcorner/render.hpp"
#include "evcorner/synth.hpp"
#include "support.hpp"

using namespace evc;

namespace {

std::string bytes_of(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Largest 8-connected component among cells equal to `value`.
std::size_t largest_component(const Image8& img, std::uint8_t value) {
  const int w = static_cast<int>(img.width()), h = static_cast<int>(img.height());
  Grid<std::uint8_t> seen(img.width(), img.height(), 0);
  std::size_t best = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (img.at(x, y) != value || seen.at(x, y)) continue;
      std::size_t size = 0;
      std::queue<std::pair<int, int>> q;
      q.push({x, y});
      seen.at(x, y) = 1;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        ++size;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (img.at(nx, ny) != value || seen.at(nx, ny)) continue;
            seen.at(nx, ny) = 1;
            q.push({nx, ny});
          }
        }
      }
      best = std::max(best, size);
    }
  }
  return best;
}

}  // namespace

TEST(Pgm, KnownGridIsByteExact) {
  Image8 img(3, 3);
  for (int i = 0; i < 9; ++i) img.data()[i] = static_cast<std::uint8_t>(i * 30);
  testsupport::TempDir dir;
  write_pgm(img, dir / "a.pgm");
  std::string expected = "P5\n3 3\n255\n";
  for (int i = 0; i < 9; ++i) expected.push_back(static_cast<char>(i * 30));
  EXPECT_EQ(bytes_of(dir / "a.pgm"), expected);
}

TEST(Pgm, RoundTripAndComments) {
  std::mt19937_64 rng(81);
  const Image8 img = testsupport::random_image(37, 11, rng);
  testsupport::TempDir dir;
  write_pgm(img, dir / "a.pgm");
  EXPECT_EQ(read_pgm(dir / "a.pgm"), img);
  std::ofstream(dir / "c.pgm", std::ios::binary) << "P5\n# made by hand\n2 1\n255\n\x01\x02";
  const Image8 c = read_pgm(dir / "c.pgm");
  EXPECT_EQ(c.at(0, 0), 1);
  EXPECT_EQ(c.at(1, 0), 2);
  std::ofstream(dir / "p2.pgm", std::ios::binary) << "P2\n2 1\n255\n1 2\n";
  EXPECT_THROW(read_pgm(dir / "p2.pgm"), FormatError);
  std::ofstream(dir / "short.pgm", std::ios::binary) << "P5\n2 2\n255\n\x01";
  EXPECT_THROW(read_pgm(dir / "short.pgm"), FormatError);
}

TEST(RenderTos, BlankAndValueExact) {
  testsupport::TempDir dir;
  TosSurface tos({20, 10}, 3);
  render_tos(tos, dir / "blank.pgm");
  const Image8 blank = read_pgm(dir / "blank.pgm");
  for (std::uint8_t v : blank.data()) EXPECT_EQ(v, 0);
  std::mt19937_64 rng(82);
  for (const Event& e : testsupport::random_events(100, 20, 10, rng)) tos.update(e);
  render_tos(tos, dir / "tos.pgm");
  EXPECT_EQ(read_pgm(dir / "tos.pgm"), tos.image());
}

TEST(RenderTrails, DimAndBrightAndFrameCount) {
  const SensorGeometry g{10, 10};
  std::vector<CornerTag> tags{{{1000, 1, 1, true}, false, 0},
                              {{2000, 2, 2, true}, true, 1},
                              {{2500, 1, 1, true}, true, 1},
                              {{2600, 1, 1, true}, false, 0},
                              {{250'999, 5, 5, true}, false, 0}};
  const auto frames = render_trails(tags, g, 100'000);
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[0].at(2, 2), kTrailBright);
  EXPECT_EQ(frames[0].at(1, 1), kTrailBright);  // corners win
  EXPECT_EQ(frames[2].at(5, 5), kTrailDim);
  for (const Image8& f : frames) EXPECT_EQ(f.geometry(), g);
  std::size_t lit = 0;
  for (std::uint8_t v : frames[1].data()) lit += v != 0;
  EXPECT_EQ(lit, 0u);
}

TEST(RenderTrails, NoCornersMeansOnlyDim) {
  std::mt19937_64 rng(83);
  std::vector<CornerTag> tags;
  for (const Event& e : testsupport::random_events(300, 16, 16, rng)) tags.push_back({e, false, 0});
  for (const Image8& f : render_trails(tags, {16, 16}, 1000)) {
    for (std::uint8_t v : f.data()) EXPECT_TRUE(v == 0 || v == kTrailDim);
  }
}

TEST(RenderTrails, SingleCornerSinglePixel) {
  std::vector<CornerTag> tags{{{0, 1, 1, true}, false, 0}, {{50, 3, 4, true}, true, 2}};
  const auto frames = render_trails(tags, {8, 8}, 100);
  ASSERT_EQ(frames.size(), 1u);
  std::size_t bright = 0;
  for (std::uint8_t v : frames[0].data()) bright += v == kTrailBright;
  EXPECT_EQ(bright, 1u);
  EXPECT_EQ(frames[0].at(3, 4), kTrailBright);
}

TEST(RenderTrails, Validation) {
  std::vector<CornerTag> tags{{{5, 1, 1, true}, false, 0}, {{3, 1, 1, true}, false, 0}};
  EXPECT_THROW(render_trails(tags, {8, 8}, 0), InvalidParameter);
  EXPECT_THROW(render_trails(tags, {8, 8}, 10), TimestampRegression);
  std::vector<CornerTag> outside{{{5, 9, 1, true}, false, 0}};
  EXPECT_THROW(render_trails(outside, {8, 8}, 10), GeometryViolation);
  EXPECT_TRUE(render_trails({}, {8, 8}, 10).empty());
}

TEST(RenderTrails, MovingCornerLeavesConnectedTrail) {
  const synth::Recording r = synth::make_fixture(synth::Fixture::corner90);
  auto tags = run_detector(DetectorKind::luvharris, r.stream, {});
  const auto frames = render_trails(tags, r.stream.geometry(), 100'000);
  ASSERT_EQ(frames.size(), 1u);
  std::size_t bright = 0;
  for (std::uint8_t v : frames[0].data()) bright += v == kTrailBright;
  ASSERT_GT(bright, 5u);
  EXPECT_GE(largest_component(frames[0], kTrailBright), bright / 2);
}

TEST(WriteFrames, NamesAndDeterminism) {
  testsupport::TempDir dir;
  const std::vector<Image8> frames{Image8(4, 3, 1), Image8(4, 3, 2)};
  const auto paths = write_frames(frames, dir / "out", "trail");
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[1].filename(), "trail_00001.pgm");
  EXPECT_EQ(read_pgm(paths[1]), frames[1]);
  const std::string first = bytes_of(paths[0]);
  write_frames(frames, dir / "out", "trail");
  EXPECT_EQ(bytes_of(paths[0]), first);
}

TEST(PlotData, DelayCsv) {
  DelayTrace empty;
  EXPECT_EQ(delay_csv(empty), "stream_time_us,delay_us\n");
  DelayTrace t;
  t.samples = {{1000, 12.5, 1000.0}, {2000, 0.0, 2000.0}};
  EXPECT_EQ(delay_csv(t), "stream_time_us,delay_us\n1000,12.500\n2000,0.000\n");
  testsupport::TempDir dir;
  export_plot_data(t, dir / "a.csv");
  export_plot_data(t, dir / "b.csv");
  EXPECT_EQ(bytes_of(dir / "a.csv"), bytes_of(dir / "b.csv"));
}

TEST(PlotData, PrCsvKeepsSweepOrder) {
  PrCurve c{"luvHarris", "fixture", {}};
  for (double p : {3.0, 2.0, 1.0}) {
    PrPoint pt;
    pt.parameter = p;
    pt.precision = p / 4;
    pt.recall = 1 - p / 4;
    c.points.push_back(pt);
  }
  c.points.push_back({});  // undefined precision is omitted
  EXPECT_EQ(pr_csv(c), "parameter,precision,recall\n3,0.75,0.25\n2,0.5,0.5\n1,0.25,0.75\n");
  testsupport::TempDir dir;
  export_plot_data(c, dir / "pr.csv");
  EXPECT_EQ(bytes_of(dir / "pr.csv"), pr_csv(c));
}
