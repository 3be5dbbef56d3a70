#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "evcorner/error.hpp"
#include "evcorner/harris.hpp"
#include "oracles/naive_harris.hpp"
#include "support.hpp"

using namespace evc;

namespace {

oracle::NaiveHarrisParams to_oracle(const HarrisParams& p) {
  return {p.block_size, p.sobel_aperture, p.kappa};
}

auto reader(const Image8& img) {
  return [&img](int x, int y) { return double(img.at(x, y)); };
}

bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

Image8 quadrant_corner(int n) {
  Image8 img(n, n, 0);
  for (int y = n / 2; y < n; ++y) {
    for (int x = n / 2; x < n; ++x) img.at(x, y) = 255;
  }
  return img;
}

Image8 rotate90(const Image8& img) {
  // (x, y) -> (h - 1 - y, x)
  Image8 out(img.height(), img.width());
  for (int y = 0; y < static_cast<int>(img.height()); ++y) {
    for (int x = 0; x < static_cast<int>(img.width()); ++x) {
      out.at(static_cast<int>(img.height()) - 1 - y, x) = img.at(x, y);
    }
  }
  return out;
}

}  // namespace

TEST(HarrisParams, Validation) {
  EXPECT_NO_THROW(validate(HarrisParams{}));
  EXPECT_THROW(validate(HarrisParams{7, 4, 0.04}), InvalidParameter);
  EXPECT_THROW(validate(HarrisParams{7, 1, 0.04}), InvalidParameter);
  EXPECT_THROW(validate(HarrisParams{0, 5, 0.04}), InvalidParameter);
  EXPECT_THROW(validate(HarrisParams{7, 5, 0.0}), InvalidParameter);
}

TEST(HarrisKernel, TapsMatchTextbookSobel) {
  for (int n : {3, 5, 7}) {
    const HarrisKernel k({3, n, 0.04});
    const auto taps = oracle::sobel_taps(n);
    ASSERT_EQ(k.smooth().size(), taps.smooth.size());
    for (std::size_t i = 0; i < taps.smooth.size(); ++i) {
      EXPECT_EQ(k.smooth()[i], taps.smooth[i]);
      EXPECT_EQ(k.deriv()[i], taps.deriv[i]);
    }
  }
}

TEST(Reflect101, MatchesFoldedMirror) {
  for (int n : {1, 2, 3, 7}) {
    for (int p = -20; p < 30; ++p) EXPECT_EQ(reflect101(p, n), oracle::mirror(p, n)) << p << " " << n;
  }
}

TEST(Sobel, ConstantImageHasNoGradient) {
  const Image8 img(20, 20, 77);
  const Derivatives d = sobel_derivatives(img, {});
  for (double v : d.ix.data()) EXPECT_EQ(v, 0.0);
  for (double v : d.iy.data()) EXPECT_EQ(v, 0.0);
}

TEST(Sobel, VerticalStep) {
  Image8 img(20, 20, 0);
  for (int y = 0; y < 20; ++y) {
    for (int x = 10; x < 20; ++x) img.at(x, y) = 255;
  }
  const Derivatives d = sobel_derivatives(img, {});
  for (int y = 2; y < 18; ++y) {
    for (int x = 0; x < 20; ++x) EXPECT_EQ(d.iy.at(x, y), 0.0);
    EXPECT_GT(d.ix.at(9, y), 0.0);
    EXPECT_GT(d.ix.at(10, y), 0.0);
  }
}

TEST(Sobel, MatchesDirectConvolution) {
  std::mt19937_64 rng(21);
  for (int n : {3, 5, 7}) {
    const HarrisParams p{5, n, 0.04};
    const Image8 img = testsupport::random_image(16 + n, 16, rng);
    const Derivatives d = sobel_derivatives(img, p);
    std::vector<double> gx, gy;
    oracle::naive_gradients(reader(img), img.width(), img.height(), to_oracle(p), gx, gy);
    for (std::size_t i = 0; i < gx.size(); ++i) {
      ASSERT_TRUE(close(d.ix.data()[i], gx[i])) << i;
      ASSERT_TRUE(close(d.iy.data()[i], gy[i])) << i;
    }
  }
}

TEST(Harris, ImageTooSmall) {
  EXPECT_THROW(harris_response_map(Image8(4, 10), {}), ImageTooSmall);
  EXPECT_THROW(sobel_derivatives(Image8(10, 4), {}), ImageTooSmall);
  EXPECT_NO_THROW(harris_response_map(Image8(5, 5), {}));
}

TEST(Harris, PatchOutsideImageThrows) {
  EXPECT_THROW(harris_response_patch(Image8(16, 16), 16, 0, {}), GeometryViolation);
}

TEST(Harris, ConstantImageScoresZero) {
  const ScoreMap m = harris_response_map(Image8(24, 24, 200), {});
  for (double v : m.data()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(harris_response_patch(Image8(24, 24, 200), 5, 5, {}), 0.0);
}

TEST(Harris, MapMatchesNaiveOracle) {
  std::mt19937_64 rng(22);
  const HarrisParams configs[] = {{7, 5, 0.04}, {3, 3, 0.05}, {4, 7, 0.04}, {1, 3, 0.06}};
  for (const HarrisParams& p : configs) {
    const Image8 img = testsupport::random_image(19, 17, rng);
    const ScoreMap m = harris_response_map(img, p);
    std::vector<double> gx, gy;
    oracle::naive_gradients(reader(img), 19, 17, to_oracle(p), gx, gy);
    const auto ref = oracle::naive_harris_map(gx, gy, 19, 17, to_oracle(p));
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_TRUE(close(m.data()[i], ref[i])) << i;
  }
}

TEST(Harris, PatchEqualsMapEverywhere) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 6; ++trial) {
    const HarrisParams p{1 + trial, trial % 2 == 0 ? 5 : 3, 0.04};
    const Image8 img = testsupport::random_image(16 + trial, 16 + 2 * trial, rng, trial % 3 == 0);
    const ScoreMap m = harris_response_map(img, p);
    for (int y = 0; y < static_cast<int>(img.height()); ++y) {
      for (int x = 0; x < static_cast<int>(img.width()); ++x) {
        ASSERT_EQ(harris_response_patch(img, x, y, p), m.at(x, y));
      }
    }
  }
}

TEST(Harris, PatchMatchesNaiveOracle) {
  std::mt19937_64 rng(24);
  const Image8 img = testsupport::random_image(21, 18, rng);
  const HarrisParams p{};
  for (int y = 0; y < 18; y += 3) {
    for (int x = 0; x < 21; x += 2) {
      ASSERT_TRUE(close(harris_response_patch(img, x, y, p),
                        oracle::naive_harris_at(reader(img), 21, 18, x, y, to_oracle(p))));
    }
  }
}

TEST(Harris, CornerApexBeatsEdges) {
  const Image8 img = quadrant_corner(32);
  const ScoreMap m = harris_response_map(img, {});
  // The response peaks around the apex at (16, 16).
  double apex = -1e300;
  for (int y = 14; y <= 17; ++y) {
    for (int x = 14; x <= 17; ++x) apex = std::max(apex, m.at(x, y));
  }
  EXPECT_GT(apex, 0.0);
  for (int t = 24; t < 30; ++t) {
    // points on the two straight edges, away from the apex and the frame
    EXPECT_LT(m.at(t, 16), 0.0);
    EXPECT_LT(m.at(16, t), 0.0);
    EXPECT_GT(apex, m.at(t, 16));
    EXPECT_GT(apex, m.at(16, t));
  }
}

TEST(Harris, StepEdgeIsNegative) {
  Image8 img(24, 24, 0);
  for (int y = 0; y < 24; ++y) {
    for (int x = 12; x < 24; ++x) img.at(x, y) = 255;
  }
  EXPECT_LT(harris_response_patch(img, 12, 12, {}), 0.0);
  EXPECT_LT(harris_response_patch(img, 11, 5, {}), 0.0);
}

TEST(Harris, RotationCovariance) {
  std::mt19937_64 rng(25);
  const HarrisParams p{};
  const int margin = p.sobel_aperture + p.block_size;
  for (int trial = 0; trial < 4; ++trial) {
    const Image8 img = testsupport::random_image(30, 26, rng, trial % 2 == 1);
    const ScoreMap a = harris_response_map(img, p);
    const ScoreMap b = harris_response_map(rotate90(img), p);
    const int h = static_cast<int>(img.height());
    for (int y = margin; y < h - margin; ++y) {
      for (int x = margin; x < static_cast<int>(img.width()) - margin; ++x) {
        ASSERT_TRUE(close(b.at(h - 1 - y, x), a.at(x, y))) << x << "," << y;
      }
    }
  }
}

TEST(Harris, ContrastScalesToFourthPower) {
  std::mt19937_64 rng(26);
  for (int s : {2, 3, 5}) {
    Image8 img(24, 24);
    std::uniform_int_distribution<int> d(0, 255 / s);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(d(rng));
    Image8 scaled = img;
    for (auto& v : scaled.data()) v = static_cast<std::uint8_t>(v * s);
    const ScoreMap a = harris_response_map(img, {});
    const ScoreMap b = harris_response_map(scaled, {});
    double peak = 0.0;
    for (double v : a.data()) peak = std::max(peak, std::abs(v));
    const double expected = std::pow(double(s), 4);
    int checked = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a.data()[i]) < 1e-3 * peak) continue;
      ASSERT_NEAR(b.data()[i] / a.data()[i], expected, 1e-9 * expected);
      ++checked;
    }
    EXPECT_GT(checked, 100);
  }
}

TEST(Harris, MapIsFiniteAndSized) {
  std::mt19937_64 rng(27);
  const Image8 img = testsupport::random_image(64, 40, rng);
  const ScoreMap m = harris_response_map(img, {});
  EXPECT_EQ(m.geometry(), img.geometry());
  for (double v : m.data()) EXPECT_TRUE(std::isfinite(v));
}

TEST(Harris, WorkspaceReuseAcrossSizes) {
  std::mt19937_64 rng(28);
  const HarrisKernel k({});
  HarrisKernel::Workspace ws;
  ScoreMap out;
  for (auto [w, h] : {std::pair{40, 30}, {16, 64}, {40, 30}, {7, 9}}) {
    const Image8 img = testsupport::random_image(w, h, rng);
    k.map(img, out, ws);
    EXPECT_EQ(out, harris_response_map(img, {}));
  }
}
