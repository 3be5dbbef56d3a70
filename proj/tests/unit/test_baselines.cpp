#include <gtest/gtest.h>

#include <random>

#include "evcorner/baselines.hpp"
#include "evcorner/error.hpp"
#include "evcorner/synth.hpp"
#include "oracles/arc_enumerator.hpp"
#include "oracles/naive_harris.hpp"
#include "support.hpp"

using namespace evc;

namespace {

// Random ring values with many ties, the hard case for arc logic.
std::vector<Timestamp> random_ring(std::size_t n, std::mt19937_64& rng) {
  std::vector<Timestamp> ring(n);
  std::uniform_int_distribution<Timestamp> d(0, 6);
  for (auto& v : ring) v = d(rng);
  return ring;
}

// Arc of `len` newest elements starting at `start`; the rest strictly older.
std::vector<Timestamp> clean_arc(std::size_t n, int start, int len, std::mt19937_64& rng) {
  std::vector<Timestamp> ring(n);
  std::uniform_int_distribution<Timestamp> old_t(0, 99), new_t(100, 199);
  for (std::size_t k = 0; k < n; ++k) ring[(start + k) % n] = static_cast<int>(k) < len ? new_t(rng) : old_t(rng);
  return ring;
}

bool subset(const std::vector<CornerTag>& a, const std::vector<CornerTag>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_corner && !b[i].is_corner) return false;
  }
  return true;
}

std::size_t count(const std::vector<CornerTag>& tags) {
  std::size_t n = 0;
  for (const auto& t : tags) n += t.is_corner;
  return n;
}

}  // namespace

TEST(Rings, OffsetsLieOnTheirCircle) {
  for (const auto& o : kRing3) EXPECT_NEAR(std::hypot(o.dx, o.dy), 3.0, 0.5);
  for (const auto& o : kRing4) EXPECT_NEAR(std::hypot(o.dx, o.dy), 4.0, 0.5);
}

TEST(ArcConfig, Validation) {
  EXPECT_NO_THROW(validate(ArcRingConfig{}));
  EXPECT_THROW(validate(ArcRingConfig{4, 4, 3, 6, 4, 8}), InvalidParameter);
  EXPECT_THROW(validate(ArcRingConfig{3, 4, 7, 6, 4, 8}), InvalidParameter);
  EXPECT_THROW(validate(ArcRingConfig{3, 4, 3, 16, 4, 8}), InvalidParameter);
  EXPECT_THROW(validate(ArcRingConfig{3, 4, 3, 6, 0, 8}), InvalidParameter);
  EXPECT_THROW(validate(EHarrisConfig{0, {}, 0.5}), InvalidParameter);
}

TEST(FastRing, MatchesEnumeratorOnRandomRings) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 16 : 20;
    const auto ring = trial % 3 == 0 ? clean_arc(n, rng() % n, 1 + rng() % (n - 1), rng)
                                     : random_ring(n, rng);
    const int lmin = 1 + static_cast<int>(rng() % 6);
    const int lmax = lmin + static_cast<int>(rng() % (n - lmin));
    const int got = fast_ring_arc(ring, lmin, lmax);
    ASSERT_EQ(got > 0, oracle::fast_accepts(ring, lmin, lmax)) << trial;
    if (got > 0) {
      ASSERT_GE(got, lmin);
      ASSERT_LE(got, lmax);
    }
  }
}

TEST(FastRing, CleanArcAcceptedIffInBounds) {
  // Equal arc values, so no shorter sub-arc is strictly newest.
  for (int len = 1; len < 16; ++len) {
    std::vector<Timestamp> ring(16, 10);
    for (int k = 0; k < len; ++k) ring[(5 + k) % 16] = 50;
    EXPECT_EQ(fast_ring_arc(ring, 3, 6) > 0, len >= 3 && len <= 6) << len;
  }
}

TEST(ArcRing, MatchesEnumeratorOnRandomRings) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 16 : 20;
    const auto ring = trial % 3 == 0 ? clean_arc(n, rng() % n, 1 + rng() % (n - 1), rng)
                                     : random_ring(n, rng);
    const int lmin = 1 + static_cast<int>(rng() % 6);
    const int lmax = lmin + static_cast<int>(rng() % (n - lmin));
    ASSERT_EQ(arc_newest_segment(ring, lmin), oracle::arc_segment(ring, lmin)) << trial;
    ASSERT_EQ(arc_ring_accepts(ring, lmin, lmax), oracle::arc_accepts(ring, lmin, lmax)) << trial;
  }
}

TEST(ArcRing, CleanArcSegmentIsTheArc) {
  for (int len = 3; len < 16; ++len) {
    std::vector<Timestamp> ring(16, 10);
    for (int k = 0; k < len; ++k) ring[(7 + k) % 16] = 50;
    EXPECT_EQ(arc_newest_segment(ring, 3), len);
    const bool convex = len >= 3 && len <= 6;
    const bool concave = len >= 10 && len <= 13;
    EXPECT_EQ(arc_ring_accepts(ring, 3, 6), convex || concave) << len;
  }
}

TEST(ArcRing, StraightEdgeRejected) {
  std::vector<Timestamp> inner(16, 1), outer(20, 1);
  for (int k = 0; k < 8; ++k) inner[k] = 100;
  for (int k = 0; k < 10; ++k) outer[k] = 100;
  EXPECT_FALSE(arc_ring_accepts(inner, 3, 6));
  EXPECT_FALSE(arc_ring_accepts(outer, 4, 8));
  EXPECT_EQ(fast_ring_arc(inner, 3, 6), 0);
}

TEST(Detectors, FirstEventIsNotCorner) {
  const EventStream s({32, 32}, {{100, 16, 16, true}});
  EXPECT_FALSE(fast_detect(s, {})[0].is_corner);
  EXPECT_FALSE(arc_detect(s, {})[0].is_corner);
  EXPECT_FALSE(eharris_detect(s, {})[0].is_corner);
}

TEST(Detectors, PreserveCountAndOrder) {
  std::mt19937_64 rng(45);
  const EventStream s({50, 40}, testsupport::random_events(3000, 50, 40, rng));
  for (auto kind : {DetectorKind::luvharris, DetectorKind::eharris, DetectorKind::fast,
                    DetectorKind::arc}) {
    const auto tags = run_detector(kind, s, {});
    ASSERT_EQ(tags.size(), s.size()) << to_string(kind);
    for (std::size_t i = 0; i < s.size(); ++i) ASSERT_EQ(tags[i].event, s.events()[i]);
  }
}

TEST(Detectors, RejectOutOfGeometry) {
  const DetectorSuite suite;
  for (auto kind : {DetectorKind::luvharris, DetectorKind::eharris, DetectorKind::fast,
                    DetectorKind::arc}) {
    auto d = make_detector(kind, {16, 16}, suite);
    std::vector<CornerTag> out;
    EXPECT_THROW(d->process(std::vector<Event>{{0, 1, 16, true}}, out), GeometryViolation);
    EXPECT_TRUE(d->phase_counters().has_value());
  }
}

TEST(Detectors, KindNames) {
  EXPECT_EQ(parse_detector_kind("luvHarris"), DetectorKind::luvharris);
  EXPECT_EQ(parse_detector_kind("eharris"), DetectorKind::eharris);
  EXPECT_EQ(parse_detector_kind("FAST"), DetectorKind::fast);
  EXPECT_EQ(parse_detector_kind("arc"), DetectorKind::arc);
  EXPECT_THROW(parse_detector_kind("sift"), InvalidParameter);
  for (auto kind : {DetectorKind::luvharris, DetectorKind::eharris, DetectorKind::fast,
                    DetectorKind::arc}) {
    EXPECT_EQ(parse_detector_kind(to_string(kind)), kind);
  }
}

TEST(EHarris, InfiniteWindowEqualsStaticHarris) {
  // A window longer than the stream makes every fired pixel stay on, so the
  // last event sees Harris on the accumulated binary image.
  std::mt19937_64 rng(46);
  const auto events = testsupport::random_events(400, 24, 20, rng);
  EHarrisConfig c;
  c.window = 1'000'000'000;
  const auto tags = eharris_detect(EventStream({24, 20}, events), c);
  Image8 img(24, 20, 0);
  for (std::size_t i = 0; i < events.size(); ++i) {
    img.at(events[i].x, events[i].y) = 255;
    const auto read = [&](int x, int y) { return double(img.at(x, y)); };
    const double ref = oracle::naive_harris_at(read, 24, 20, events[i].x, events[i].y, {});
    ASSERT_NEAR(tags[i].score, ref, 1e-9 * std::max(1.0, std::abs(ref))) << i;
  }
}

TEST(EHarris, SlowReplayDegradesCornerDetection) {
  // The window matches the motion at the fixture's speed; slowed 100x the
  // binary image thins to a line and apex responses collapse.
  const synth::Recording r = synth::make_fixture(synth::Fixture::corner90);
  std::vector<Event> slow = r.stream.events();
  const Timestamp t0 = slow.front().t;
  for (Event& e : slow) e.t = t0 + (e.t - t0) * 100;
  const auto fast_tags = eharris_detect(r.stream, {});
  const auto slow_tags = eharris_detect(EventStream(r.stream.geometry(), slow), {});
  std::size_t fast_hits = 0, slow_hits = 0;
  for (std::size_t i = 0; i < fast_tags.size(); ++i) {
    if (r.corner_distance[i] > 2.0) continue;
    fast_hits += fast_tags[i].is_corner;
    slow_hits += slow_tags[i].is_corner;
  }
  EXPECT_GT(fast_hits, 0u);
  EXPECT_LT(slow_hits, fast_hits);
}

TEST(Fixtures, FastSubsetOfArcOnConvexCorner) {
  const EventStream s = synth::make_fixture(synth::Fixture::corner90).stream;
  const auto fast = fast_detect(s, {});
  const auto arc = arc_detect(s, {});
  EXPECT_TRUE(subset(fast, arc));
  EXPECT_GT(count(fast), 0u);
}

TEST(Fixtures, ConcaveCornerSeparatesFastFromArc) {
  const synth::Recording r = synth::make_fixture(synth::Fixture::corner270);
  const auto fast = fast_detect(r.stream, {});
  const auto arc = arc_detect(r.stream, {});
  std::size_t fast_apex = 0, arc_apex = 0;
  for (std::size_t i = 0; i < fast.size(); ++i) {
    if (r.corner_distance[i] > 2.0) continue;
    fast_apex += fast[i].is_corner;
    arc_apex += arc[i].is_corner;
  }
  EXPECT_EQ(fast_apex, 0u);
  EXPECT_GT(arc_apex, 0u);
}

TEST(Sweep, RejectsTooFewPoints) {
  const EventStream s({16, 16}, {});
  EXPECT_THROW(decision_parameter_sweep(DetectorKind::arc, {}, s, 1), InvalidParameter);
}

TEST(Sweep, NestedAndRecallMonotone) {
  const EventStream s = synth::make_fixture(synth::Fixture::corner270).stream;
  for (auto kind : {DetectorKind::luvharris, DetectorKind::eharris, DetectorKind::fast,
                    DetectorKind::arc}) {
    const auto sweep = decision_parameter_sweep(kind, {}, s, 12);
    ASSERT_GE(sweep.size(), 2u) << to_string(kind);
    for (std::size_t k = 1; k < sweep.size(); ++k) {
      ASSERT_EQ(sweep[k].tags.size(), s.size());
      EXPECT_TRUE(subset(sweep[k - 1].tags, sweep[k].tags)) << to_string(kind) << " point " << k;
    }
    EXPECT_GT(count(sweep.back().tags), count(sweep.front().tags)) << to_string(kind);
  }
}

TEST(Sweep, ArcSweepSpansNinetyToOneEighty) {
  const EventStream s = synth::make_fixture(synth::Fixture::corner90).stream;
  const auto sweep = decision_parameter_sweep(DetectorKind::arc, {}, s, 50);
  // collapsed settings keep the first angle of their run
  EXPECT_EQ(sweep.front().parameter, 90.0);
  EXPECT_GT(sweep.back().parameter, 170.0);
  for (std::size_t k = 1; k < sweep.size(); ++k) EXPECT_GT(sweep[k].parameter, sweep[k - 1].parameter);
  const auto two = decision_parameter_sweep(DetectorKind::fast, {}, s, 2);
  EXPECT_EQ(two.size(), 2u);
}
