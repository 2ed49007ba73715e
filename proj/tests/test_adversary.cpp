#include <doctest.h>

#include "percsim/adversary.hpp"

#include <cmath>
#include <utility>

using namespace percsim;

namespace {

DetectionSet nominal_frame() {
  DetectionSet ds;
  ds.frame_time = 0.7;
  ds.detections.push_back({{480.0, 360.0, 170.0, 136.0}, 80, 0.9, false});
  ds.detections.push_back({{200.0, 300.0, 40.0, 40.0}, 4, 0.8, false});
  return ds;
}

}  // namespace

TEST_CASE("misclassification with p = 0 never fires") {
  MisclassSchedule s({100, 0.0, 4}, 1000, make_stream(1, 2, Subsystem::Misclassification));
  const DetectionSet ds = nominal_frame();
  for (int k = 0; k < 1000; ++k) {
    const DetectionSet out = apply_misclassification(ds, s, k, 80);
    CHECK(out.detections[0].class_id == 80);
  }
}

TEST_CASE("misclassification with p = 1 relabels every target detection") {
  MisclassSchedule s({1000, 1.0, 4}, 1000, make_stream(1, 2, Subsystem::Misclassification));
  const DetectionSet ds = nominal_frame();
  for (int k = 0; k < 1000; ++k) {
    const DetectionSet out = apply_misclassification(ds, s, k, 80);
    CHECK(out.detections[0].class_id == 4);
    CHECK(out.detections[0].box.x == ds.detections[0].box.x);
  }
  CHECK(ds.detections[0].class_id == 80);
}

TEST_CASE("misclassification blocks are constant runs") {
  MisclassSchedule s({200, 0.5, 4}, 1000, make_stream(3, 2, Subsystem::Misclassification));
  CHECK(s.block_length() == 5);
  for (int b = 0; b < 200; ++b) {
    const bool first = s.attacked(5 * b);
    for (int k = 5 * b + 1; k < 5 * b + 5; ++k) CHECK(s.attacked(k) == first);
  }
  CHECK_THROWS_AS(s.attacked(1000), std::out_of_range);
}

TEST_CASE("block length rounds up") {
  MisclassSchedule s({3, 0.5, 4}, 10, make_stream(3, 2, Subsystem::Misclassification));
  CHECK(s.block_length() == 4);
  CHECK(s.block_of(9) == 2);
}

TEST_CASE("realization does not depend on query order") {
  MisclassSchedule fwd({1000, 0.3, 4}, 1000, make_stream(8, 2, Subsystem::Misclassification));
  MisclassSchedule rev({1000, 0.3, 4}, 1000, make_stream(8, 2, Subsystem::Misclassification));
  std::vector<bool> a(1000), b(1000);
  for (int k = 0; k < 1000; ++k) a[static_cast<std::size_t>(k)] = fwd.attacked(k);
  for (int k = 999; k >= 0; --k) b[static_cast<std::size_t>(k)] = rev.attacked(k);
  CHECK(a == b);
}

TEST_CASE("long-run attacked fraction matches p") {
  const int horizon = 100000;
  const double p = 0.37;
  MisclassSchedule s({horizon, p, 4}, horizon, make_stream(17, 2, Subsystem::Misclassification));
  int hits = 0;
  for (int k = 0; k < horizon; ++k) hits += s.attacked(k) ? 1 : 0;
  const double sigma = std::sqrt(p * (1 - p) / horizon);
  CHECK(std::abs(static_cast<double>(hits) / horizon - p) < 3.0 * sigma);
}

TEST_CASE("block-level attack rate matches p at n = 200") {
  // 500 independent horizons of 1000 steps = 10^5 block draws.
  const double p = 0.4;
  long hits = 0;
  long blocks = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    MisclassSchedule s({200, p, 4}, 1000, make_stream(seed, 2, Subsystem::Misclassification));
    for (int b = 0; b < 200; ++b) {
      hits += s.attacked(5 * b) ? 1 : 0;
      ++blocks;
    }
  }
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(blocks));
  CHECK(std::abs(static_cast<double>(hits) / static_cast<double>(blocks) - p) < 3.0 * sigma);
}

TEST_CASE("misclassification spec validation") {
  CHECK_THROWS_AS(MisclassSpec({0, 0.5, 4}).validate(10), ConfigError);
  CHECK_THROWS_AS(MisclassSpec({11, 0.5, 4}).validate(10), ConfigError);
  CHECK_THROWS_AS(MisclassSpec({5, 1.5, 4}).validate(10), ConfigError);
}

TEST_CASE("mislocalization") {
  const CameraIntrinsics intr;
  const DetectionSet ds = nominal_frame();
  Rng rng = make_stream(4, 2, Subsystem::Mislocalization);

  SUBCASE("b = 0 is the identity") {
    const DetectionSet out = apply_mislocalization(ds, {0, 0.3}, 80, intr, rng);
    CHECK(out.size() == ds.size());
  }
  SUBCASE("q = 0 gives boosted duplicates") {
    MislocStats stats;
    const DetectionSet out = apply_mislocalization(ds, {10, 0.0}, 80, intr, rng, &stats);
    REQUIRE(out.size() == 12);
    CHECK(stats.injected == 10);
    for (std::size_t i = 2; i < out.size(); ++i) {
      const Detection& d = out.detections[i];
      CHECK(d.injected);
      CHECK(d.class_id == 80);
      CHECK(d.pr == doctest::Approx(1.0));
      CHECK(d.box.x == doctest::Approx(480.0));
      CHECK(d.box.w == doctest::Approx(170.0));
    }
  }
  SUBCASE("b = 10, q = 0.3 gives 11 target candidates with scaled corners") {
    const DetectionSet out = apply_mislocalization(ds, {10, 0.3}, 80, intr, rng);
    int target = 0;
    const BoxCorners c0 = ds.detections[0].box.corners();
    for (const Detection& d : out.detections) {
      if (d.class_id != 80) continue;
      ++target;
      if (!d.injected) continue;
      const BoxCorners c = d.box.corners();
      CHECK(d.box.valid());
      // Each corner coordinate comes from a factor in [0.7, 1.3] (before sorting and clipping).
      const double lo = 0.7 * std::min(c0.x1, c0.x2) - 1e-9;
      const double hi = std::min(1.3 * std::max(c0.x1, c0.x2), intr.width_px) + 1e-9;
      CHECK(c.x1 >= lo);
      CHECK(c.x2 <= hi);
      CHECK(d.pr == doctest::Approx(1.0));
    }
    CHECK(target == 11);
  }
  SUBCASE("inputs are untouched and other classes are ignored") {
    const DetectionSet before = ds;
    const DetectionSet out = apply_mislocalization(ds, {3, 0.5}, 4, intr, rng);
    CHECK(out.size() == 5);
    CHECK(ds.size() == before.size());
    CHECK(ds.detections[0].box.x == before.detections[0].box.x);
  }
  SUBCASE("injected boxes are never re-perturbed") {
    const DetectionSet once = apply_mislocalization(ds, {2, 0.3}, 80, intr, rng);
    const DetectionSet twice = apply_mislocalization(once, {2, 0.3}, 80, intr, rng);
    CHECK(twice.size() == once.size() + 2);
  }
  SUBCASE("degenerate boxes are redrawn then skipped") {
    DetectionSet tiny;
    tiny.detections.push_back({{0.2, 0.2, 0.2, 0.2}, 80, 0.9, false});
    MislocStats stats;
    const DetectionSet out = apply_mislocalization(tiny, {5, 0.1}, 80, intr, rng, &stats);
    CHECK(out.size() == 1);
    CHECK(stats.skipped == 5);
  }
}

TEST_CASE("frame latency reproduces the nominal and overloaded iteration times") {
  const OverloadModel ov{0.034, 0.001};
  CHECK(frame_latency(1, ov) == doctest::Approx(0.035).epsilon(1e-12));
  CHECK(frame_latency(7, ov) == doctest::Approx(0.041).epsilon(1e-12));
  CHECK(frame_latency(0, ov) == 0.034);
  for (std::size_t m = 0; m < 50; ++m) CHECK(frame_latency(m + 1, ov) >= frame_latency(m, ov));
  CHECK(next_period(0, {0.01, 0.001}, 0.02) == 0.02);
  CHECK(next_period(11, ov, 0.02) == doctest::Approx(0.045));
}

TEST_CASE("detection distance") {
  const Detection a{BoundingBox::from_corners({10, 20, 30, 40}), 80, 0.9, false};
  CHECK(detection_distance(a, a) == 0.0);
  Detection other_class = a;
  other_class.class_id = 4;
  CHECK(std::isinf(detection_distance(a, other_class)));
  const Detection shifted{BoundingBox::from_corners({13, 24, 30, 40}), 80, 0.5, false};
  CHECK(detection_distance(a, shifted) == doctest::Approx(5.0));

  DetectionSet s1, s2;
  s1.detections = {a, a};
  s2.detections = {shifted, other_class};
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 0}, {1, 1}};
  const auto d = detection_distance(s1, s2, pairs);
  CHECK(d[0] == doctest::Approx(5.0));
  CHECK(std::isinf(d[1]));
}
