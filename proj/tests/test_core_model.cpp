#include <random>

#include "checkout/geometry.hpp"
#include "checkout/types.hpp"
#include "doctest.h"
#include "oracles.hpp"

using checkout::area;
using checkout::BBox;
using checkout::iou;
using checkout::ValidationError;

TEST_SUITE_BEGIN("core_model");

TEST_CASE("area of axis-aligned boxes") {
  CHECK(area(BBox(0, 0, 10, 10)) == doctest::Approx(100.0));
  CHECK(area(BBox(0, 0, 1, 1)) == doctest::Approx(1.0));
  CHECK(area(BBox(2.5, 3.0, 7.5, 9.0)) == doctest::Approx(30.0));  // 5 x 6
}

TEST_CASE("degenerate and non-finite boxes are rejected") {
  CHECK_THROWS_AS(BBox(0, 0, 0, 10), ValidationError);
  CHECK_THROWS_AS(BBox(0, 0, 10, 0), ValidationError);
  CHECK_THROWS_AS(BBox(5, 5, 4, 10), ValidationError);
  CHECK_THROWS_AS(BBox(0, 0, std::numeric_limits<double>::infinity(), 1), ValidationError);
  CHECK_THROWS_AS(BBox(std::nan(""), 0, 1, 1), ValidationError);
}

TEST_CASE("iou basic cases") {
  const BBox a(0, 0, 10, 10);
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(BBox(0, 0, 10, 10), BBox(20, 20, 30, 30)) == 0.0);
  // intersection 50, union 150
  CHECK(iou(BBox(0, 0, 10, 10), BBox(5, 0, 15, 10)) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("iou symmetry, range, and identity over random pairs") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const BBox a = oracles::random_box(rng);
    const BBox b = oracles::random_box(rng);
    const double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(iou(a, a) == 1.0);
  }
}

TEST_CASE("translation leaves iou unchanged and area invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const BBox a = oracles::random_box(rng);
    const BBox b = oracles::random_box(rng);
    const double dx = shift(rng);
    const double dy = shift(rng);
    const BBox at(a.x1 + dx, a.y1 + dy, a.x2 + dx, a.y2 + dy);
    const BBox bt(b.x1 + dx, b.y1 + dy, b.x2 + dx, b.y2 + dy);
    CHECK(iou(at, bt) == doctest::Approx(iou(a, b)).epsilon(1e-12));
    CHECK(area(at) == doctest::Approx(area(a)).epsilon(1e-12));
  }
}

TEST_CASE("scaling both dimensions by k multiplies area by k^2") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const BBox a = oracles::random_box(rng);
    const double k = scale(rng);
    const BBox s(a.x1 * k, a.y1 * k, a.x2 * k, a.y2 * k);
    CHECK(area(s) == doctest::Approx(k * k * area(a)).epsilon(1e-9));
  }
}

TEST_CASE("make_classified derives label and cls_score") {
  checkout::Detection det;
  det.video_id = "v";
  det.frame_idx = 0;
  det.bbox = BBox(0, 0, 10, 10);
  det.det_score = 0.9;
  det.model_id = "m";

  auto item = checkout::make_classified(det, {0.1, 0.7, 0.2});
  CHECK(item.label == 1);
  CHECK(item.cls_score == doctest::Approx(0.7));

  // lowest index wins ties
  item = checkout::make_classified(det, {0.4, 0.4, 0.2});
  CHECK(item.label == 0);

  CHECK_THROWS_AS(checkout::make_classified(det, {0.5, 0.4}), ValidationError);
  CHECK_THROWS_AS(checkout::make_classified(det, {}), ValidationError);

  det.det_score = 1.2;
  CHECK_THROWS_AS(checkout::make_classified(det, {1.0}), ValidationError);
  det.det_score = 0.9;
  det.frame_idx = -1;
  CHECK_THROWS_AS(checkout::make_classified(det, {1.0}), ValidationError);
}

TEST_SUITE_END();
