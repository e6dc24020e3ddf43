#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "checkout/eval_types.hpp"
#include "checkout/types.hpp"

namespace checkout::sim {

struct ScoreRange {
  double lo = 0.0;
  double hi = 1.0;
};

// One true product pass: a box of fixed size whose center moves linearly
// from (start_cx, start_cy) at `entry` to (end_cx, end_cy) at `exit`.
struct ProductPass {
  int class_id = 0;
  int entry = 0;
  int exit = 0;
  double start_cx = 0.0;
  double start_cy = 0.0;
  double end_cx = 0.0;
  double end_cy = 0.0;
  double box_w = 0.0;
  double box_h = 0.0;
};

struct ScenarioSpec {
  std::string video_id = "sim";
  double fps = 60.0;
  double width = 1280.0;
  double height = 720.0;
  int duration_frames = 1800;
  int num_classes = 20;
  double roi_fraction = 0.5;  // trajectory centers must stay inside this ROI

  std::vector<ProductPass> products;

  double jitter_sigma = 0.0;        // px, Gaussian center jitter
  double miss_rate = 0.0;           // per-frame detection drop probability
  double spurious_rate = 0.0;       // expected spurious boxes per frame
  double label_noise_rate = 0.0;    // probability of a uniform wrong label
  double spurious_high_fraction = 0.0;  // spurious boxes scored above the filter

  ScoreRange true_det_score{0.60, 0.98};
  ScoreRange true_cls_score{0.75, 0.99};
  ScoreRange spurious_det_score{0.05, 0.29};
  ScoreRange spurious_high_det_score{0.35, 0.60};

  std::uint64_t seed = 1;

  VideoMeta meta() const { return VideoMeta{video_id, fps, width, height}; }
};

void validate_scenario(const ScenarioSpec& spec);

struct ScenarioOutput {
  std::vector<GroundTruthEvent> truths;
  std::vector<FrameGroup> frames;  // ascending frame order, empty frames omitted
};

// Fully determined by (spec, spec.seed).
ScenarioOutput generate_scenario(const ScenarioSpec& spec);

// The noise-free truth: one event per product, (class, entry/fps, exit/fps),
// in entry order.
std::vector<GroundTruthEvent> expected_events(const ScenarioSpec& spec);

// Scenario description in the flat key-value format; products are given as
// indexed keys (product.1.class_id = ...) or generated via auto_products.
ScenarioSpec load_scenario(std::istream& in);
ScenarioSpec load_scenario_file(const std::string& path);

// Deterministically places `count` products on horizontal lanes inside the
// ROI with staggered entry times; used by auto_products and the test
// harnesses.
void add_auto_products(ScenarioSpec& spec, int count, int min_span = 120, int max_span = 240);

}  // namespace checkout::sim
