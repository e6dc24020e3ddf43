#include "checkout/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "checkout/config.hpp"
#include "checkout/errors.hpp"
#include "checkout/tracker.hpp"

namespace checkout::sim {
namespace {

void require_rate(double v, const char* name) {
  if (!(v >= 0.0) || v >= 1.0)
    throw ValidationError(std::string(name) + ": must lie in [0,1)");
}

void require_range(const ScoreRange& r, const char* name) {
  if (!(r.lo >= 0.0) || !(r.hi <= 1.0) || r.lo > r.hi)
    throw ValidationError(std::string(name) + ": require 0 <= lo <= hi <= 1");
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

std::vector<double> class_probs_for(int label, double conf, int num_classes) {
  if (num_classes == 1) return {1.0};
  std::vector<double> probs(static_cast<std::size_t>(num_classes),
                            (1.0 - conf) / static_cast<double>(num_classes - 1));
  probs[static_cast<std::size_t>(label)] = conf;
  return probs;
}

}  // namespace

void validate_scenario(const ScenarioSpec& spec) {
  validate_meta(spec.meta());
  if (spec.duration_frames < 1) throw ValidationError("duration_frames: must be >= 1");
  if (spec.num_classes < 1) throw ValidationError("num_classes: must be >= 1");
  if (spec.label_noise_rate > 0.0 && spec.num_classes < 2)
    throw ValidationError("label_noise_rate: needs num_classes >= 2");
  if (!(spec.roi_fraction > 0.0) || spec.roi_fraction > 1.0)
    throw ValidationError("roi_fraction: must lie in (0,1]");
  if (spec.jitter_sigma < 0.0) throw ValidationError("jitter_sigma: must be >= 0");
  require_rate(spec.miss_rate, "miss_rate");
  require_rate(spec.label_noise_rate, "label_noise_rate");
  if (spec.spurious_rate < 0.0) throw ValidationError("spurious_rate: must be >= 0");
  if (spec.spurious_high_fraction < 0.0 || spec.spurious_high_fraction > 1.0)
    throw ValidationError("spurious_high_fraction: must lie in [0,1]");
  require_range(spec.true_det_score, "true_det_score");
  require_range(spec.true_cls_score, "true_cls_score");
  require_range(spec.spurious_det_score, "spurious_det_score");
  require_range(spec.spurious_high_det_score, "spurious_high_det_score");

  const auto roi = track::Roi::centered(spec.meta(), spec.roi_fraction);
  for (std::size_t i = 0; i < spec.products.size(); ++i) {
    const auto& p = spec.products[i];
    const std::string tag = "product " + std::to_string(i + 1);
    if (p.class_id < 0 || p.class_id >= spec.num_classes)
      throw ValidationError(tag + ": class_id out of range");
    if (p.entry < 0 || p.entry >= p.exit || p.exit >= spec.duration_frames)
      throw ValidationError(tag + ": require 0 <= entry < exit < duration_frames");
    if (!(p.box_w > 0.0) || !(p.box_h > 0.0))
      throw ValidationError(tag + ": box size must be positive");
    if (!roi.contains(p.start_cx, p.start_cy) || !roi.contains(p.end_cx, p.end_cy))
      throw ValidationError(tag + ": trajectory center leaves the ROI");
  }
}

std::vector<GroundTruthEvent> expected_events(const ScenarioSpec& spec) {
  std::vector<GroundTruthEvent> events;
  events.reserve(spec.products.size());
  for (const auto& p : spec.products)
    events.push_back(GroundTruthEvent{spec.video_id, p.class_id,
                                      static_cast<double>(p.entry) / spec.fps,
                                      static_cast<double>(p.exit) / spec.fps});
  std::stable_sort(events.begin(), events.end(),
                   [](const GroundTruthEvent& a, const GroundTruthEvent& b) {
                     if (a.t_start != b.t_start) return a.t_start < b.t_start;
                     return a.class_id < b.class_id;
                   });
  return events;
}

ScenarioOutput generate_scenario(const ScenarioSpec& spec) {
  validate_scenario(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, spec.jitter_sigma > 0.0 ? spec.jitter_sigma : 1.0);

  auto uniform_in = [&](const ScoreRange& r) { return r.lo + (r.hi - r.lo) * unit(rng); };

  ScenarioOutput out;
  out.truths = expected_events(spec);

  for (int frame = 0; frame < spec.duration_frames; ++frame) {
    FrameGroup group;
    group.video_id = spec.video_id;
    group.frame_idx = frame;

    for (const auto& p : spec.products) {
      if (frame < p.entry || frame > p.exit) continue;
      if (spec.miss_rate > 0.0 && unit(rng) < spec.miss_rate) continue;

      const double t = static_cast<double>(frame - p.entry) / static_cast<double>(p.exit - p.entry);
      double cx = lerp(p.start_cx, p.end_cx, t);
      double cy = lerp(p.start_cy, p.end_cy, t);
      if (spec.jitter_sigma > 0.0) {
        cx += jitter(rng);
        cy += jitter(rng);
      }

      int label = p.class_id;
      if (spec.label_noise_rate > 0.0 && unit(rng) < spec.label_noise_rate) {
        std::uniform_int_distribution<int> wrong(0, spec.num_classes - 2);
        const int draw = wrong(rng);
        label = draw >= p.class_id ? draw + 1 : draw;
      }

      Detection det;
      det.video_id = spec.video_id;
      det.frame_idx = frame;
      det.bbox = BBox(cx - 0.5 * p.box_w, cy - 0.5 * p.box_h,
                      cx + 0.5 * p.box_w, cy + 0.5 * p.box_h);
      det.det_score = uniform_in(spec.true_det_score);
      det.model_id = "sim";
      group.items.push_back(
          make_classified(std::move(det),
                          class_probs_for(label, uniform_in(spec.true_cls_score),
                                          spec.num_classes)));
    }

    if (spec.spurious_rate > 0.0) {
      std::poisson_distribution<int> spurious_count(spec.spurious_rate);
      const int extras = spurious_count(rng);
      for (int e = 0; e < extras; ++e) {
        const double w = (0.05 + 0.15 * unit(rng)) * spec.width;
        const double h = (0.05 + 0.15 * unit(rng)) * spec.height;
        const double cx = 0.5 * w + unit(rng) * (spec.width - w);
        const double cy = 0.5 * h + unit(rng) * (spec.height - h);
        const bool high = spec.spurious_high_fraction > 0.0 && unit(rng) < spec.spurious_high_fraction;
        Detection det;
        det.video_id = spec.video_id;
        det.frame_idx = frame;
        det.bbox = BBox(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
        det.det_score = uniform_in(high ? spec.spurious_high_det_score : spec.spurious_det_score);
        det.model_id = "sim";
        std::uniform_int_distribution<int> any_class(0, spec.num_classes - 1);
        group.items.push_back(
            make_classified(std::move(det),
                            class_probs_for(any_class(rng), uniform_in(spec.true_cls_score),
                                            spec.num_classes)));
      }
    }

    if (!group.items.empty()) out.frames.push_back(std::move(group));
  }
  return out;
}

void add_auto_products(ScenarioSpec& spec, int count, int min_span, int max_span) {
  if (count < 1) throw ValidationError("auto_products: must be >= 1");
  if (count > spec.num_classes)
    throw ValidationError("auto_products: needs num_classes >= product count");
  if (min_span < 2 || max_span < min_span)
    throw ValidationError("auto_products: bad span range");

  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto roi = track::Roi::centered(spec.meta(), spec.roi_fraction);

  std::vector<int> classes(static_cast<std::size_t>(spec.num_classes));
  std::iota(classes.begin(), classes.end(), 0);
  std::shuffle(classes.begin(), classes.end(), rng);

  // two horizontal lanes, alternating direction so same-lane successors never
  // meet the previous product's exit position
  const double lane_y[2] = {roi.y1 + 0.25 * (roi.y2 - roi.y1),
                            roi.y1 + 0.75 * (roi.y2 - roi.y1)};

  int entry = 10 + static_cast<int>(unit(rng) * 50.0);
  for (int i = 0; i < count; ++i) {
    ProductPass p;
    p.class_id = classes[static_cast<std::size_t>(i)];
    const int span = min_span + static_cast<int>(unit(rng) * static_cast<double>(max_span - min_span));
    p.entry = entry;
    p.exit = entry + span;

    p.box_w = 180.0 + 40.0 * unit(rng);
    p.box_h = 140.0 + 30.0 * unit(rng);

    const double speed = 1.5 + 1.0 * unit(rng);  // px/frame
    const double max_dist = (roi.x2 - roi.x1) - 20.0;
    const double dist = std::min(speed * static_cast<double>(span), max_dist);
    const double y = lane_y[i % 2] + (unit(rng) - 0.5) * 20.0;
    if (i % 2 == 0) {
      p.start_cx = roi.x1 + 10.0;
      p.end_cx = p.start_cx + dist;
    } else {
      p.start_cx = roi.x2 - 10.0;
      p.end_cx = p.start_cx - dist;
    }
    p.start_cy = y;
    p.end_cy = y;

    spec.products.push_back(p);
    entry = p.entry + span / 2 + 60 + static_cast<int>(unit(rng) * 60.0);
  }

  const int needed = spec.products.back().exit + 10;
  if (needed >= spec.duration_frames)
    throw ValidationError("auto_products: duration_frames too short (needs > " +
                          std::to_string(needed) + ")");
}

ScenarioSpec load_scenario(std::istream& in) {
  ScenarioSpec spec;
  std::map<int, ProductPass> products;
  std::map<int, int> product_fields;  // bitmask of seen fields per product
  int auto_products = 0;
  int auto_min_span = 120;
  int auto_max_span = 240;

  auto as_double = [](const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &pos);
    } catch (const std::exception&) {
      throw ValidationError(key + ": expected a number, got '" + value + "'");
    }
    if (pos != value.size()) throw ValidationError(key + ": expected a number, got '" + value + "'");
    return v;
  };
  auto as_int = [&](const std::string& key, const std::string& value) {
    const double v = as_double(key, value);
    if (v != std::floor(v)) throw ValidationError(key + ": expected an integer");
    return static_cast<int>(v);
  };
  auto as_doubles = [&](const std::string& key, const std::string& value, std::size_t n) {
    std::istringstream ss(value);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(as_double(key, tok));
    if (out.size() != n)
      throw ValidationError(key + ": expected " + std::to_string(n) + " numbers");
    return out;
  };
  auto as_range = [&](const std::string& key, const std::string& value) {
    const auto v = as_doubles(key, value, 2);
    return ScoreRange{v[0], v[1]};
  };

  for (const auto& [key, value] : read_key_values(in)) {
    if (key == "video_id") spec.video_id = value;
    else if (key == "fps") spec.fps = as_double(key, value);
    else if (key == "width") spec.width = as_double(key, value);
    else if (key == "height") spec.height = as_double(key, value);
    else if (key == "duration_frames") spec.duration_frames = as_int(key, value);
    else if (key == "num_classes") spec.num_classes = as_int(key, value);
    else if (key == "roi_fraction") spec.roi_fraction = as_double(key, value);
    else if (key == "jitter_sigma") spec.jitter_sigma = as_double(key, value);
    else if (key == "miss_rate") spec.miss_rate = as_double(key, value);
    else if (key == "spurious_rate") spec.spurious_rate = as_double(key, value);
    else if (key == "label_noise_rate") spec.label_noise_rate = as_double(key, value);
    else if (key == "spurious_high_fraction") spec.spurious_high_fraction = as_double(key, value);
    else if (key == "true_det_score") spec.true_det_score = as_range(key, value);
    else if (key == "true_cls_score") spec.true_cls_score = as_range(key, value);
    else if (key == "spurious_det_score") spec.spurious_det_score = as_range(key, value);
    else if (key == "spurious_high_det_score") spec.spurious_high_det_score = as_range(key, value);
    else if (key == "seed") spec.seed = static_cast<std::uint64_t>(as_double(key, value));
    else if (key == "auto_products") auto_products = as_int(key, value);
    else if (key == "auto_min_span") auto_min_span = as_int(key, value);
    else if (key == "auto_max_span") auto_max_span = as_int(key, value);
    else if (key.rfind("product.", 0) == 0) {
      const auto rest = key.substr(8);
      const auto dot = rest.find('.');
      if (dot == std::string::npos)
        throw ValidationError("unknown scenario key '" + key + "'");
      const int idx = as_int(key, rest.substr(0, dot));
      const std::string field = rest.substr(dot + 1);
      auto& p = products[idx];
      auto& mask = product_fields[idx];
      if (field == "class_id") { p.class_id = as_int(key, value); mask |= 1; }
      else if (field == "entry") { p.entry = as_int(key, value); mask |= 2; }
      else if (field == "exit") { p.exit = as_int(key, value); mask |= 4; }
      else if (field == "path") {
        const auto v = as_doubles(key, value, 4);
        p.start_cx = v[0]; p.start_cy = v[1]; p.end_cx = v[2]; p.end_cy = v[3];
        mask |= 8;
      } else if (field == "size") {
        const auto v = as_doubles(key, value, 2);
        p.box_w = v[0]; p.box_h = v[1];
        mask |= 16;
      } else {
        throw ValidationError("unknown scenario key '" + key + "'");
      }
    } else {
      throw ValidationError("unknown scenario key '" + key + "'");
    }
  }

  for (const auto& [idx, mask] : product_fields)
    if (mask != 31)
      throw ValidationError("product." + std::to_string(idx) +
                            ": needs class_id, entry, exit, path, size");
  for (auto& [idx, p] : products) spec.products.push_back(p);

  if (auto_products > 0) {
    if (!spec.products.empty())
      throw ValidationError("auto_products: cannot be combined with explicit products");
    add_auto_products(spec, auto_products, auto_min_span, auto_max_span);
  }
  validate_scenario(spec);
  return spec;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  return load_scenario(in);
}

}  // namespace checkout::sim
