#include <sstream>

#include "checkout/eval.hpp"
#include "checkout/pipeline.hpp"
#include "checkout/simulator.hpp"
#include "doctest.h"

using namespace checkout;

namespace {

sim::ScenarioSpec noise_free_scenario(std::uint64_t seed, int products) {
  sim::ScenarioSpec spec;
  spec.video_id = "v" + std::to_string(seed);
  spec.duration_frames = 2400;
  spec.num_classes = 24;
  spec.seed = seed;
  sim::add_auto_products(spec, products);
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("noise-free scenario is a fixed point of the pipeline") {
  PipelineConfig cfg;
  cfg.timestamp_rounding = Rounding::None;

  for (std::uint64_t seed : {1, 2, 3}) {
    const auto spec = noise_free_scenario(seed, 3);
    const auto scenario = sim::generate_scenario(spec);

    pipeline::VideoInput input;
    input.meta = spec.meta();
    input.model_streams = {scenario.frames};
    const auto result = pipeline::run_video(input, cfg);

    REQUIRE(result.events.size() == scenario.truths.size());
    const auto counts = eval::match_events(result.events, scenario.truths,
                                           cfg.event_match_rule, cfg.event_match_window_s);
    CHECK(counts.tp == static_cast<long long>(scenario.truths.size()));
    CHECK(counts.fp == 0);
    CHECK(counts.fn == 0);

    // every timestamp within half a frame of the true midpoint
    for (const auto& p : spec.products) {
      const double want = static_cast<double>(p.entry + p.exit) / (2.0 * spec.fps);
      double best = 1e18;
      for (const auto& ev : result.events)
        if (ev.class_id == p.class_id) best = std::min(best, std::abs(ev.timestamp_s - want));
      CHECK(best <= 0.5 / spec.fps);
    }
  }
}

TEST_CASE("multi-model identical streams fuse to the same events") {
  PipelineConfig cfg;
  cfg.timestamp_rounding = Rounding::None;
  const auto spec = noise_free_scenario(11, 2);
  const auto scenario = sim::generate_scenario(spec);

  pipeline::VideoInput single;
  single.meta = spec.meta();
  single.model_streams = {scenario.frames};
  const auto one = pipeline::run_video(single, cfg);

  pipeline::VideoInput doubled;
  doubled.meta = spec.meta();
  doubled.model_streams = {scenario.frames, scenario.frames};
  const auto two = pipeline::run_video(doubled, cfg);

  REQUIRE(one.events.size() == two.events.size());
  for (std::size_t i = 0; i < one.events.size(); ++i) {
    CHECK(one.events[i].class_id == two.events[i].class_id);
    CHECK(one.events[i].timestamp_s == doctest::Approx(two.events[i].timestamp_s).epsilon(1e-9));
  }
}

TEST_CASE("run_videos handles multiple videos and stays deterministic") {
  PipelineConfig cfg;
  cfg.timestamp_rounding = Rounding::None;

  std::vector<pipeline::VideoInput> inputs;
  std::vector<GroundTruthEvent> all_truths;
  std::vector<VideoMeta> metas;
  std::vector<std::vector<FrameGroup>> combined(1);
  for (std::uint64_t seed : {21, 22, 23, 24}) {
    auto spec = noise_free_scenario(seed, 2);
    spec.jitter_sigma = 1.0;
    spec.miss_rate = 0.02;
    const auto scenario = sim::generate_scenario(spec);
    pipeline::VideoInput input;
    input.meta = spec.meta();
    input.model_streams = {scenario.frames};
    inputs.push_back(input);
    metas.push_back(spec.meta());
    all_truths.insert(all_truths.end(), scenario.truths.begin(), scenario.truths.end());
    combined[0].insert(combined[0].end(), scenario.frames.begin(), scenario.frames.end());
  }

  const auto serial = pipeline::run_videos(inputs, cfg, ExecMode::Serial);
  const auto parallel = pipeline::run_videos(inputs, cfg, ExecMode::Parallel);
  const auto bounded = pipeline::run_videos(inputs, cfg, ExecMode::Parallel, 2);
  REQUIRE(serial.size() == parallel.size());
  REQUIRE(serial.size() == bounded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].video_id == parallel[i].video_id);
    CHECK(serial[i].class_id == parallel[i].class_id);
    CHECK(serial[i].timestamp_s == parallel[i].timestamp_s);
    CHECK(serial[i].timestamp_s == bounded[i].timestamp_s);
  }

  // split_by_video reconstructs the same per-video inputs
  const auto split = pipeline::split_by_video(combined, metas);
  REQUIRE(split.size() == inputs.size());
  const auto from_split = pipeline::run_videos(split, cfg, ExecMode::Serial);
  REQUIRE(from_split.size() == serial.size());
  for (std::size_t i = 0; i < serial.size(); ++i)
    CHECK(serial[i].timestamp_s == from_split[i].timestamp_s);

  const auto counts = eval::match_events(serial, all_truths, cfg.event_match_rule,
                                         cfg.event_match_window_s);
  CHECK(counts.fn == 0);
}

TEST_CASE("split_by_video requires metadata for every video") {
  std::vector<std::vector<FrameGroup>> streams(1);
  FrameGroup g;
  g.video_id = "vX";
  g.frame_idx = 0;
  streams[0].push_back(g);
  CHECK_THROWS_AS(pipeline::split_by_video(streams, std::vector<VideoMeta>{}), ValidationError);
}

TEST_SUITE_END();
