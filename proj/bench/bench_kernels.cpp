// Serial vs OpenMP throughput of the batch kernels on simulator-generated
// workloads. Run: ./bench_kernels [--benchmark_filter=...]
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "checkout/fusion.hpp"
#include "checkout/pipeline.hpp"
#include "checkout/simulator.hpp"
#include "checkout/voting.hpp"

namespace {

using namespace checkout;

std::vector<fusion::ModelDetections> fusion_workload(int num_models, int num_frames,
                                                     int boxes_per_frame) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> pos(0.0, 1200.0);
  std::uniform_real_distribution<double> extent(40.0, 200.0);
  std::uniform_real_distribution<double> score(0.05, 1.0);
  std::uniform_real_distribution<double> shift(-4.0, 4.0);

  // shared object layout per frame so clusters actually form across models
  std::vector<fusion::ModelDetections> models(static_cast<std::size_t>(num_models));
  for (int f = 0; f < num_frames; ++f) {
    std::vector<BBox> layout;
    for (int b = 0; b < boxes_per_frame; ++b) {
      const double x = pos(rng), y = pos(rng) * 0.5;
      layout.push_back(BBox(x, y, x + extent(rng), y + extent(rng)));
    }
    for (int m = 0; m < num_models; ++m) {
      auto& model = models[static_cast<std::size_t>(m)];
      model.model_id = "m" + std::to_string(m);
      for (const auto& box : layout) {
        Detection d;
        d.video_id = "bench";
        d.frame_idx = f;
        d.bbox = BBox(box.x1 + shift(rng), box.y1 + shift(rng), box.x2 + shift(rng),
                      box.y2 + shift(rng));
        d.det_score = score(rng);
        d.model_id = model.model_id;
        model.frames[FrameKey{"bench", f}].push_back(d);
      }
    }
  }
  return models;
}

std::vector<track::Track> voting_workload(int num_tracks, int items_per_track) {
  std::mt19937_64 rng(54321);
  std::uniform_real_distribution<double> pos(100.0, 900.0);
  std::uniform_real_distribution<double> score(0.3, 1.0);
  std::uniform_int_distribution<int> label(0, 49);

  std::vector<track::Track> tracks;
  for (int t = 0; t < num_tracks; ++t) {
    track::Track tr;
    tr.track_id = t + 1;
    for (int i = 0; i < items_per_track; ++i) {
      Detection d;
      d.video_id = "bench";
      d.frame_idx = t * items_per_track + i;
      const double x = pos(rng), y = pos(rng) * 0.6;
      d.bbox = BBox(x, y, x + 150.0, y + 120.0);
      d.det_score = score(rng);
      d.model_id = "m";
      std::vector<double> probs(50, 0.1 / 49.0);
      probs[static_cast<std::size_t>(label(rng))] = 0.9;
      tr.items.push_back(make_classified(d, probs));
    }
    tr.first_frame = tr.items.front().detection.frame_idx;
    tr.last_frame = tr.items.back().detection.frame_idx;
    tracks.push_back(std::move(tr));
  }
  return tracks;
}

std::vector<pipeline::VideoInput> pipeline_workload(int num_videos) {
  std::vector<pipeline::VideoInput> inputs;
  for (int v = 0; v < num_videos; ++v) {
    sim::ScenarioSpec spec;
    spec.video_id = "bench" + std::to_string(v);
    spec.duration_frames = 2400;
    spec.num_classes = 50;
    spec.seed = 1000 + static_cast<std::uint64_t>(v);
    spec.jitter_sigma = 2.0;
    spec.miss_rate = 0.05;
    spec.spurious_rate = 0.05;
    spec.label_noise_rate = 0.05;
    sim::add_auto_products(spec, 4);
    pipeline::VideoInput input;
    input.meta = spec.meta();
    input.model_streams = {sim::generate_scenario(spec).frames};
    inputs.push_back(std::move(input));
  }
  return inputs;
}

void BM_FuseAllFrames(benchmark::State& state) {
  const auto mode = state.range(0) == 0 ? ExecMode::Serial : ExecMode::Parallel;
  static const auto models = fusion_workload(4, 600, 12);
  for (auto _ : state) {
    auto fused = fusion::fuse_all_frames(models, 0.55, mode);
    benchmark::DoNotOptimize(fused);
  }
}

void BM_ResolveEvents(benchmark::State& state) {
  const auto mode = state.range(0) == 0 ? ExecMode::Serial : ExecMode::Parallel;
  static const auto tracks = voting_workload(400, 120);
  const VideoMeta meta{"bench", 60.0, 1280.0, 720.0};
  PipelineConfig cfg;
  for (auto _ : state) {
    auto events = vote::resolve_events(tracks, meta, cfg, mode);
    benchmark::DoNotOptimize(events);
  }
}

void BM_RunVideos(benchmark::State& state) {
  const auto mode = state.range(0) == 0 ? ExecMode::Serial : ExecMode::Parallel;
  static const auto inputs = pipeline_workload(8);
  PipelineConfig cfg;
  cfg.timestamp_rounding = Rounding::None;
  for (auto _ : state) {
    auto events = pipeline::run_videos(inputs, cfg, mode);
    benchmark::DoNotOptimize(events);
  }
}

}  // namespace

BENCHMARK(BM_FuseAllFrames)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResolveEvents)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunVideos)->Arg(0)->Arg(1)->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
