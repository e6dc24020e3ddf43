// Batch front end: simulate -> fuse -> track -> vote (or resolve in one go)
// plus event-level evaluation. Data goes to files, diagnostics to stderr.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "checkout/config.hpp"
#include "checkout/errors.hpp"
#include "checkout/eval.hpp"
#include "checkout/fusion.hpp"
#include "checkout/io.hpp"
#include "checkout/pipeline.hpp"
#include "checkout/simulator.hpp"
#include "checkout/tracker.hpp"
#include "checkout/voting.hpp"
#include "json.hpp"

namespace {

using namespace checkout;

struct CommonOpts {
  std::string config_path;
  bool verbose = false;
};

PipelineConfig load_cfg(const CommonOpts& opts) {
  if (opts.config_path.empty()) return PipelineConfig{};
  return load_config_file(opts.config_path);
}

void note(const CommonOpts& opts, const std::string& msg) {
  if (opts.verbose) std::cerr << msg << '\n';
}

std::string model_id_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// one model file -> per-frame detections plus the classified stream when
// every record carries class_probs
struct LoadedModel {
  std::string id;
  fusion::ModelDetections boxes;
  std::vector<FrameGroup> classified;
  bool has_probs = false;
};

LoadedModel load_model_file(const std::string& path) {
  LoadedModel model;
  model.id = model_id_of(path);
  model.boxes.model_id = model.id;
  const auto records = io::read_detection_records_file(path);
  model.has_probs = !records.empty();
  for (const auto& rec : records) {
    model.boxes.frames[FrameKey{rec.detection.video_id, rec.detection.frame_idx}].push_back(
        rec.detection);
    if (!rec.class_probs) model.has_probs = false;
  }
  if (model.has_probs) {
    std::ifstream in(path);
    model.classified = io::parse_detection_stream(in);
  }
  return model;
}

std::map<FrameKey, std::vector<BBox>> load_truth_boxes(const std::string& path) {
  std::map<FrameKey, std::vector<BBox>> truths;
  for (const auto& rec : io::read_detection_records_file(path))
    truths[FrameKey{rec.detection.video_id, rec.detection.frame_idx}].push_back(
        rec.detection.bbox);
  return truths;
}

std::map<std::string, VideoMeta> meta_map(const std::string& path) {
  std::map<std::string, VideoMeta> metas;
  for (auto& meta : io::read_video_meta_file(path)) {
    const auto id = meta.video_id;
    if (!metas.emplace(id, std::move(meta)).second)
      throw ValidationError("duplicate metadata for video '" + id + "'");
  }
  return metas;
}

const VideoMeta& require_meta(const std::map<std::string, VideoMeta>& metas,
                              const std::string& video_id) {
  const auto it = metas.find(video_id);
  if (it == metas.end())
    throw ValidationError("missing metadata for video '" + video_id + "'");
  return it->second;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonOpts& opts, const std::string& scenario_path,
                 std::int64_t seed_override, const std::string& out_path,
                 const std::string& truth_path, const std::string& meta_path) {
  auto spec = sim::load_scenario_file(scenario_path);
  if (seed_override >= 0) {
    spec.seed = static_cast<std::uint64_t>(seed_override);
    if (!spec.products.empty())
      note(opts, "seed override applies to noise draws; explicit products unchanged");
  }
  const auto output = sim::generate_scenario(spec);
  io::write_detection_records_file(io::to_records(output.frames), out_path);
  if (!truth_path.empty()) io::write_truth_events_file(output.truths, truth_path);
  if (!meta_path.empty()) io::write_video_meta_file({spec.meta()}, meta_path);
  note(opts, "simulated " + std::to_string(output.frames.size()) + " frames, " +
                 std::to_string(output.truths.size()) + " truth events");
  return 0;
}

int cmd_fuse(const CommonOpts& opts, const std::vector<std::string>& model_paths,
             const std::string& out_path, const std::string& truth_path) {
  const auto cfg = load_cfg(opts);
  std::vector<LoadedModel> models;
  models.reserve(model_paths.size());
  for (const auto& path : model_paths) models.push_back(load_model_file(path));

  std::vector<std::size_t> chosen(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) chosen[i] = i;

  if (!truth_path.empty()) {
    const auto truths = load_truth_boxes(truth_path);
    std::vector<fusion::ModelDetections> boxes;
    boxes.reserve(models.size());
    for (const auto& m : models) boxes.push_back(m.boxes);
    const fusion::MetricFn metric =
        [&truths, &cfg](const std::map<FrameKey, std::vector<Detection>>& dets) {
          return eval::detection_map(dets, truths, cfg.map_iou_thr);
        };
    const auto result = fusion::greedy_auto_ensemble(boxes, metric, cfg.wbf_iou_thr);
    std::cerr << "selected models (mAP " << result.metric << "):";
    for (const auto& id : result.selected) std::cerr << ' ' << id;
    std::cerr << '\n';
    if (result.ties > 0)
      std::cerr << "note: " << result.ties << " selection tie(s) broken by model id\n";
    chosen.clear();
    for (std::size_t i = 0; i < models.size(); ++i)
      if (std::find(result.selected.begin(), result.selected.end(), models[i].id) !=
          result.selected.end())
        chosen.push_back(i);
  }

  bool all_probs = true;
  for (std::size_t i : chosen) all_probs = all_probs && models[i].has_probs;

  if (all_probs) {
    std::vector<std::vector<FrameGroup>> streams;
    streams.reserve(chosen.size());
    for (std::size_t i : chosen) streams.push_back(models[i].classified);
    auto fused = fusion::fuse_classified(streams, cfg.wbf_iou_thr);
    std::sort(fused.begin(), fused.end(), [](const FrameGroup& a, const FrameGroup& b) {
      return std::tie(a.video_id, a.frame_idx) < std::tie(b.video_id, b.frame_idx);
    });
    io::write_detection_records_file(io::to_records(fused), out_path);
  } else {
    std::vector<fusion::ModelDetections> boxes;
    boxes.reserve(chosen.size());
    for (std::size_t i : chosen) boxes.push_back(models[i].boxes);
    const auto fused = fusion::fuse_all_frames(boxes, cfg.wbf_iou_thr);
    std::vector<io::DetectionRecord> records;
    for (const auto& [key, dets] : fused)
      for (const auto& det : dets) records.push_back(io::DetectionRecord{det, std::nullopt});
    io::write_detection_records_file(records, out_path);
  }
  return 0;
}

int cmd_track(const CommonOpts& opts, const std::string& in_path, const std::string& meta_path,
              const std::string& out_path) {
  const auto cfg = load_cfg(opts);
  const auto stream = io::parse_detection_stream_file(in_path);
  const auto metas = meta_map(meta_path);

  std::map<std::string, std::vector<FrameGroup>> per_video;
  for (const auto& group : stream) per_video[group.video_id].push_back(group);

  std::vector<track::Track> all_tracks;
  for (const auto& [video_id, groups] : per_video) {
    const auto tracks = track::track_video(groups, require_meta(metas, video_id), cfg);
    note(opts, video_id + ": " + std::to_string(tracks.size()) + " tracks");
    all_tracks.insert(all_tracks.end(), tracks.begin(), tracks.end());
  }
  io::write_tracks_file(all_tracks, out_path);
  return 0;
}

int cmd_vote(const CommonOpts& opts, const std::string& in_path, const std::string& meta_path,
             const std::string& out_path, const std::string& items_path) {
  const auto cfg = load_cfg(opts);
  const auto tracks = io::read_tracks_file(in_path);
  const auto metas = meta_map(meta_path);

  // optional pre-tracking stream for the per-video frequency table
  std::map<std::string, std::vector<ClassifiedItem>> filtered_items;
  if (!items_path.empty()) {
    for (const auto& group : io::parse_detection_stream_file(items_path)) {
      const auto& meta = require_meta(metas, group.video_id);
      const auto roi = track::Roi::centered(meta, cfg.roi_fraction);
      auto kept = track::roi_filter(track::score_filter(group.items, cfg), roi);
      auto& sink = filtered_items[group.video_id];
      sink.insert(sink.end(), kept.begin(), kept.end());
    }
  }

  std::map<std::string, std::vector<track::Track>> per_video;
  for (const auto& tr : tracks)
    per_video[tr.items.front().detection.video_id].push_back(tr);

  std::vector<CheckoutEvent> events;
  for (const auto& [video_id, video_tracks] : per_video) {
    const auto& meta = require_meta(metas, video_id);
    std::vector<CheckoutEvent> video_events;
    if (const auto it = filtered_items.find(video_id); it != filtered_items.end()) {
      const auto freqs = vote::class_frequencies(it->second);
      video_events = vote::resolve_events(video_tracks, freqs, meta, cfg);
    } else {
      video_events = vote::resolve_events(video_tracks, meta, cfg);
    }
    events.insert(events.end(), video_events.begin(), video_events.end());
  }
  io::write_submission_file(std::move(events), out_path);
  return 0;
}

int cmd_resolve(const CommonOpts& opts, const std::vector<std::string>& model_paths,
                const std::string& meta_path, const std::string& out_path, int jobs) {
  const auto cfg = load_cfg(opts);
  std::vector<std::vector<FrameGroup>> streams;
  streams.reserve(model_paths.size());
  for (const auto& path : model_paths)
    streams.push_back(io::parse_detection_stream_file(path));

  std::vector<VideoMeta> metas;
  for (auto& [id, meta] : meta_map(meta_path)) metas.push_back(meta);

  const auto inputs = pipeline::split_by_video(streams, metas);
  note(opts, std::to_string(inputs.size()) + " video(s)");
  auto events = pipeline::run_videos(inputs, cfg, ExecMode::Parallel, jobs);
  io::write_submission_file(std::move(events), out_path);
  return 0;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& in_path,
                 const std::string& truth_path, const std::string& report_path,
                 std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  const auto cfg = load_cfg(opts);
  EvalReport report;
  if (tp >= 0 || fp >= 0 || fn >= 0) {
    if (tp < 0 || fp < 0 || fn < 0)
      throw ValidationError("--tp/--fp/--fn must be given together");
    report = eval::prf1(tp, fp, fn);
  } else {
    if (in_path.empty() || truth_path.empty())
      throw ValidationError("evaluate needs --in and --truth (or forced --tp/--fp/--fn)");
    const auto preds = io::read_submission_file(in_path);
    const auto truths = io::read_truth_events_file(truth_path);
    const auto counts =
        eval::match_events(preds, truths, cfg.event_match_rule, cfg.event_match_window_s);
    report = eval::prf1(counts.tp, counts.fp, counts.fn);
  }

  std::printf("tp %lld  fp %lld  fn %lld\n", report.tp, report.fp, report.fn);
  std::printf("precision %.4f\n", report.precision);
  std::printf("recall    %.4f\n", report.recall);
  std::printf("f1        %.4f\n", report.f1);

  if (!report_path.empty()) {
    nlohmann::json j;
    j["tp"] = report.tp;
    j["fp"] = report.fp;
    j["fn"] = report.fn;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    std::ofstream out(report_path);
    if (!out) throw ValidationError("cannot open output file '" + report_path + "'");
    out << j.dump(2) << '\n';
  }
  (void)opts;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-model detection fusion, tracking, and checkout-event resolution"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--config", common.config_path, "pipeline config file (key = value)");
  app.add_flag("-v,--verbose", common.verbose, "progress diagnostics on stderr");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic scenario");
  std::string sim_scenario, sim_out, sim_truth, sim_meta;
  std::int64_t sim_seed = -1;
  simulate->add_option("--scenario", sim_scenario, "scenario config file")->required();
  simulate->add_option("--seed", sim_seed, "override the scenario seed");
  simulate->add_option("--out", sim_out, "detections JSONL output")->required();
  simulate->add_option("--truth-out", sim_truth, "ground-truth events JSONL output");
  simulate->add_option("--meta-out", sim_meta, "video metadata JSONL output");

  // fuse
  auto* fuse = app.add_subcommand("fuse", "fuse detection streams of several models");
  std::vector<std::string> fuse_models;
  std::string fuse_out, fuse_truth;
  fuse->add_option("--models", fuse_models, "model detection JSONL files")
      ->required()
      ->expected(-1);
  fuse->add_option("--out", fuse_out, "fused detections JSONL output")->required();
  fuse->add_option("--truth", fuse_truth,
                   "validation truth boxes (JSONL); enables greedy auto-ensemble");

  // track
  auto* track_cmd = app.add_subcommand("track", "link detections into tracks");
  std::string track_in, track_meta, track_out;
  track_cmd->add_option("--in", track_in, "classified detections JSONL")->required();
  track_cmd->add_option("--meta", track_meta, "video metadata JSONL")->required();
  track_cmd->add_option("--out", track_out, "tracks JSONL output")->required();

  // vote
  auto* vote_cmd = app.add_subcommand("vote", "vote labels and emit checkout events");
  std::string vote_in, vote_meta, vote_out, vote_items;
  vote_cmd->add_option("--in", vote_in, "tracks JSONL")->required();
  vote_cmd->add_option("--meta", vote_meta, "video metadata JSONL")->required();
  vote_cmd->add_option("--out", vote_out, "submission file output")->required();
  vote_cmd->add_option("--items", vote_items,
                       "classified detections JSONL for the frequency table");

  // resolve
  auto* resolve = app.add_subcommand("resolve", "fuse, track, and vote in one pass");
  std::vector<std::string> resolve_models;
  std::string resolve_meta, resolve_out;
  int resolve_jobs = 0;
  resolve->add_option("--models", resolve_models, "model detection JSONL files")
      ->required()
      ->expected(-1);
  resolve->add_option("--meta", resolve_meta, "video metadata JSONL")->required();
  resolve->add_option("--out", resolve_out, "submission file output")->required();
  resolve->add_option("--jobs", resolve_jobs, "max videos processed concurrently");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score a submission against ground truth");
  std::string eval_in, eval_truth, eval_report;
  std::int64_t eval_tp = -1, eval_fp = -1, eval_fn = -1;
  evaluate->add_option("--in", eval_in, "submission file");
  evaluate->add_option("--truth", eval_truth, "ground-truth events JSONL");
  evaluate->add_option("--out", eval_report, "JSON report output");
  evaluate->add_option("--tp", eval_tp, "forced true-positive count");
  evaluate->add_option("--fp", eval_fp, "forced false-positive count");
  evaluate->add_option("--fn", eval_fn, "forced false-negative count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return cmd_simulate(common, sim_scenario, sim_seed, sim_out, sim_truth, sim_meta);
    if (fuse->parsed()) return cmd_fuse(common, fuse_models, fuse_out, fuse_truth);
    if (track_cmd->parsed()) return cmd_track(common, track_in, track_meta, track_out);
    if (vote_cmd->parsed()) return cmd_vote(common, vote_in, vote_meta, vote_out, vote_items);
    if (resolve->parsed())
      return cmd_resolve(common, resolve_models, resolve_meta, resolve_out, resolve_jobs);
    if (evaluate->parsed())
      return cmd_evaluate(common, eval_in, eval_truth, eval_report, eval_tp, eval_fp, eval_fn);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 1;
}
