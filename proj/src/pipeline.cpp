#include "checkout/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "checkout/errors.hpp"
#include "checkout/fusion.hpp"

namespace checkout::pipeline {

VideoResult run_video(const VideoInput& input, const PipelineConfig& cfg, ExecMode mode) {
  validate_meta(input.meta);
  if (input.model_streams.empty()) throw ValidationError("run_video: no input streams");

  std::vector<FrameGroup> stream;
  if (input.model_streams.size() == 1) {
    stream = input.model_streams.front();
  } else {
    stream = fusion::fuse_classified(input.model_streams, cfg.wbf_iou_thr, mode);
  }
  std::sort(stream.begin(), stream.end(), [](const FrameGroup& a, const FrameGroup& b) {
    return std::tie(a.video_id, a.frame_idx) < std::tie(b.video_id, b.frame_idx);
  });

  VideoResult result;
  result.tracks = track::track_video(stream, input.meta, cfg);

  // frequencies over everything the filters let through, tracked or not
  const auto roi = track::Roi::centered(input.meta, cfg.roi_fraction);
  std::vector<ClassifiedItem> filtered;
  for (const auto& group : stream) {
    auto kept = track::roi_filter(track::score_filter(group.items, cfg), roi);
    filtered.insert(filtered.end(), std::make_move_iterator(kept.begin()),
                    std::make_move_iterator(kept.end()));
  }
  const auto freqs = vote::class_frequencies(filtered);

  result.events = vote::resolve_events(result.tracks, freqs, input.meta, cfg, mode);
  return result;
}

std::vector<VideoInput> split_by_video(std::span<const std::vector<FrameGroup>> model_streams,
                                       std::span<const VideoMeta> metas) {
  std::map<std::string, VideoMeta> meta_by_id;
  for (const auto& meta : metas) {
    validate_meta(meta);
    if (!meta_by_id.emplace(meta.video_id, meta).second)
      throw ValidationError("duplicate metadata for video '" + meta.video_id + "'");
  }

  std::set<std::string> video_ids;
  for (const auto& stream : model_streams)
    for (const auto& group : stream) video_ids.insert(group.video_id);

  std::vector<VideoInput> inputs;
  for (const auto& video_id : video_ids) {
    const auto it = meta_by_id.find(video_id);
    if (it == meta_by_id.end())
      throw ValidationError("missing metadata for video '" + video_id + "'");
    VideoInput input;
    input.meta = it->second;
    for (const auto& stream : model_streams) {
      std::vector<FrameGroup> own;
      for (const auto& group : stream)
        if (group.video_id == video_id) own.push_back(group);
      input.model_streams.push_back(std::move(own));
    }
    inputs.push_back(std::move(input));
  }
  return inputs;
}

std::vector<CheckoutEvent> run_videos(std::span<const VideoInput> inputs,
                                      const PipelineConfig& cfg, ExecMode mode, int jobs) {
  std::vector<std::vector<CheckoutEvent>> per_video(inputs.size());
  const auto n = static_cast<std::ptrdiff_t>(inputs.size());
  if (mode == ExecMode::Parallel) {
    if (jobs > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
      for (std::ptrdiff_t i = 0; i < n; ++i)
        per_video[static_cast<std::size_t>(i)] =
            run_video(inputs[static_cast<std::size_t>(i)], cfg, ExecMode::Serial).events;
    } else {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < n; ++i)
        per_video[static_cast<std::size_t>(i)] =
            run_video(inputs[static_cast<std::size_t>(i)], cfg, ExecMode::Serial).events;
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      per_video[static_cast<std::size_t>(i)] =
          run_video(inputs[static_cast<std::size_t>(i)], cfg, ExecMode::Serial).events;
  }

  std::vector<CheckoutEvent> merged;
  for (auto& events : per_video)
    merged.insert(merged.end(), std::make_move_iterator(events.begin()),
                  std::make_move_iterator(events.end()));
  return merged;
}

}  // namespace checkout::pipeline
