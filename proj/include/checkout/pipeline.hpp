#pragma once

#include <span>
#include <string>
#include <vector>

#include "checkout/config.hpp"
#include "checkout/exec.hpp"
#include "checkout/tracker.hpp"
#include "checkout/types.hpp"
#include "checkout/voting.hpp"

namespace checkout::pipeline {

// One video's classified streams, one entry per model.
struct VideoInput {
  VideoMeta meta;
  std::vector<std::vector<FrameGroup>> model_streams;
};

struct VideoResult {
  std::vector<track::Track> tracks;
  std::vector<CheckoutEvent> events;
};

// Full per-video chain: WBF fusion across models (skipped for a single
// stream), tracking, label voting. The frequency table covers every item
// that survives the score and ROI filters.
VideoResult run_video(const VideoInput& input, const PipelineConfig& cfg,
                      ExecMode mode = ExecMode::Parallel);

// Splits mixed-video streams into per-video inputs, ordered by video_id.
// Every video in the streams must have metadata.
std::vector<VideoInput> split_by_video(std::span<const std::vector<FrameGroup>> model_streams,
                                       std::span<const VideoMeta> metas);

// Runs videos independently (OpenMP in Parallel mode, at most `jobs` threads
// when jobs > 0) and merges events by ascending video_id.
std::vector<CheckoutEvent> run_videos(std::span<const VideoInput> inputs,
                                      const PipelineConfig& cfg,
                                      ExecMode mode = ExecMode::Parallel, int jobs = 0);

}  // namespace checkout::pipeline
