#pragma once

#include <span>
#include <vector>

#include "checkout/assignment.hpp"
#include "checkout/config.hpp"
#include "checkout/kalman.hpp"
#include "checkout/types.hpp"

namespace checkout::track {

// Central region to which track formation is restricted: a centered rectangle
// of width*fraction x height*fraction.
struct Roi {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  static Roi centered(const VideoMeta& meta, double fraction);

  // inclusive on the boundary
  bool contains(double cx, double cy) const {
    return cx >= x1 && cx <= x2 && cy >= y1 && cy <= y2;
  }
};

struct Track {
  enum class Status { Active, Terminated };

  int track_id = 0;
  std::vector<ClassifiedItem> items;  // strictly increasing frame_idx
  KalmanState kalman;
  int first_frame = 0;
  int last_frame = 0;
  int misses = 0;  // consecutive unmatched frames
  Status status = Status::Active;

  int span() const { return last_frame - first_frame + 1; }
};

// Drops items with det_score < det_score_min or cls_score < cls_score_min
// (strict inequality: items exactly at a threshold are kept).
std::vector<ClassifiedItem> score_filter(std::span<const ClassifiedItem> items,
                                         const PipelineConfig& cfg);

// Keeps items whose box center lies inside the ROI, boundary inclusive.
std::vector<ClassifiedItem> roi_filter(std::span<const ClassifiedItem> items, const Roi& roi);

// IoU-gated optimal association of predicted track boxes to frame items.
AssignmentResult associate(const std::vector<Track>& active_tracks,
                           std::span<const ClassifiedItem> frame_items, double iou_gate);

// Full per-video lifecycle: filter, predict, associate, update/spawn/age,
// prune short tracks at the end. Frames must arrive in ascending order and
// belong to one video.
std::vector<Track> track_video(std::span<const FrameGroup> frames, const VideoMeta& meta,
                               const PipelineConfig& cfg);

}  // namespace checkout::track
