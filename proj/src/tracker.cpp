#include "checkout/tracker.hpp"

#include <algorithm>
#include <map>

#include "checkout/errors.hpp"

namespace checkout::track {

Roi Roi::centered(const VideoMeta& meta, double fraction) {
  validate_meta(meta);
  if (!(fraction > 0.0) || fraction > 1.0)
    throw ValidationError("roi_fraction: must lie in (0,1]");
  Roi roi;
  const double half_w = 0.5 * meta.width * fraction;
  const double half_h = 0.5 * meta.height * fraction;
  roi.x1 = 0.5 * meta.width - half_w;
  roi.x2 = 0.5 * meta.width + half_w;
  roi.y1 = 0.5 * meta.height - half_h;
  roi.y2 = 0.5 * meta.height + half_h;
  return roi;
}

std::vector<ClassifiedItem> score_filter(std::span<const ClassifiedItem> items,
                                         const PipelineConfig& cfg) {
  std::vector<ClassifiedItem> kept;
  kept.reserve(items.size());
  for (const auto& item : items)
    if (item.detection.det_score >= cfg.det_score_min && item.cls_score >= cfg.cls_score_min)
      kept.push_back(item);
  return kept;
}

std::vector<ClassifiedItem> roi_filter(std::span<const ClassifiedItem> items, const Roi& roi) {
  std::vector<ClassifiedItem> kept;
  kept.reserve(items.size());
  for (const auto& item : items)
    if (roi.contains(item.detection.bbox.cx(), item.detection.bbox.cy()))
      kept.push_back(item);
  return kept;
}

AssignmentResult associate(const std::vector<Track>& active_tracks,
                           std::span<const ClassifiedItem> frame_items, double iou_gate) {
  std::vector<BBox> track_boxes;
  track_boxes.reserve(active_tracks.size());
  for (const auto& track : active_tracks) track_boxes.push_back(state_box(track.kalman));
  std::vector<BBox> item_boxes;
  item_boxes.reserve(frame_items.size());
  for (const auto& item : frame_items) item_boxes.push_back(item.detection.bbox);
  return gated_iou_assignment(track_boxes, item_boxes, iou_gate);
}

std::vector<Track> track_video(std::span<const FrameGroup> frames, const VideoMeta& meta,
                               const PipelineConfig& cfg) {
  validate_meta(meta);
  const Roi roi = Roi::centered(meta, cfg.roi_fraction);

  // filtered items per frame index; also validates ordering
  std::map<int, std::vector<ClassifiedItem>> by_frame;
  int prev_frame = -1;
  for (const auto& group : frames) {
    if (group.video_id != meta.video_id)
      throw ValidationError("track_video: frame group from video '" + group.video_id +
                            "', expected '" + meta.video_id + "'");
    if (group.frame_idx <= prev_frame)
      throw ValidationError("track_video: frames out of order at frame " +
                            std::to_string(group.frame_idx));
    prev_frame = group.frame_idx;
    by_frame[group.frame_idx] = roi_filter(score_filter(group.items, cfg), roi);
  }

  std::vector<Track> active;
  std::vector<Track> finished;
  int next_track_id = 1;

  if (by_frame.empty()) return {};
  const int first = by_frame.begin()->first;
  const int last = by_frame.rbegin()->first;
  static const std::vector<ClassifiedItem> kNoItems;

  for (int frame = first; frame <= last; ++frame) {
    for (auto& track : active) track.kalman = kalman_predict(track.kalman);

    const auto it = by_frame.find(frame);
    const auto& items = it != by_frame.end() ? it->second : kNoItems;

    const AssignmentResult assignment = associate(active, items, cfg.iou_gate);

    for (const auto& [row, col] : assignment.matches) {
      Track& track = active[static_cast<std::size_t>(row)];
      const ClassifiedItem& item = items[static_cast<std::size_t>(col)];
      track.kalman = kalman_update(track.kalman, item.detection.bbox);
      track.items.push_back(item);
      track.last_frame = frame;
      track.misses = 0;
    }
    for (int row : assignment.unmatched_rows)
      ++active[static_cast<std::size_t>(row)].misses;

    // age out stale tracks
    std::vector<Track> still_active;
    still_active.reserve(active.size());
    for (auto& track : active) {
      if (track.misses > cfg.max_track_age_frames) {
        track.status = Track::Status::Terminated;
        finished.push_back(std::move(track));
      } else {
        still_active.push_back(std::move(track));
      }
    }
    active = std::move(still_active);

    // unmatched items spawn new tracks
    for (int col : assignment.unmatched_cols) {
      const ClassifiedItem& item = items[static_cast<std::size_t>(col)];
      Track track;
      track.track_id = next_track_id++;
      track.kalman = kalman_init(item.detection.bbox);
      track.items.push_back(item);
      track.first_frame = frame;
      track.last_frame = frame;
      active.push_back(std::move(track));
    }
  }

  for (auto& track : active) {
    track.status = Track::Status::Terminated;
    finished.push_back(std::move(track));
  }

  std::vector<Track> kept;
  for (auto& track : finished)
    if (track.span() >= cfg.min_track_frames) kept.push_back(std::move(track));
  std::sort(kept.begin(), kept.end(),
            [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
  return kept;
}

}  // namespace checkout::track
