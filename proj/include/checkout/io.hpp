#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "checkout/eval_types.hpp"
#include "checkout/tracker.hpp"
#include "checkout/types.hpp"

namespace checkout::io {

// One line of the detection record format (JSONL). class_probs is absent for
// class-agnostic stages.
struct DetectionRecord {
  Detection detection;
  std::optional<std::vector<double>> class_probs;
};

// Reads newline-delimited JSON records. Throws ParseError with the offending
// line number; field errors name the field.
std::vector<DetectionRecord> read_detection_records(std::istream& in);
std::vector<DetectionRecord> read_detection_records_file(const std::string& path);

void write_detection_records(const std::vector<DetectionRecord>& records, std::ostream& out);
void write_detection_records_file(const std::vector<DetectionRecord>& records,
                                  const std::string& path);

// Classified stream: every record must carry class_probs; vectors whose sum
// deviates from 1 by at most 1e-3 are renormalized, anything further off is
// rejected. Groups are returned in ascending (video_id, frame_idx) order.
std::vector<FrameGroup> parse_detection_stream(std::istream& in);
std::vector<FrameGroup> parse_detection_stream_file(const std::string& path);

std::vector<DetectionRecord> to_records(const std::vector<FrameGroup>& groups);

// Submission: one `video_id class_id timestamp` line per event, sorted by
// (video_id, timestamp). Integral timestamps print without a decimal point.
void write_submission(std::vector<CheckoutEvent> events, std::ostream& out);
void write_submission_file(std::vector<CheckoutEvent> events, const std::string& path);
std::vector<CheckoutEvent> read_submission(std::istream& in);
std::vector<CheckoutEvent> read_submission_file(const std::string& path);

// Ground-truth events, JSONL {video_id, class_id, t_start, t_end}.
std::vector<GroundTruthEvent> read_truth_events(std::istream& in);
std::vector<GroundTruthEvent> read_truth_events_file(const std::string& path);
void write_truth_events(const std::vector<GroundTruthEvent>& truths, std::ostream& out);
void write_truth_events_file(const std::vector<GroundTruthEvent>& truths,
                             const std::string& path);

// Tracks, JSONL {video_id, track_id, first_frame, last_frame, items:[...]}.
// Kalman state is runtime-only and not serialized; read_tracks returns
// terminated tracks suitable for voting.
void write_tracks(const std::vector<track::Track>& tracks, std::ostream& out);
void write_tracks_file(const std::vector<track::Track>& tracks, const std::string& path);
std::vector<track::Track> read_tracks(std::istream& in);
std::vector<track::Track> read_tracks_file(const std::string& path);

// Video metadata, JSONL {video_id, fps, width, height}.
std::vector<VideoMeta> read_video_meta(std::istream& in);
std::vector<VideoMeta> read_video_meta_file(const std::string& path);
void write_video_meta(const std::vector<VideoMeta>& metas, std::ostream& out);
void write_video_meta_file(const std::vector<VideoMeta>& metas, const std::string& path);

}  // namespace checkout::io
