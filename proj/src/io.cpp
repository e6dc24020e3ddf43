#include "checkout/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace checkout::io {
namespace {

using nlohmann::json;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  return out;
}

double require_number(const json& j, const char* field, std::size_t lineno) {
  if (!j.contains(field)) throw ParseError(lineno, std::string(field) + ": missing field");
  const auto& v = j.at(field);
  if (!v.is_number()) throw ParseError(lineno, std::string(field) + ": expected a number");
  return v.get<double>();
}

std::string require_string(const json& j, const char* field, std::size_t lineno) {
  if (!j.contains(field)) throw ParseError(lineno, std::string(field) + ": missing field");
  const auto& v = j.at(field);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(lineno, std::string(field) + ": expected a string");
}

DetectionRecord record_from_json(const json& j, std::size_t lineno) {
  DetectionRecord rec;
  rec.detection.video_id = require_string(j, "video_id", lineno);
  const double frame = require_number(j, "frame", lineno);
  if (frame != std::floor(frame)) throw ParseError(lineno, "frame: expected an integer");
  rec.detection.frame_idx = static_cast<int>(frame);

  if (!j.contains("bbox")) throw ParseError(lineno, "bbox: missing field");
  const auto& bb = j.at("bbox");
  if (!bb.is_array() || bb.size() != 4)
    throw ParseError(lineno, "bbox: expected [x1,y1,x2,y2]");
  try {
    rec.detection.bbox = BBox(bb[0].get<double>(), bb[1].get<double>(),
                              bb[2].get<double>(), bb[3].get<double>());
  } catch (const ValidationError& e) {
    throw ParseError(lineno, e.what());
  }

  rec.detection.det_score = j.contains("det_score") ? require_number(j, "det_score", lineno) : 1.0;
  rec.detection.model_id = j.contains("model_id") ? require_string(j, "model_id", lineno) : "";
  try {
    validate_detection(rec.detection);
  } catch (const ValidationError& e) {
    throw ParseError(lineno, e.what());
  }

  if (j.contains("class_probs")) {
    const auto& probs = j.at("class_probs");
    if (!probs.is_array() || probs.empty())
      throw ParseError(lineno, "class_probs: expected a non-empty array");
    std::vector<double> p;
    p.reserve(probs.size());
    for (const auto& v : probs) {
      if (!v.is_number()) throw ParseError(lineno, "class_probs: expected numbers");
      p.push_back(v.get<double>());
    }
    rec.class_probs = std::move(p);
  }
  return rec;
}

json record_to_json(const DetectionRecord& rec) {
  json j;
  j["video_id"] = rec.detection.video_id;
  j["frame"] = rec.detection.frame_idx;
  j["bbox"] = {rec.detection.bbox.x1, rec.detection.bbox.y1,
               rec.detection.bbox.x2, rec.detection.bbox.y2};
  j["det_score"] = rec.detection.det_score;
  j["model_id"] = rec.detection.model_id;
  if (rec.class_probs) j["class_probs"] = *rec.class_probs;
  return j;
}

json parse_line(const std::string& line, std::size_t lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError(lineno, "malformed JSON record");
  if (!j.is_object()) throw ParseError(lineno, "expected a JSON object");
  return j;
}

// Renormalizes within 1e-3 of unit sum, rejects anything further off.
// Vectors already valid (within 1e-6) pass through untouched so that
// parse(serialize(x)) is the identity.
std::vector<double> normalize_probs(std::vector<double> probs, std::size_t lineno) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0)
      throw ParseError(lineno, "class_probs: entries must be non-negative and finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-3)
    throw ParseError(lineno, "class_probs: sum " + std::to_string(sum) +
                                 " outside [1-1e-3, 1+1e-3]");
  if (std::abs(sum - 1.0) > 1e-6)
    for (double& p : probs) p /= sum;
  return probs;
}

std::string format_timestamp(double t) {
  if (t == std::floor(t) && std::abs(t) < 1e15)
    return std::to_string(static_cast<long long>(t));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", t);
  return buf;
}

}  // namespace

std::vector<DetectionRecord> read_detection_records(std::istream& in) {
  std::vector<DetectionRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    records.push_back(record_from_json(parse_line(line, lineno), lineno));
  }
  return records;
}

std::vector<DetectionRecord> read_detection_records_file(const std::string& path) {
  auto in = open_input(path);
  return read_detection_records(in);
}

void write_detection_records(const std::vector<DetectionRecord>& records, std::ostream& out) {
  for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

void write_detection_records_file(const std::vector<DetectionRecord>& records,
                                  const std::string& path) {
  auto out = open_output(path);
  write_detection_records(records, out);
}

std::vector<FrameGroup> parse_detection_stream(std::istream& in) {
  std::map<FrameKey, std::vector<ClassifiedItem>> grouped;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    DetectionRecord rec = record_from_json(parse_line(line, lineno), lineno);
    if (!rec.class_probs) throw ParseError(lineno, "class_probs: missing field");
    auto probs = normalize_probs(std::move(*rec.class_probs), lineno);
    FrameKey key{rec.detection.video_id, rec.detection.frame_idx};
    try {
      grouped[key].push_back(make_classified(std::move(rec.detection), std::move(probs)));
    } catch (const ValidationError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  std::vector<FrameGroup> groups;
  groups.reserve(grouped.size());
  for (auto& [key, items] : grouped)
    groups.push_back(FrameGroup{key.video_id, key.frame_idx, std::move(items)});
  return groups;
}

std::vector<FrameGroup> parse_detection_stream_file(const std::string& path) {
  auto in = open_input(path);
  return parse_detection_stream(in);
}

std::vector<DetectionRecord> to_records(const std::vector<FrameGroup>& groups) {
  std::vector<DetectionRecord> records;
  for (const auto& group : groups)
    for (const auto& item : group.items)
      records.push_back(DetectionRecord{item.detection, item.class_probs});
  return records;
}

void write_submission(std::vector<CheckoutEvent> events, std::ostream& out) {
  std::stable_sort(events.begin(), events.end(), [](const CheckoutEvent& a, const CheckoutEvent& b) {
    if (a.video_id != b.video_id) return a.video_id < b.video_id;
    if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
    return a.class_id < b.class_id;
  });
  for (const auto& ev : events)
    out << ev.video_id << ' ' << ev.class_id << ' ' << format_timestamp(ev.timestamp_s) << '\n';
}

void write_submission_file(std::vector<CheckoutEvent> events, const std::string& path) {
  auto out = open_output(path);
  write_submission(std::move(events), out);
}

std::vector<CheckoutEvent> read_submission(std::istream& in) {
  std::vector<CheckoutEvent> events;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    CheckoutEvent ev;
    if (!(ls >> ev.video_id >> ev.class_id >> ev.timestamp_s))
      throw ParseError(lineno, "expected 'video_id class_id timestamp'");
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, "trailing content '" + extra + "'");
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<CheckoutEvent> read_submission_file(const std::string& path) {
  auto in = open_input(path);
  return read_submission(in);
}

std::vector<GroundTruthEvent> read_truth_events(std::istream& in) {
  std::vector<GroundTruthEvent> truths;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_line(line, lineno);
    GroundTruthEvent ev;
    ev.video_id = require_string(j, "video_id", lineno);
    const double cls = require_number(j, "class_id", lineno);
    if (cls != std::floor(cls)) throw ParseError(lineno, "class_id: expected an integer");
    ev.class_id = static_cast<int>(cls);
    ev.t_start = require_number(j, "t_start", lineno);
    ev.t_end = require_number(j, "t_end", lineno);
    if (ev.t_start < 0.0 || ev.t_end < ev.t_start)
      throw ParseError(lineno, "t_start/t_end: require 0 <= t_start <= t_end");
    truths.push_back(std::move(ev));
  }
  return truths;
}

std::vector<GroundTruthEvent> read_truth_events_file(const std::string& path) {
  auto in = open_input(path);
  return read_truth_events(in);
}

void write_truth_events(const std::vector<GroundTruthEvent>& truths, std::ostream& out) {
  for (const auto& ev : truths) {
    json j;
    j["video_id"] = ev.video_id;
    j["class_id"] = ev.class_id;
    j["t_start"] = ev.t_start;
    j["t_end"] = ev.t_end;
    out << j.dump() << '\n';
  }
}

void write_truth_events_file(const std::vector<GroundTruthEvent>& truths,
                             const std::string& path) {
  auto out = open_output(path);
  write_truth_events(truths, out);
}

void write_tracks(const std::vector<track::Track>& tracks, std::ostream& out) {
  for (const auto& tr : tracks) {
    json j;
    j["video_id"] = tr.items.empty() ? "" : tr.items.front().detection.video_id;
    j["track_id"] = tr.track_id;
    j["first_frame"] = tr.first_frame;
    j["last_frame"] = tr.last_frame;
    json items = json::array();
    for (const auto& item : tr.items)
      items.push_back(record_to_json(DetectionRecord{item.detection, item.class_probs}));
    j["items"] = std::move(items);
    out << j.dump() << '\n';
  }
}

void write_tracks_file(const std::vector<track::Track>& tracks, const std::string& path) {
  auto out = open_output(path);
  write_tracks(tracks, out);
}

std::vector<track::Track> read_tracks(std::istream& in) {
  std::vector<track::Track> tracks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_line(line, lineno);
    track::Track tr;
    tr.track_id = static_cast<int>(require_number(j, "track_id", lineno));
    tr.first_frame = static_cast<int>(require_number(j, "first_frame", lineno));
    tr.last_frame = static_cast<int>(require_number(j, "last_frame", lineno));
    tr.status = track::Track::Status::Terminated;
    if (!j.contains("items") || !j.at("items").is_array())
      throw ParseError(lineno, "items: expected an array");
    for (const auto& item_json : j.at("items")) {
      DetectionRecord rec = record_from_json(item_json, lineno);
      if (!rec.class_probs) throw ParseError(lineno, "items: class_probs missing");
      try {
        tr.items.push_back(make_classified(std::move(rec.detection),
                                           normalize_probs(std::move(*rec.class_probs), lineno)));
      } catch (const ValidationError& e) {
        throw ParseError(lineno, e.what());
      }
    }
    if (tr.items.empty()) throw ParseError(lineno, "items: track has no items");
    tracks.push_back(std::move(tr));
  }
  return tracks;
}

std::vector<track::Track> read_tracks_file(const std::string& path) {
  auto in = open_input(path);
  return read_tracks(in);
}

std::vector<VideoMeta> read_video_meta(std::istream& in) {
  std::vector<VideoMeta> metas;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_line(line, lineno);
    VideoMeta meta;
    meta.video_id = require_string(j, "video_id", lineno);
    meta.fps = require_number(j, "fps", lineno);
    meta.width = require_number(j, "width", lineno);
    meta.height = require_number(j, "height", lineno);
    try {
      validate_meta(meta);
    } catch (const ValidationError& e) {
      throw ParseError(lineno, e.what());
    }
    metas.push_back(std::move(meta));
  }
  return metas;
}

std::vector<VideoMeta> read_video_meta_file(const std::string& path) {
  auto in = open_input(path);
  return read_video_meta(in);
}

void write_video_meta(const std::vector<VideoMeta>& metas, std::ostream& out) {
  for (const auto& meta : metas) {
    json j;
    j["video_id"] = meta.video_id;
    j["fps"] = meta.fps;
    j["width"] = meta.width;
    j["height"] = meta.height;
    out << j.dump() << '\n';
  }
}

void write_video_meta_file(const std::vector<VideoMeta>& metas, const std::string& path) {
  auto out = open_output(path);
  write_video_meta(metas, out);
}

}  // namespace checkout::io
