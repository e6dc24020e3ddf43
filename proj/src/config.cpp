#include "checkout/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "checkout/errors.hpp"

namespace checkout {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ValidationError(key + ": expected a number, got '" + value + "'");
  }
  if (pos != value.size())
    throw ValidationError(key + ": expected a number, got '" + value + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(value, &pos);
  } catch (const std::exception&) {
    throw ValidationError(key + ": expected an integer, got '" + value + "'");
  }
  if (pos != value.size())
    throw ValidationError(key + ": expected an integer, got '" + value + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError(key + ": expected true/false, got '" + value + "'");
}

Rounding parse_rounding(const std::string& value) {
  if (value == "nearest") return Rounding::Nearest;
  if (value == "floor") return Rounding::Floor;
  if (value == "ceil") return Rounding::Ceil;
  if (value == "none") return Rounding::None;
  throw ValidationError("timestamp_rounding: expected nearest|floor|ceil|none, got '" + value + "'");
}

MatchRule parse_match_rule(const std::string& value) {
  if (value == "interval") return MatchRule::Interval;
  if (value == "window") return MatchRule::Window;
  throw ValidationError("event_match_rule: expected interval|window, got '" + value + "'");
}

}  // namespace

double apply_rounding(double seconds, Rounding mode) {
  switch (mode) {
    case Rounding::Nearest: return std::round(seconds);
    case Rounding::Floor: return std::floor(seconds);
    case Rounding::Ceil: return std::ceil(seconds);
    case Rounding::None: return seconds;
  }
  return seconds;
}

std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    out.emplace_back(key, value);
  }
  return out;
}

void validate_config(const PipelineConfig& cfg) {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(cfg.det_score_min)) throw ValidationError("det_score_min: must lie in [0,1]");
  if (!in01(cfg.cls_score_min)) throw ValidationError("cls_score_min: must lie in [0,1]");
  if (!(cfg.iou_gate > 0.0) || cfg.iou_gate > 1.0)
    throw ValidationError("iou_gate: must lie in (0,1]");
  if (cfg.min_track_frames < 1) throw ValidationError("min_track_frames: must be >= 1");
  if (cfg.max_track_age_frames < 0) throw ValidationError("max_track_age_frames: must be >= 0");
  if (!(cfg.roi_fraction > 0.0) || cfg.roi_fraction > 1.0)
    throw ValidationError("roi_fraction: must lie in (0,1]");
  if (cfg.alpha < 0.0 || cfg.beta < 0.0 || cfg.gamma < 0.0)
    throw ValidationError("alpha/beta/gamma: must be >= 0");
  if (!(cfg.tau > 0.0)) throw ValidationError("tau: must be > 0");
  if (!(cfg.wbf_iou_thr > 0.0) || cfg.wbf_iou_thr > 1.0)
    throw ValidationError("wbf_iou_thr: must lie in (0,1]");
  if (!(cfg.sim_loss_weight > 0.0)) throw ValidationError("sim_loss_weight: must be > 0");
  if (cfg.event_match_window_s < 0.0)
    throw ValidationError("event_match_window_s: must be >= 0");
  if (!(cfg.map_iou_thr > 0.0) || !(cfg.map_iou_thr < 1.0))
    throw ValidationError("map_iou_thr: must lie in (0,1)");
}

PipelineConfig load_config(std::istream& in) {
  PipelineConfig cfg;
  for (const auto& [key, value] : read_key_values(in)) {
    if (key == "det_score_min") cfg.det_score_min = parse_double(key, value);
    else if (key == "cls_score_min") cfg.cls_score_min = parse_double(key, value);
    else if (key == "iou_gate") cfg.iou_gate = parse_double(key, value);
    else if (key == "min_track_frames") cfg.min_track_frames = parse_int(key, value);
    else if (key == "max_track_age_frames") cfg.max_track_age_frames = parse_int(key, value);
    else if (key == "roi_fraction") cfg.roi_fraction = parse_double(key, value);
    else if (key == "alpha") cfg.alpha = parse_double(key, value);
    else if (key == "beta") cfg.beta = parse_double(key, value);
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "tau") cfg.tau = parse_double(key, value);
    else if (key == "freq_normalized") cfg.freq_normalized = parse_bool(key, value);
    else if (key == "wbf_iou_thr") cfg.wbf_iou_thr = parse_double(key, value);
    else if (key == "sim_loss_weight") cfg.sim_loss_weight = parse_double(key, value);
    else if (key == "timestamp_rounding") cfg.timestamp_rounding = parse_rounding(value);
    else if (key == "event_match_rule") cfg.event_match_rule = parse_match_rule(value);
    else if (key == "event_match_window_s") cfg.event_match_window_s = parse_double(key, value);
    else if (key == "map_iou_thr") cfg.map_iou_thr = parse_double(key, value);
    else throw ValidationError("unknown config key '" + key + "'");
  }
  validate_config(cfg);
  return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  return load_config(in);
}

}  // namespace checkout
