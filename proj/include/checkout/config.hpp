#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace checkout {

enum class Rounding { Nearest, Floor, Ceil, None };
enum class MatchRule { Interval, Window };

double apply_rounding(double seconds, Rounding mode);

struct PipelineConfig {
  // score filter (items below either threshold are dropped)
  double det_score_min = 0.3;
  double cls_score_min = 0.3;
  // association
  double iou_gate = 0.8;
  int min_track_frames = 15;
  int max_track_age_frames = 30;
  double roi_fraction = 0.5;
  // label voting
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double tau = 1.0;
  bool freq_normalized = false;
  // fusion
  double wbf_iou_thr = 0.55;
  // distillation
  double sim_loss_weight = 2.0;
  // output / evaluation
  Rounding timestamp_rounding = Rounding::Nearest;
  MatchRule event_match_rule = MatchRule::Interval;
  double event_match_window_s = 1.0;
  double map_iou_thr = 0.5;
};

// Throws ValidationError when any field is outside its documented range.
void validate_config(const PipelineConfig& cfg);

// Flat `key = value` file, `#` comments, blank lines ignored.
// Unspecified keys keep defaults; unknown keys are an error.
PipelineConfig load_config(std::istream& in);
PipelineConfig load_config_file(const std::string& path);

// Shared low-level reader for the flat key-value format.
std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in);

}  // namespace checkout
