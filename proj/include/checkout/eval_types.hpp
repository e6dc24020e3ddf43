#pragma once

#include <string>

namespace checkout {

// True product pass: the presence interval of one item on the tray.
struct GroundTruthEvent {
  std::string video_id;
  int class_id = 0;
  double t_start = 0.0;
  double t_end = 0.0;
};

struct EvalReport {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

}  // namespace checkout
