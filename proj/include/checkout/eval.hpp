#pragma once

#include <map>
#include <span>
#include <vector>

#include "checkout/config.hpp"
#include "checkout/eval_types.hpp"
#include "checkout/types.hpp"

namespace checkout::eval {

struct MatchCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
};

// Greedy one-to-one matching in prediction-timestamp order. Under the
// Interval rule a prediction matches an unmatched truth of the same video and
// class whose presence interval contains its timestamp; under the Window rule
// the timestamp must lie within window_s of the interval midpoint.
MatchCounts match_events(std::span<const CheckoutEvent> preds,
                         std::span<const GroundTruthEvent> truths,
                         MatchRule rule = MatchRule::Interval, double window_s = 1.0);

EvalReport prf1(long long tp, long long fp, long long fn);

// Class-agnostic all-point-interpolated average precision: detections ranked
// by score globally, greedy best-IoU truth assignment at IoU >= iou_thr, each
// truth matched at most once.
double detection_map(const std::map<FrameKey, std::vector<Detection>>& dets,
                     const std::map<FrameKey, std::vector<BBox>>& truths, double iou_thr);

}  // namespace checkout::eval
