#include "checkout/eval.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "checkout/errors.hpp"

namespace checkout::eval {

MatchCounts match_events(std::span<const CheckoutEvent> preds,
                         std::span<const GroundTruthEvent> truths,
                         MatchRule rule, double window_s) {
  std::vector<const CheckoutEvent*> ordered;
  ordered.reserve(preds.size());
  for (const auto& p : preds) ordered.push_back(&p);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const CheckoutEvent* a, const CheckoutEvent* b) {
                     return std::tie(a->video_id, a->timestamp_s, a->class_id) <
                            std::tie(b->video_id, b->timestamp_s, b->class_id);
                   });

  std::vector<char> taken(truths.size(), 0);
  MatchCounts counts;
  for (const auto* pred : ordered) {
    std::ptrdiff_t best = -1;
    double best_key = 0.0;
    for (std::size_t t = 0; t < truths.size(); ++t) {
      if (taken[t]) continue;
      const auto& truth = truths[t];
      if (truth.video_id != pred->video_id || truth.class_id != pred->class_id) continue;
      if (rule == MatchRule::Interval) {
        if (pred->timestamp_s < truth.t_start || pred->timestamp_s > truth.t_end) continue;
        // earliest interval wins
        if (best < 0 || truth.t_start < best_key) {
          best = static_cast<std::ptrdiff_t>(t);
          best_key = truth.t_start;
        }
      } else {
        const double mid = 0.5 * (truth.t_start + truth.t_end);
        const double dist = std::abs(pred->timestamp_s - mid);
        if (dist > window_s) continue;
        if (best < 0 || dist < best_key) {
          best = static_cast<std::ptrdiff_t>(t);
          best_key = dist;
        }
      }
    }
    if (best >= 0) {
      taken[static_cast<std::size_t>(best)] = 1;
      ++counts.tp;
    } else {
      ++counts.fp;
    }
  }
  counts.fn = static_cast<long long>(truths.size()) - counts.tp;
  return counts;
}

EvalReport prf1(long long tp, long long fp, long long fn) {
  if (tp < 0 || fp < 0 || fn < 0) throw ValidationError("prf1: counts must be >= 0");
  EvalReport report;
  report.tp = tp;
  report.fp = fp;
  report.fn = fn;
  report.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  report.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  const double pr = report.precision + report.recall;
  report.f1 = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
  return report;
}

double detection_map(const std::map<FrameKey, std::vector<Detection>>& dets,
                     const std::map<FrameKey, std::vector<BBox>>& truths, double iou_thr) {
  if (!(iou_thr > 0.0) || !(iou_thr < 1.0))
    throw ValidationError("iou_thr: must lie in (0,1)");

  std::size_t total_truths = 0;
  for (const auto& [key, boxes] : truths) total_truths += boxes.size();
  if (total_truths == 0) return 0.0;

  struct Ranked {
    const Detection* det;
    const FrameKey* key;
    std::size_t order;  // global insertion order, stabilizes equal scores
  };
  std::vector<Ranked> ranked;
  std::size_t order = 0;
  for (const auto& [key, frame_dets] : dets)
    for (const auto& det : frame_dets) ranked.push_back({&det, &key, order++});
  if (ranked.empty()) return 0.0;
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.det->det_score != b.det->det_score) return a.det->det_score > b.det->det_score;
    return a.order < b.order;
  });

  std::map<FrameKey, std::vector<char>> used;
  for (const auto& [key, boxes] : truths) used[key].assign(boxes.size(), 0);

  std::vector<char> is_tp;
  is_tp.reserve(ranked.size());
  for (const auto& r : ranked) {
    bool matched = false;
    const auto it = truths.find(*r.key);
    if (it != truths.end()) {
      auto& flags = used[*r.key];
      double best_iou = 0.0;
      std::ptrdiff_t best = -1;
      for (std::size_t t = 0; t < it->second.size(); ++t) {
        if (flags[t]) continue;
        const double overlap = iou(r.det->bbox, it->second[t]);
        if (overlap >= iou_thr && overlap > best_iou) {
          best_iou = overlap;
          best = static_cast<std::ptrdiff_t>(t);
        }
      }
      if (best >= 0) {
        flags[static_cast<std::size_t>(best)] = 1;
        matched = true;
      }
    }
    is_tp.push_back(matched ? 1 : 0);
  }

  // all-point interpolated AP: integrate the precision envelope over recall
  std::vector<double> precision(is_tp.size());
  std::vector<double> recall(is_tp.size());
  long long tp = 0;
  for (std::size_t i = 0; i < is_tp.size(); ++i) {
    if (is_tp[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(total_truths);
  }
  for (std::size_t i = precision.size(); i-- > 1;)
    precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

}  // namespace checkout::eval
