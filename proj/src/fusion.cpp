#include "checkout/fusion.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "checkout/errors.hpp"

namespace checkout::fusion {
namespace {

// Deterministic pooling order: score descending, then model id and coordinates.
bool pooled_before(const Detection& a, const Detection& b) {
  return std::tie(b.det_score, a.model_id, a.bbox.x1, a.bbox.y1, a.bbox.x2, a.bbox.y2) <
         std::tie(a.det_score, b.model_id, b.bbox.x1, b.bbox.y1, b.bbox.x2, b.bbox.y2);
}

void refuse(FusionCluster& cluster) {
  if (cluster.members.size() == 1) {
    // the weighted mean of one box is that box; keep it bit-exact
    cluster.fused_box = cluster.members.front().bbox;
    cluster.fused_score = cluster.members.front().det_score;
    return;
  }
  double wsum = 0.0;
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0, score = 0.0, msum = 0.0;
  for (std::size_t i = 0; i < cluster.members.size(); ++i) {
    const Detection& d = cluster.members[i];
    const double w = d.det_score * cluster.member_weights[i];
    wsum += w;
    x1 += w * d.bbox.x1;
    y1 += w * d.bbox.y1;
    x2 += w * d.bbox.x2;
    y2 += w * d.bbox.y2;
    score += d.det_score * cluster.member_weights[i];
    msum += cluster.member_weights[i];
  }
  if (wsum > 0.0) {
    cluster.fused_box = BBox(x1 / wsum, y1 / wsum, x2 / wsum, y2 / wsum);
  } else {
    // all-zero scores: fall back to the plain mean
    x1 = y1 = x2 = y2 = 0.0;
    for (const Detection& d : cluster.members) {
      x1 += d.bbox.x1;
      y1 += d.bbox.y1;
      x2 += d.bbox.x2;
      y2 += d.bbox.y2;
    }
    const double n = static_cast<double>(cluster.members.size());
    cluster.fused_box = BBox(x1 / n, y1 / n, x2 / n, y2 / n);
  }
  cluster.fused_score = msum > 0.0 ? score / msum : 0.0;
}

}  // namespace

std::vector<FusionCluster> wbf_clusters(std::vector<Detection> pooled,
                                        std::vector<double> pooled_weights,
                                        double iou_thr) {
  std::vector<FusionCluster> clusters;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    bool joined = false;
    for (auto& cluster : clusters) {
      if (iou(cluster.fused_box, pooled[i].bbox) >= iou_thr) {
        cluster.members.push_back(pooled[i]);
        cluster.member_weights.push_back(pooled_weights[i]);
        cluster.member_indices.push_back(i);
        refuse(cluster);
        joined = true;
        break;
      }
    }
    if (!joined) {
      FusionCluster cluster;
      cluster.members.push_back(pooled[i]);
      cluster.member_weights.push_back(pooled_weights[i]);
      cluster.member_indices.push_back(i);
      refuse(cluster);
      clusters.push_back(std::move(cluster));
    }
  }
  return clusters;
}

std::vector<Detection> wbf_fuse(std::span<const ModelDetections> models,
                                const FrameKey& frame, double iou_thr) {
  if (models.empty()) throw ValidationError("wbf_fuse: empty model list");
  std::vector<Detection> pooled;
  std::vector<double> weights;
  for (const auto& model : models) {
    if (!(model.weight > 0.0)) throw ValidationError("model weight: must be positive");
    const auto it = model.frames.find(frame);
    if (it == model.frames.end()) continue;
    for (const Detection& d : it->second) {
      pooled.push_back(d);
      weights.push_back(model.weight);
    }
  }
  // sort jointly, weights stay aligned with their detections
  std::vector<std::size_t> order(pooled.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pooled_before(pooled[a], pooled[b]);
  });
  std::vector<Detection> sorted;
  std::vector<double> sorted_w;
  sorted.reserve(pooled.size());
  sorted_w.reserve(pooled.size());
  for (std::size_t idx : order) {
    sorted.push_back(pooled[idx]);
    sorted_w.push_back(weights[idx]);
  }

  const auto clusters = wbf_clusters(std::move(sorted), std::move(sorted_w), iou_thr);
  const double m = static_cast<double>(models.size());
  std::vector<Detection> fused;
  fused.reserve(clusters.size());
  for (const auto& cluster : clusters) {
    const double t = static_cast<double>(cluster.members.size());
    Detection d;
    d.video_id = frame.video_id;
    d.frame_idx = frame.frame_idx;
    d.bbox = cluster.fused_box;
    d.det_score = cluster.fused_score * (std::min(t, m) / m);
    d.model_id = "wbf";
    fused.push_back(std::move(d));
  }
  return fused;
}

std::map<FrameKey, std::vector<Detection>> fuse_all_frames(
    std::span<const ModelDetections> models, double iou_thr, ExecMode mode) {
  if (models.empty()) throw ValidationError("fuse_all_frames: empty model list");
  std::set<FrameKey> keyset;
  for (const auto& model : models)
    for (const auto& [key, dets] : model.frames) keyset.insert(key);
  const std::vector<FrameKey> keys(keyset.begin(), keyset.end());

  std::vector<std::vector<Detection>> per_key(keys.size());
  const auto n = static_cast<std::ptrdiff_t>(keys.size());
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      per_key[static_cast<std::size_t>(i)] = wbf_fuse(models, keys[static_cast<std::size_t>(i)], iou_thr);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      per_key[static_cast<std::size_t>(i)] = wbf_fuse(models, keys[static_cast<std::size_t>(i)], iou_thr);
  }

  std::map<FrameKey, std::vector<Detection>> fused;
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (!per_key[i].empty()) fused.emplace(keys[i], std::move(per_key[i]));
  return fused;
}

std::vector<double> average_class_scores(std::span<const std::vector<double>> probs) {
  if (probs.empty()) throw ValidationError("average_class_scores: no vectors");
  const std::size_t len = probs.front().size();
  std::vector<double> mean(len, 0.0);
  for (const auto& p : probs) {
    if (p.size() != len)
      throw ValidationError("average_class_scores: length mismatch");
    for (std::size_t k = 0; k < len; ++k) mean[k] += p[k];
  }
  const double n = static_cast<double>(probs.size());
  for (double& v : mean) v /= n;
  return mean;
}

std::vector<FrameGroup> fuse_classified(std::span<const std::vector<FrameGroup>> model_streams,
                                        double iou_thr, ExecMode mode) {
  if (model_streams.empty()) throw ValidationError("fuse_classified: empty model list");
  std::map<FrameKey, std::vector<const ClassifiedItem*>> pooled;
  for (const auto& stream : model_streams)
    for (const auto& group : stream)
      for (const auto& item : group.items)
        pooled[FrameKey{group.video_id, group.frame_idx}].push_back(&item);

  const std::vector<const std::map<FrameKey, std::vector<const ClassifiedItem*>>::value_type*>
      entries = [&] {
        std::vector<const std::map<FrameKey, std::vector<const ClassifiedItem*>>::value_type*> e;
        e.reserve(pooled.size());
        for (const auto& kv : pooled) e.push_back(&kv);
        return e;
      }();

  const double m = static_cast<double>(model_streams.size());
  std::vector<FrameGroup> result(entries.size());

  auto fuse_one = [&](std::size_t i) {
    const FrameKey& key = entries[i]->first;
    std::vector<const ClassifiedItem*> items = entries[i]->second;
    std::stable_sort(items.begin(), items.end(), [](const ClassifiedItem* a, const ClassifiedItem* b) {
      return pooled_before(a->detection, b->detection);
    });
    std::vector<Detection> dets;
    std::vector<double> weights(items.size(), 1.0);
    dets.reserve(items.size());
    for (const auto* item : items) dets.push_back(item->detection);

    FrameGroup group;
    group.video_id = key.video_id;
    group.frame_idx = key.frame_idx;
    for (const auto& cluster : wbf_clusters(std::move(dets), std::move(weights), iou_thr)) {
      std::vector<std::vector<double>> member_probs;
      member_probs.reserve(cluster.member_indices.size());
      for (std::size_t idx : cluster.member_indices)
        member_probs.push_back(items[idx]->class_probs);
      const double t = static_cast<double>(cluster.members.size());
      Detection d;
      d.video_id = key.video_id;
      d.frame_idx = key.frame_idx;
      d.bbox = cluster.fused_box;
      d.det_score = cluster.fused_score * (std::min(t, m) / m);
      d.model_id = "wbf";
      group.items.push_back(make_classified(std::move(d), average_class_scores(member_probs)));
    }
    result[i] = std::move(group);
  };

  const auto n = static_cast<std::ptrdiff_t>(entries.size());
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) fuse_one(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) fuse_one(static_cast<std::size_t>(i));
  }
  return result;
}

EnsembleResult greedy_auto_ensemble(std::span<const ModelDetections> models,
                                    const MetricFn& metric, double iou_thr) {
  if (models.empty()) throw ValidationError("greedy_auto_ensemble: empty model list");

  std::vector<const ModelDetections*> order;
  order.reserve(models.size());
  for (const auto& model : models) order.push_back(&model);
  std::sort(order.begin(), order.end(), [](const ModelDetections* a, const ModelDetections* b) {
    return a->model_id < b->model_id;
  });

  auto evaluate = [&](const std::vector<const ModelDetections*>& subset) {
    std::vector<ModelDetections> copy;
    copy.reserve(subset.size());
    for (const auto* model : subset) copy.push_back(*model);
    return metric(fuse_all_frames(copy, iou_thr, ExecMode::Serial));
  };

  EnsembleResult result;
  std::vector<const ModelDetections*> selected;
  std::vector<const ModelDetections*> remaining = order;

  // seed: best single model, smallest id on ties
  double best_metric = -1.0;
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    const double v = evaluate({remaining[i]});
    if (v == best_metric) ++result.ties;
    if (v > best_metric) {
      best_metric = v;
      best_idx = i;
    }
  }
  selected.push_back(remaining[best_idx]);
  remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_idx));
  double current = best_metric;

  while (!remaining.empty()) {
    double step_best = current;
    std::ptrdiff_t step_idx = -1;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      auto candidate = selected;
      candidate.push_back(remaining[i]);
      const double v = evaluate(candidate);
      if (step_idx >= 0 && v == step_best) ++result.ties;
      if (v > step_best) {
        step_best = v;
        step_idx = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (step_idx < 0) break;  // no strict improvement
    selected.push_back(remaining[static_cast<std::size_t>(step_idx)]);
    remaining.erase(remaining.begin() + step_idx);
    current = step_best;
  }

  for (const auto* model : selected) result.selected.push_back(model->model_id);
  result.metric = current;
  std::vector<ModelDetections> chosen;
  chosen.reserve(selected.size());
  for (const auto* model : selected) chosen.push_back(*model);
  result.fused.model_id = [&] {
    std::string joined;
    for (const auto& id : result.selected) {
      if (!joined.empty()) joined += '+';
      joined += id;
    }
    return joined;
  }();
  result.fused.weight = 1.0;
  result.fused.frames = fuse_all_frames(chosen, iou_thr, ExecMode::Serial);
  return result;
}

}  // namespace checkout::fusion
