#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "checkout/exec.hpp"
#include "checkout/types.hpp"

namespace checkout::fusion {

// Per-frame detections of one detector across one or more videos.
struct ModelDetections {
  std::string model_id;
  double weight = 1.0;
  std::map<FrameKey, std::vector<Detection>> frames;
};

// One WBF cluster: members joined greedily against the running fused box.
struct FusionCluster {
  std::vector<Detection> members;
  std::vector<double> member_weights;       // source-model weights, parallel to members
  std::vector<std::size_t> member_indices;  // positions in the pooled input
  BBox fused_box;
  double fused_score = 0.0;  // pre-rescale: weighted mean of member scores
};

// Greedy clustering of score-sorted boxes: each box joins the first cluster
// whose running fused box overlaps it with IoU >= iou_thr, else opens a new
// cluster. Fused coordinates are the (score * model weight)-weighted mean of
// member coordinates.
std::vector<FusionCluster> wbf_clusters(std::vector<Detection> pooled,
                                        std::vector<double> pooled_weights,
                                        double iou_thr);

// Weighted Box Fusion of all models' detections on one frame. Fused score is
// the weighted mean of member scores rescaled by min(T, M)/M, T = cluster
// size, M = number of models.
std::vector<Detection> wbf_fuse(std::span<const ModelDetections> models,
                                const FrameKey& frame, double iou_thr);

// wbf_fuse over every frame present in any model. Frames are independent;
// Parallel mode distributes them over OpenMP threads.
std::map<FrameKey, std::vector<Detection>> fuse_all_frames(
    std::span<const ModelDetections> models, double iou_thr,
    ExecMode mode = ExecMode::Parallel);

// Element-wise arithmetic mean of probability vectors of equal length.
std::vector<double> average_class_scores(std::span<const std::vector<double>> probs);

// WBF over classified streams: boxes fuse as in wbf_fuse and each fused item
// carries the mean of its members' class-probability vectors.
std::vector<FrameGroup> fuse_classified(std::span<const std::vector<FrameGroup>> model_streams,
                                        double iou_thr, ExecMode mode = ExecMode::Parallel);

using MetricFn = std::function<double(const std::map<FrameKey, std::vector<Detection>>&)>;

struct EnsembleResult {
  std::vector<std::string> selected;  // in selection order
  ModelDetections fused;
  double metric = 0.0;
  int ties = 0;  // selection steps decided by the model-id tie break
};

// Forward selection on the validation metric: start from the best single
// model, repeatedly add the candidate whose WBF fusion with the current
// selection raises the metric the most, stop when nothing improves.
// Ties break toward the lexicographically smallest model_id.
EnsembleResult greedy_auto_ensemble(std::span<const ModelDetections> models,
                                    const MetricFn& metric, double iou_thr);

}  // namespace checkout::fusion
