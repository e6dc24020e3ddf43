#include "checkout/types.hpp"

#include <cmath>
#include <utility>

namespace checkout {

void validate_detection(const Detection& det) {
  if (det.frame_idx < 0) throw ValidationError("frame: must be non-negative");
  if (!std::isfinite(det.det_score) || det.det_score < 0.0 || det.det_score > 1.0)
    throw ValidationError("det_score: must lie in [0,1]");
}

ClassifiedItem make_classified(Detection det, std::vector<double> class_probs) {
  validate_detection(det);
  if (class_probs.empty()) throw ValidationError("class_probs: must be non-empty");
  double sum = 0.0;
  int argmax = 0;
  for (std::size_t k = 0; k < class_probs.size(); ++k) {
    const double p = class_probs[k];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
      throw ValidationError("class_probs: entries must lie in [0,1]");
    sum += p;
    if (p > class_probs[static_cast<std::size_t>(argmax)]) argmax = static_cast<int>(k);
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ValidationError("class_probs: must sum to 1 within 1e-6");
  ClassifiedItem item;
  item.cls_score = class_probs[static_cast<std::size_t>(argmax)];
  item.label = argmax;
  item.detection = std::move(det);
  item.class_probs = std::move(class_probs);
  return item;
}

void validate_meta(const VideoMeta& meta) {
  if (!(meta.fps > 0.0)) throw ValidationError("fps: must be positive");
  if (!(meta.width > 0.0) || !(meta.height > 0.0))
    throw ValidationError("width/height: must be positive");
}

}  // namespace checkout
