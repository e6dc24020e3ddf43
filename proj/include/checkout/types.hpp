#pragma once

#include <compare>
#include <string>
#include <vector>

#include "checkout/geometry.hpp"

namespace checkout {

// One detector output on one frame.
struct Detection {
  std::string video_id;
  int frame_idx = 0;
  BBox bbox;
  double det_score = 0.0;
  std::string model_id;
};

// Throws ValidationError on out-of-range score or negative frame index.
void validate_detection(const Detection& det);

// A detection enriched with a class-probability vector.
// label = argmax(class_probs) (lowest index on ties), cls_score = max(class_probs).
struct ClassifiedItem {
  Detection detection;
  std::vector<double> class_probs;
  int label = 0;
  double cls_score = 0.0;
};

// Derives label and cls_score; validates the probability simplex (sum within 1e-6).
ClassifiedItem make_classified(Detection det, std::vector<double> class_probs);

struct VideoMeta {
  std::string video_id;
  double fps = 0.0;
  double width = 0.0;
  double height = 0.0;
};

void validate_meta(const VideoMeta& meta);

// Final pipeline output unit. timestamp_s is real-valued until a rounding
// mode quantizes it to whole seconds.
struct CheckoutEvent {
  std::string video_id;
  int class_id = 0;
  double timestamp_s = 0.0;
};

// (video_id, frame_idx) key identifying one image of one video.
struct FrameKey {
  std::string video_id;
  int frame_idx = 0;
  auto operator<=>(const FrameKey&) const = default;
};

// Items of one video frame, in input order.
struct FrameGroup {
  std::string video_id;
  int frame_idx = 0;
  std::vector<ClassifiedItem> items;
};

}  // namespace checkout
