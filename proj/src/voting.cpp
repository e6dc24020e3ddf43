#include "checkout/voting.hpp"

#include <algorithm>
#include <cmath>

#include "checkout/errors.hpp"

namespace checkout::vote {

ClassFrequencyTable class_frequencies(std::span<const ClassifiedItem> items) {
  ClassFrequencyTable table;
  for (const auto& item : items) {
    ++table.counts[item.label];
    ++table.total;
  }
  return table;
}

std::vector<double> softmax_weights(const track::Track& track, const VotingParams& params,
                                    double image_area) {
  if (track.items.empty()) throw ValidationError("voting: track has no items");
  if (!(params.tau > 0.0)) throw ValidationError("tau: must be > 0");
  if (!(image_area > 0.0)) throw ValidationError("image_area: must be positive");

  std::vector<double> logits;
  logits.reserve(track.items.size());
  for (const auto& item : track.items) {
    const double a = area(item.detection.bbox) / image_area;
    const double s = item.detection.det_score;
    logits.push_back(std::pow(a, params.beta) * std::pow(s, params.gamma) / params.tau);
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double& z : logits) {
    z = std::exp(z - peak);
    denom += z;
  }
  for (double& z : logits) z /= denom;
  return logits;
}

std::vector<double> contribution_scores(const track::Track& track,
                                        const ClassFrequencyTable& freqs,
                                        const VotingParams& params, double image_area) {
  auto scores = softmax_weights(track, params, image_area);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int label = track.items[i].label;
    const auto it = freqs.counts.find(label);
    if (it == freqs.counts.end())
      throw ValidationError("voting: class " + std::to_string(label) +
                            " missing from frequency table");
    double f = static_cast<double>(it->second);
    if (params.freq_normalized && freqs.total > 0) f /= static_cast<double>(freqs.total);
    scores[i] *= std::pow(f, params.alpha);
  }
  return scores;
}

int vote_label(const track::Track& track, const ClassFrequencyTable& freqs,
               const VotingParams& params, double image_area) {
  const auto scores = contribution_scores(track, freqs, params, image_area);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) {
      best = i;
    } else if (scores[i] == scores[best]) {
      const auto& a = track.items[i];
      const auto& b = track.items[best];
      if (a.detection.frame_idx < b.detection.frame_idx ||
          (a.detection.frame_idx == b.detection.frame_idx && a.label < b.label))
        best = i;
    }
  }
  return track.items[best].label;
}

double track_timestamp(const track::Track& track, const VideoMeta& meta) {
  validate_meta(meta);
  return static_cast<double>(track.first_frame + track.last_frame) / (2.0 * meta.fps);
}

std::vector<CheckoutEvent> resolve_events(std::span<const track::Track> tracks,
                                          const ClassFrequencyTable& freqs,
                                          const VideoMeta& meta, const PipelineConfig& cfg,
                                          ExecMode mode) {
  const VotingParams params = VotingParams::from_config(cfg);
  const double image_area = meta.width * meta.height;

  std::vector<CheckoutEvent> events(tracks.size());
  const auto n = static_cast<std::ptrdiff_t>(tracks.size());
  auto vote_one = [&](std::size_t i) {
    const auto& track = tracks[i];
    events[i] = CheckoutEvent{meta.video_id, vote_label(track, freqs, params, image_area),
                              apply_rounding(track_timestamp(track, meta),
                                             cfg.timestamp_rounding)};
  };
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) vote_one(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) vote_one(static_cast<std::size_t>(i));
  }

  std::stable_sort(events.begin(), events.end(), [](const CheckoutEvent& a, const CheckoutEvent& b) {
    if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
    return a.class_id < b.class_id;
  });
  return events;
}

std::vector<CheckoutEvent> resolve_events(std::span<const track::Track> tracks,
                                          const VideoMeta& meta, const PipelineConfig& cfg,
                                          ExecMode mode) {
  std::vector<ClassifiedItem> all_items;
  for (const auto& track : tracks)
    all_items.insert(all_items.end(), track.items.begin(), track.items.end());
  return resolve_events(tracks, class_frequencies(all_items), meta, cfg, mode);
}

}  // namespace checkout::vote
