#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "checkout/config.hpp"
#include "checkout/exec.hpp"
#include "checkout/tracker.hpp"
#include "checkout/types.hpp"

namespace checkout::vote {

struct VotingParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double tau = 1.0;          // softmax temperature
  bool freq_normalized = false;  // divide counts by the per-video total

  static VotingParams from_config(const PipelineConfig& cfg) {
    return {cfg.alpha, cfg.beta, cfg.gamma, cfg.tau, cfg.freq_normalized};
  }
};

// Per-video label counts over classified items (post-filter, pre-voting).
struct ClassFrequencyTable {
  std::map<int, std::int64_t> counts;
  std::int64_t total = 0;
};

ClassFrequencyTable class_frequencies(std::span<const ClassifiedItem> items);

// Contribution score per track item: c_i = f_{l_i}^alpha * softmax(a_i^beta *
// s_i^gamma / tau), a_i the box area normalized by image area, s_i the
// detection score. Softmax is taken over the track with max-logit
// subtraction.
std::vector<double> contribution_scores(const track::Track& track,
                                        const ClassFrequencyTable& freqs,
                                        const VotingParams& params, double image_area);

// Softmax weights p_i alone (exposed for tests; sums to 1 within 1e-9).
std::vector<double> softmax_weights(const track::Track& track, const VotingParams& params,
                                    double image_area);

// Label of the item with maximal contribution score; ties break to the item
// with the lowest frame_idx, then the lowest class id.
int vote_label(const track::Track& track, const ClassFrequencyTable& freqs,
               const VotingParams& params, double image_area);

// Midpoint of the track's first and last detection times, in seconds.
double track_timestamp(const track::Track& track, const VideoMeta& meta);

// One event per track: voted label plus the rounded midpoint timestamp,
// sorted by timestamp. Per-track voting is independent; Parallel mode
// distributes tracks over OpenMP threads. Frequencies should cover every
// post-filter classified item of the video.
std::vector<CheckoutEvent> resolve_events(std::span<const track::Track> tracks,
                                          const ClassFrequencyTable& freqs,
                                          const VideoMeta& meta, const PipelineConfig& cfg,
                                          ExecMode mode = ExecMode::Parallel);

// Convenience overload counting frequencies over the tracks' own items (used
// when the pre-tracking stream is no longer available).
std::vector<CheckoutEvent> resolve_events(std::span<const track::Track> tracks,
                                          const VideoMeta& meta, const PipelineConfig& cfg,
                                          ExecMode mode = ExecMode::Parallel);

}  // namespace checkout::vote
