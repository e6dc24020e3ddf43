#include "checkout/distill.hpp"

#include <algorithm>
#include <cmath>

#include "checkout/errors.hpp"

namespace checkout::distill {
namespace {

constexpr double kFloor = 1e-12;

void require_equal_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ValidationError("distill: vector length mismatch (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
}

}  // namespace

void validate_prob_vector(std::span<const double> p) {
  if (p.empty()) throw ValidationError("distill: empty probability vector");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw ValidationError("distill: entries must lie in [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ValidationError("distill: probabilities must sum to 1 within 1e-6");
}

double kl_similarity_loss(std::span<const double> y_st, std::span<const double> y_te) {
  require_equal_length(y_st, y_te);
  validate_prob_vector(y_st);
  validate_prob_vector(y_te);
  double loss = 0.0;
  for (std::size_t k = 0; k < y_st.size(); ++k) {
    if (y_st[k] == 0.0) continue;  // 0 * log(0/q) = 0
    loss += y_st[k] * std::log(y_st[k] / std::max(y_te[k], kFloor));
  }
  return loss;
}

std::vector<double> kl_gradient(std::span<const double> y_st, std::span<const double> y_te) {
  require_equal_length(y_st, y_te);
  validate_prob_vector(y_st);
  validate_prob_vector(y_te);
  std::vector<double> grad(y_st.size());
  for (std::size_t k = 0; k < y_st.size(); ++k)
    grad[k] = std::log(std::max(y_st[k], kFloor) / std::max(y_te[k], kFloor)) + 1.0;
  return grad;
}

double weighted_similarity_loss(std::span<const double> y_st, std::span<const double> y_te,
                                double weight) {
  if (!(weight > 0.0)) throw ValidationError("sim_loss_weight: must be > 0");
  return weight * kl_similarity_loss(y_st, y_te);
}

}  // namespace checkout::distill
