#pragma once

#include <span>
#include <vector>

namespace checkout::distill {

// Throws ValidationError unless p is a probability vector (entries in [0,1],
// sum 1 within 1e-6).
void validate_prob_vector(std::span<const double> p);

// KL similarity loss between the student and teacher output distributions:
// sum_k y_st[k] * log(y_st[k] / y_te[k]), with 0*log(0/q) = 0 and teacher
// entries clamped to >= 1e-12 before the division.
double kl_similarity_loss(std::span<const double> y_st, std::span<const double> y_te);

// dL/dy_st, component k: log(y_st[k] / y_te[k]) + 1. Treats y_st as free
// coordinates; composing with a softmax Jacobian is the caller's concern.
std::vector<double> kl_gradient(std::span<const double> y_st, std::span<const double> y_te);

// weight * kl_similarity_loss; the default pipeline weight doubles the loss.
double weighted_similarity_loss(std::span<const double> y_st, std::span<const double> y_te,
                                double weight);

}  // namespace checkout::distill
