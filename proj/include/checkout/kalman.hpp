#pragma once

#include <Eigen/Dense>

#include "checkout/geometry.hpp"

namespace checkout::track {

// Constant-velocity filter over (cx, cy, w, h) with per-component velocities.
// Noise scales with box height (SORT-family convention). All operations are
// pure value functions.
struct KalmanState {
  Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 8> cov = Eigen::Matrix<double, 8, 8>::Identity();
};

// Fresh state centered on the measurement, zero velocity, inflated covariance.
KalmanState kalman_init(const BBox& measurement);

KalmanState kalman_predict(const KalmanState& state);

// Standard linear update on (cx, cy, w, h). Throws ValidationError on a
// non-positive measured width or height.
KalmanState kalman_update(const KalmanState& state, const BBox& measurement);

BBox state_box(const KalmanState& state);

}  // namespace checkout::track
