#include "checkout/kalman.hpp"

#include <algorithm>

#include "checkout/errors.hpp"

namespace checkout::track {
namespace {

constexpr double kStdWeightPos = 1.0 / 20.0;
constexpr double kStdWeightVel = 1.0 / 40.0;
constexpr double kMinExtent = 1e-6;  // keeps w, h strictly positive

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

Mat8 transition() {
  Mat8 f = Mat8::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;  // dt = 1 frame
  return f;
}

Mat48 observation() {
  Mat48 h = Mat48::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  return h;
}

Vec4 measure(const BBox& box) {
  Vec4 z;
  z << box.cx(), box.cy(), box.width(), box.height();
  return z;
}

}  // namespace

KalmanState kalman_init(const BBox& measurement) {
  KalmanState state;
  state.mean.setZero();
  state.mean.head<4>() = measure(measurement);
  const double h = measurement.height();
  Vec8 std;
  std << 2 * kStdWeightPos * h, 2 * kStdWeightPos * h, 2 * kStdWeightPos * h,
      2 * kStdWeightPos * h, 10 * kStdWeightVel * h, 10 * kStdWeightVel * h,
      10 * kStdWeightVel * h, 10 * kStdWeightVel * h;
  state.cov = std.array().square().matrix().asDiagonal();
  return state;
}

KalmanState kalman_predict(const KalmanState& state) {
  const Mat8 f = transition();
  const double h = std::max(state.mean(3), kMinExtent);
  Vec8 std;
  std << kStdWeightPos * h, kStdWeightPos * h, kStdWeightPos * h, kStdWeightPos * h,
      kStdWeightVel * h, kStdWeightVel * h, kStdWeightVel * h, kStdWeightVel * h;
  const Mat8 q = std.array().square().matrix().asDiagonal();

  KalmanState next;
  next.mean = f * state.mean;
  next.cov = f * state.cov * f.transpose() + q;
  next.cov = 0.5 * (next.cov + next.cov.transpose());
  return next;
}

KalmanState kalman_update(const KalmanState& state, const BBox& measurement) {
  if (!(measurement.width() > 0.0) || !(measurement.height() > 0.0))
    throw ValidationError("kalman_update: measured width/height must be positive");

  const Mat48 h = observation();
  const double scale = std::max(state.mean(3), kMinExtent);
  Vec4 std;
  std << kStdWeightPos * scale, kStdWeightPos * scale, kStdWeightPos * scale,
      kStdWeightPos * scale;
  const Mat4 r = std.array().square().matrix().asDiagonal();

  const Mat4 s = h * state.cov * h.transpose() + r;
  const Eigen::Matrix<double, 8, 4> k = s.llt().solve(h * state.cov).transpose();
  const Vec4 innovation = measure(measurement) - h * state.mean;

  KalmanState next;
  next.mean = state.mean + k * innovation;
  // P - K S K^T keeps the trace non-increasing even with rounding
  next.cov = state.cov - k * s * k.transpose();
  next.cov = 0.5 * (next.cov + next.cov.transpose());
  next.mean(2) = std::max(next.mean(2), kMinExtent);
  next.mean(3) = std::max(next.mean(3), kMinExtent);
  return next;
}

BBox state_box(const KalmanState& state) {
  const double cx = state.mean(0);
  const double cy = state.mean(1);
  const double w = std::max(state.mean(2), kMinExtent);
  const double h = std::max(state.mean(3), kMinExtent);
  return BBox(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
}

}  // namespace checkout::track
