#include "mtmc/kalman.hpp"

#include <Eigen/Cholesky>

#include "mtmc/errors.hpp"

namespace mtmc::sct {

namespace {

constexpr double kStdWeightPosition = 1.0 / 20.0;
constexpr double kStdWeightVelocity = 1.0 / 160.0;

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

Mat8 transition() {
  Mat8 f = Mat8::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

Vec4 measurement_of(const BBox& bbox) {
  return {bbox.x + bbox.w / 2.0, bbox.y + bbox.h / 2.0, bbox.w / bbox.h,
          bbox.h};
}

Mat8 process_noise(double h) {
  Vec8 std;
  std << kStdWeightPosition * h, kStdWeightPosition * h, 1e-2,
      kStdWeightPosition * h, kStdWeightVelocity * h, kStdWeightVelocity * h,
      1e-5, kStdWeightVelocity * h;
  return std.cwiseProduct(std).asDiagonal();
}

Mat4 measurement_noise(double h) {
  Vec4 std;
  std << kStdWeightPosition * h, kStdWeightPosition * h, 1e-1,
      kStdWeightPosition * h;
  return std.cwiseProduct(std).asDiagonal();
}

void symmetrize(Mat8& p) { p = ((p + p.transpose()) / 2.0).eval(); }

}  // namespace

KalmanState KalmanFilter::init(const BBox& bbox) {
  if (!(bbox.w > 0.0) || !(bbox.h > 0.0)) {
    throw data_error("kalman init: bbox w/h must be positive");
  }
  KalmanState state;
  state.mean.head<4>() = measurement_of(bbox);
  state.mean.tail<4>().setZero();

  const double h = bbox.h;
  Vec8 std;
  std << 2.0 * kStdWeightPosition * h, 2.0 * kStdWeightPosition * h, 1e-2,
      2.0 * kStdWeightPosition * h, 10.0 * kStdWeightVelocity * h,
      10.0 * kStdWeightVelocity * h, 1e-5, 10.0 * kStdWeightVelocity * h;
  state.covariance = std.cwiseProduct(std).asDiagonal();
  return state;
}

KalmanState KalmanFilter::predict(const KalmanState& state) {
  const Mat8 f = transition();
  KalmanState out;
  out.mean = f * state.mean;
  Mat8 p = f * state.covariance * f.transpose() + process_noise(state.mean(3));
  symmetrize(p);
  out.covariance = p;
  return out;
}

KalmanState KalmanFilter::update(const KalmanState& state, const BBox& bbox) {
  if (!(bbox.w > 0.0) || !(bbox.h > 0.0)) {
    throw data_error("kalman update: bbox w/h must be positive");
  }
  Mat48 h = Mat48::Zero();
  h.block<4, 4>(0, 0) = Mat4::Identity();

  const Mat4 r = measurement_noise(state.mean(3));
  const Mat4 s = h * state.covariance * h.transpose() + r;
  Eigen::LLT<Mat4> llt(s);
  if (llt.info() != Eigen::Success) {
    throw data_error("kalman update: innovation covariance not invertible");
  }
  const Eigen::Matrix<double, 8, 4> gain =
      llt.solve(h * state.covariance).transpose();

  const Vec4 innovation = measurement_of(bbox) - h * state.mean;

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  // Joseph form keeps the posterior covariance symmetric PSD under
  // rounding.
  const Mat8 ikh = Mat8::Identity() - gain * h;
  Mat8 p = ikh * state.covariance * ikh.transpose() +
           gain * r * gain.transpose();
  symmetrize(p);
  out.covariance = p;
  return out;
}

}  // namespace mtmc::sct
