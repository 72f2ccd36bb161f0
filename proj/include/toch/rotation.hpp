#pragma once

#include "toch/types.hpp"

#include <cmath>
#include <numbers>

namespace toch {

template <typename Scalar>
Matrix3<Scalar> skew(const Vector3<Scalar>& v) {
  Matrix3<Scalar> k;
  k << Scalar(0), -v.z(), v.y(), v.z(), Scalar(0), -v.x(), -v.y(), v.x(), Scalar(0);
  return k;
}

/// Rodrigues' formula; Taylor expansion below 1e-8 rad.
template <typename Scalar>
Matrix3<Scalar> rodrigues(const Vector3<Scalar>& axis_angle) {
  const Scalar angle = axis_angle.norm();
  const Matrix3<Scalar> k = skew(axis_angle);
  if (angle < Scalar(1e-8)) {
    return Matrix3<Scalar>::Identity() + k + Scalar(0.5) * k * k;
  }
  return Matrix3<Scalar>::Identity() + (std::sin(angle) / angle) * k +
         ((Scalar(1) - std::cos(angle)) / (angle * angle)) * k * k;
}

/// Left Jacobian of the rotation exponential: for a perturbation e_c of the
/// axis-angle vector, dR/dtheta_c = skew(J.col(c)) * R.
template <typename Scalar>
Matrix3<Scalar> rotation_left_jacobian(const Vector3<Scalar>& axis_angle) {
  const Scalar angle = axis_angle.norm();
  const Matrix3<Scalar> k = skew(axis_angle);
  if (angle < Scalar(1e-5)) {
    return Matrix3<Scalar>::Identity() + Scalar(0.5) * k + (Scalar(1) / Scalar(6)) * k * k;
  }
  const Scalar a2 = angle * angle;
  return Matrix3<Scalar>::Identity() + ((Scalar(1) - std::cos(angle)) / a2) * k +
         ((angle - std::sin(angle)) / (a2 * angle)) * k * k;
}

template <typename Scalar>
Vector3<Scalar> axis_angle_from_matrix(const Matrix3<Scalar>& rotation) {
  const Eigen::AngleAxis<Scalar> aa(rotation);
  return aa.angle() * aa.axis();
}

/// Maps an axis-angle vector to the equivalent one with norm < pi.
template <typename Scalar>
Vector3<Scalar> canonical_axis_angle(const Vector3<Scalar>& axis_angle) {
  const Scalar angle = axis_angle.norm();
  if (angle < Scalar(std::numbers::pi)) return axis_angle;
  return axis_angle_from_matrix<Scalar>(rodrigues<Scalar>(axis_angle));
}

}  // namespace toch
