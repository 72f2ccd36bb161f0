#pragma once

#include "toch/error.hpp"
#include "toch/types.hpp"

#include <Eigen/SVD>

namespace toch {

template <typename Scalar>
struct RigidAlignment {
  Matrix3<Scalar> rotation = Matrix3<Scalar>::Identity();
  Vector3<Scalar> translation = Vector3<Scalar>::Zero();
  Scalar scale = Scalar(1);
};

/// Least-squares rigid alignment (Kabsch): R, t minimizing
/// sum_i |R source_i + t - target_i|^2 with det R = +1. Scale is fixed to 1.
template <typename Scalar>
RigidAlignment<Scalar> procrustes_align(const Points<Scalar>& source,
                                        const Points<Scalar>& target) {
  if (source.rows() != target.rows()) {
    fail(ErrorCode::ShapeMismatch, "procrustes: point counts differ");
  }
  if (source.rows() < 3) {
    fail(ErrorCode::DegenerateConfiguration, "procrustes: need at least 3 points");
  }
  const Vector3<Scalar> mu_s = source.colwise().mean().transpose();
  const Vector3<Scalar> mu_t = target.colwise().mean().transpose();
  const Matrix3<Scalar> cov =
      (source.rowwise() - mu_s.transpose()).transpose() * (target.rowwise() - mu_t.transpose());

  Eigen::JacobiSVD<Matrix3<Scalar>> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv[0] > Scalar(0)) || sv[1] <= sv[0] * Scalar(1e-12)) {
    fail(ErrorCode::DegenerateConfiguration, "procrustes: rank-deficient covariance");
  }
  Matrix3<Scalar> fix = Matrix3<Scalar>::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < Scalar(0)) fix(2, 2) = -1;

  RigidAlignment<Scalar> out;
  out.rotation = svd.matrixV() * fix * svd.matrixU().transpose();
  out.translation = mu_t - out.rotation * mu_s;
  return out;
}

template <typename Scalar>
Points<Scalar> apply_alignment(const RigidAlignment<Scalar>& alignment,
                               const Points<Scalar>& points) {
  return ((points * alignment.rotation.transpose()).rowwise() +
          alignment.translation.transpose())
      .eval();
}

}  // namespace toch
