#include "toch/hand_model.hpp"

#include "toch/error.hpp"
#include "toch/rotation.hpp"

#include <cmath>
#include <string>

namespace toch {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

std::vector<std::pair<int, double>> sparse_row(const Eigen::Ref<const VecX>& row) {
  std::vector<std::pair<int, double>> out;
  for (int i = 0; i < row.size(); ++i) {
    if (row[i] != 0.0) out.emplace_back(i, row[i]);
  }
  return out;
}

void check_convex_rows(const MatX& m, const char* what) {
  for (int r = 0; r < m.rows(); ++r) {
    if ((m.row(r).array() < 0.0).any() || !m.row(r).allFinite()) {
      fail(ErrorCode::ModelMismatch, std::string(what) + " row " + std::to_string(r) +
                                         " has negative or non-finite entries");
    }
    if (std::abs(m.row(r).sum() - 1.0) > HandModel::kWeightTolerance) {
      fail(ErrorCode::ModelMismatch,
           std::string(what) + " row " + std::to_string(r) + " does not sum to 1");
    }
  }
}

}  // namespace

HandModel::HandModel(HandModelData data) : data_(std::move(data)) {
  const auto k = data_.template_vertices.rows();
  const auto j = static_cast<Eigen::Index>(data_.parents.size());
  if (j < 1) fail(ErrorCode::ModelMismatch, "hand model needs at least one joint");
  if (data_.skinning_weights.rows() != k || data_.skinning_weights.cols() != j) {
    fail(ErrorCode::ModelMismatch, "skinning_weights is " +
                                       dims(data_.skinning_weights.rows(),
                                            data_.skinning_weights.cols()) +
                                       ", expected " + dims(k, j));
  }
  if (data_.joint_rest_positions.rows() != j) {
    fail(ErrorCode::ModelMismatch, "joint_rest_positions has " +
                                       std::to_string(data_.joint_rest_positions.rows()) +
                                       " rows, expected " + std::to_string(j));
  }
  if (data_.shape_basis.rows() != 3 * k) {
    fail(ErrorCode::ModelMismatch, "shape_basis has " + std::to_string(data_.shape_basis.rows()) +
                                       " rows, expected 3K = " + std::to_string(3 * k));
  }
  if (data_.joint_regressor.cols() != k || data_.joint_regressor.rows() < j) {
    fail(ErrorCode::ModelMismatch,
         "joint_regressor is " + dims(data_.joint_regressor.rows(), data_.joint_regressor.cols()) +
             ", expected at least " + std::to_string(j) + " rows and " + std::to_string(k) +
             " columns");
  }
  check_convex_rows(data_.skinning_weights, "skinning_weights");
  check_convex_rows(data_.joint_regressor, "joint_regressor");

  try {
    canonical_ = TriMesh(data_.template_vertices, data_.faces);
  } catch (const Error& e) {
    fail(ErrorCode::ModelMismatch, std::string("template mesh: ") + e.what());
  }

  // Kinematic tree: one root, every joint reachable from it.
  int roots = 0;
  std::vector<std::vector<int>> children(j);
  for (int i = 0; i < j; ++i) {
    const int p = data_.parents[i];
    if (p == -1) {
      ++roots;
    } else if (p < 0 || p >= j || p == i) {
      fail(ErrorCode::ModelMismatch, "joint " + std::to_string(i) + " has invalid parent");
    } else {
      children[p].push_back(i);
    }
  }
  if (roots != 1) fail(ErrorCode::ModelMismatch, "kinematic tree must have exactly one root");
  chains_.resize(j);
  for (int i = 0; i < j; ++i) {
    if (data_.parents[i] == -1) {
      order_.push_back(i);
      chains_[i] = {i};
    }
  }
  for (std::size_t head = 0; head < order_.size(); ++head) {
    for (int c : children[order_[head]]) {
      order_.push_back(c);
      chains_[c] = chains_[order_[head]];
      chains_[c].push_back(c);
    }
  }
  if (static_cast<Eigen::Index>(order_.size()) != j) {
    fail(ErrorCode::ModelMismatch, "kinematic tree contains a cycle");
  }

  weights_.resize(k);
  for (int v = 0; v < k; ++v) weights_[v] = sparse_row(data_.skinning_weights.row(v).transpose());
  regressor_.resize(data_.joint_regressor.rows());
  for (int r = 0; r < data_.joint_regressor.rows(); ++r) {
    regressor_[r] = sparse_row(data_.joint_regressor.row(r).transpose());
  }

  joint_shape_ = MatX::Zero(3 * j, num_shape());
  for (int i = 0; i < j; ++i) {
    for (const auto& [v, w] : regressor_[i]) {
      joint_shape_.middleRows(3 * i, 3) += w * data_.shape_basis.middleRows(3 * v, 3);
    }
  }
}

Vec3 HandModel::joint_center(int j, const VecX& shape) const {
  Vec3 c = data_.joint_rest_positions.row(j).transpose();
  if (num_shape() > 0) c += joint_shape_.middleRows(3 * j, 3) * shape;
  return c;
}

Vec3 HandModel::shaped_vertex(int k, const VecX& shape) const {
  Vec3 v = data_.template_vertices.row(k).transpose();
  if (num_shape() > 0) v += data_.shape_basis.middleRows(3 * k, 3) * shape;
  return v;
}

HandFrame HandFrame::zero(const HandModel& model) {
  HandFrame f;
  f.pose = PoseMatrix::Zero(model.num_joints(), 3);
  f.shape = VecX::Zero(model.num_shape());
  return f;
}

void HandSequence::set_shape(const VecX& shape) {
  for (auto& f : frames) f.shape = shape;
}

void check_frame(const HandModel& model, const HandFrame& frame) {
  if (frame.pose.rows() != model.num_joints()) {
    fail(ErrorCode::ModelMismatch, "frame has " + std::to_string(frame.pose.rows()) +
                                       " joint rotations, model has " +
                                       std::to_string(model.num_joints()));
  }
  if (frame.shape.size() != model.num_shape()) {
    fail(ErrorCode::ModelMismatch, "frame has " + std::to_string(frame.shape.size()) +
                                       " shape coefficients, model has " +
                                       std::to_string(model.num_shape()));
  }
  if (!frame.pose.allFinite() || !frame.trans.allFinite() || !frame.shape.allFinite()) {
    fail(ErrorCode::InvalidArgument, "frame parameters must be finite");
  }
}

void HandSequence::validate(const HandModel& model) const {
  if (frames.empty()) fail(ErrorCode::InvalidArgument, "hand sequence has no frames");
  for (const auto& f : frames) {
    check_frame(model, f);
    if (f.shape != frames.front().shape) {
      fail(ErrorCode::InvalidArgument, "all frames of a sequence must share one shape");
    }
  }
}

PosedHand::PosedHand(const HandModel& model, const HandFrame& frame)
    : model_(&model), frame_(frame) {
  check_frame(model, frame);
  const int nj = model.num_joints();
  rotation_.resize(nj);
  position_.resize(nj);
  displacement_.resize(nj);
  center_.resize(nj);
  axes_.resize(nj);
  position_shape_.resize(nj);
  for (int j = 0; j < nj; ++j) center_[j] = model.joint_center(j, frame.shape);

  for (int j : model.topological_order()) {
    const Vec3 theta = frame.pose.row(j).transpose();
    const Mat3 local = rodrigues<double>(theta);
    const Mat3 left_jac = rotation_left_jacobian<double>(theta);
    const int p = model.parents()[j];
    if (p < 0) {
      rotation_[j] = local;
      position_[j] = center_[j];
      displacement_[j] = Vec3::Zero();
      axes_[j] = left_jac;
      position_shape_[j] = model.joint_shape_jacobian(j);
    } else {
      rotation_[j] = rotation_[p] * local;
      const Vec3 bone = center_[j] - center_[p];
      position_[j] = position_[p] + rotation_[p] * bone;
      displacement_[j] = displacement_[p] + (rotation_[p] * bone - bone);
      axes_[j] = rotation_[p] * left_jac;
      position_shape_[j] =
          position_shape_[p] +
          rotation_[p] * (model.joint_shape_jacobian(j) - model.joint_shape_jacobian(p));
    }
  }
}

Vec3 PosedHand::blended(int k, const Vec3& shaped) const {
  // written as an offset from the shaped vertex so the identity pose
  // reproduces it exactly
  Vec3 offset = Vec3::Zero();
  for (const auto& [j, w] : model_->vertex_weights(k)) {
    const Vec3 x = shaped - center_[j];
    offset += w * ((rotation_[j] * x - x) + displacement_[j]);
  }
  return shaped + offset;
}

Vec3 PosedHand::local_vertex(int k) const {
  return blended(k, model_->shaped_vertex(k, frame_.shape));
}

MatX3 PosedHand::local_vertices() const {
  MatX3 out(model_->num_vertices(), 3);
  for (int k = 0; k < model_->num_vertices(); ++k) out.row(k) = local_vertex(k).transpose();
  return out;
}

MatX3 PosedHand::vertices() const {
  MatX3 out = local_vertices();
  out.rowwise() += frame_.trans.transpose();
  return out;
}

Vec3 PosedHand::point(const SurfacePoint& sp) const {
  const auto& faces = model_->canonical_mesh().faces();
  if (sp.face < 0 || sp.face >= faces.rows()) {
    fail(ErrorCode::InvalidSurfacePoint, "surface point face " + std::to_string(sp.face) +
                                             " out of range");
  }
  Vec3 out = Vec3::Zero();
  for (int c = 0; c < 3; ++c) out += sp.barycentric[c] * local_vertex(faces(sp.face, c));
  return out + frame_.trans;
}

MatX3 PosedHand::local_joints() const { return regress_joints(*model_, local_vertices()); }

MatX3 PosedHand::joints() const {
  MatX3 out = local_joints();
  out.rowwise() += frame_.trans.transpose();
  return out;
}

void PosedHand::add_vertex_jacobian(int k, double scale, Eigen::Ref<MatX> out) const {
  const Vec3 shaped = model_->shaped_vertex(k, frame_.shape);
  const int nb = model_->num_shape();
  const auto basis = nb > 0 ? model_->vertex_shape_basis(k)
                            : Eigen::Matrix<double, 3, Eigen::Dynamic>(3, 0);
  for (const auto& [j, w] : model_->vertex_weights(k)) {
    const double sw = scale * w;
    const Vec3 g = rotation_[j] * (shaped - center_[j]) + position_[j];
    for (int i : model_->chain(j)) {
      const Vec3 lever = g - position_[i];
      for (int c = 0; c < 3; ++c) {
        out.col(3 * i + c) += sw * axes_[i].col(c).cross(lever);
      }
    }
    if (nb > 0) {
      out.middleCols(model_->shape_offset(), nb) +=
          sw * (rotation_[j] * (basis - model_->joint_shape_jacobian(j)) + position_shape_[j]);
    }
  }
  out.middleCols(model_->trans_offset(), 3) += scale * Mat3::Identity();
}

void PosedHand::add_point_jacobian(const SurfacePoint& sp, double scale,
                                   Eigen::Ref<MatX> out) const {
  const auto& faces = model_->canonical_mesh().faces();
  if (sp.face < 0 || sp.face >= faces.rows()) {
    fail(ErrorCode::InvalidSurfacePoint, "surface point face out of range");
  }
  for (int c = 0; c < 3; ++c) {
    if (sp.barycentric[c] != 0.0) {
      add_vertex_jacobian(faces(sp.face, c), scale * sp.barycentric[c], out);
    }
  }
}

void PosedHand::add_joint_jacobian(int r, double scale, Eigen::Ref<MatX> out) const {
  for (const auto& [v, w] : model_->regressor_row(r)) add_vertex_jacobian(v, scale * w, out);
}

TriMesh skin(const HandModel& model, const HandFrame& frame) {
  return model.canonical_mesh().with_vertices(PosedHand(model, frame).vertices());
}

Vec3 skin_point(const HandModel& model, const HandFrame& frame, const SurfacePoint& sp) {
  return PosedHand(model, frame).point(sp);
}

MatX3 regress_joints(const HandModel& model, const MatX3& posed_vertices) {
  if (posed_vertices.rows() != model.num_vertices()) {
    fail(ErrorCode::ModelMismatch, "regress_joints: got " +
                                       std::to_string(posed_vertices.rows()) +
                                       " vertices, model has " +
                                       std::to_string(model.num_vertices()));
  }
  MatX3 out = MatX3::Zero(model.num_regressed(), 3);
  for (int r = 0; r < model.num_regressed(); ++r) {
    for (const auto& [v, w] : model.regressor_row(r)) out.row(r) += w * posed_vertices.row(v);
  }
  return out;
}

HandModel mirror_hand(const HandModel& model) {
  HandModelData d = model.data();
  d.template_vertices.col(0) = -d.template_vertices.col(0);
  d.faces.col(1).swap(d.faces.col(2));
  d.joint_rest_positions.col(0) = -d.joint_rest_positions.col(0);
  for (Eigen::Index k = 0; k < model.num_vertices(); ++k) d.shape_basis.row(3 * k) *= -1.0;
  return HandModel(std::move(d));
}

HandFrame mirror_hand(const HandFrame& frame) {
  HandFrame out = frame;
  out.pose.col(1) = -out.pose.col(1);
  out.pose.col(2) = -out.pose.col(2);
  out.trans.x() = -out.trans.x();
  return out;
}

TriMesh mirror_hand(const TriMesh& mesh) { return mirror_mesh(mesh); }

}  // namespace toch
