#pragma once

#include "toch/mesh.hpp"

#include <vector>

namespace toch {

using PoseMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// Raw arrays of a linear-blend-skinned hand model, as stored on disk.
struct HandModelData {
  MatX3 template_vertices;       // K x 3, canonical pose
  Faces faces;                   // F x 3
  MatX skinning_weights;         // K x J, rows sum to 1
  std::vector<int> parents;      // J entries, -1 for the root
  MatX3 joint_rest_positions;    // J x 3
  MatX shape_basis;              // 3K x B, row 3k + c is coordinate c of vertex k
  MatX joint_regressor;          // J_out x K, convex rows; first J rows are the kinematic joints
};

/// Immutable LBS hand model. Joint centers follow the shape through the first
/// J regressor rows: c(beta) = joint_rest + R[:J] * (S beta).
class HandModel {
 public:
  static constexpr double kWeightTolerance = 1e-6;

  explicit HandModel(HandModelData data);

  const HandModelData& data() const { return data_; }
  const MatX3& template_vertices() const { return data_.template_vertices; }
  const TriMesh& canonical_mesh() const { return canonical_; }
  const std::vector<int>& parents() const { return data_.parents; }

  int num_vertices() const { return static_cast<int>(data_.template_vertices.rows()); }
  int num_joints() const { return static_cast<int>(data_.parents.size()); }
  int num_shape() const { return static_cast<int>(data_.shape_basis.cols()); }
  int num_regressed() const { return static_cast<int>(data_.joint_regressor.rows()); }
  /// Parameters of one frame: pose (3J), translation (3), shape (B).
  int frame_param_count() const { return 3 * num_joints() + 3 + num_shape(); }
  int trans_offset() const { return 3 * num_joints(); }
  int shape_offset() const { return 3 * num_joints() + 3; }

  /// Joints in parent-before-child order.
  const std::vector<int>& topological_order() const { return order_; }
  /// Chain from the root to j, inclusive.
  const std::vector<int>& chain(int j) const { return chains_[j]; }
  const std::vector<std::pair<int, double>>& vertex_weights(int k) const { return weights_[k]; }
  const std::vector<std::pair<int, double>>& regressor_row(int r) const { return regressor_[r]; }
  /// 3 x B block of d(joint center)/d(beta).
  Eigen::Matrix<double, 3, Eigen::Dynamic> joint_shape_jacobian(int j) const {
    return joint_shape_.middleRows(3 * j, 3);
  }
  Eigen::Matrix<double, 3, Eigen::Dynamic> vertex_shape_basis(int k) const {
    return data_.shape_basis.middleRows(3 * k, 3);
  }
  Vec3 joint_center(int j, const VecX& shape) const;
  Vec3 shaped_vertex(int k, const VecX& shape) const;

 private:
  HandModelData data_;
  TriMesh canonical_;
  std::vector<int> order_;
  std::vector<std::vector<int>> chains_;
  std::vector<std::vector<std::pair<int, double>>> weights_;
  std::vector<std::vector<std::pair<int, double>>> regressor_;
  MatX joint_shape_;  // 3J x B
};

/// One frame of hand parameters: per-joint axis-angle (row 0 is the global
/// orientation about the root joint), translation, and shape coefficients.
struct HandFrame {
  PoseMatrix pose;
  Vec3 trans = Vec3::Zero();
  VecX shape;

  static HandFrame zero(const HandModel& model);
};

struct HandSequence {
  std::vector<HandFrame> frames;
  double fps = 30.0;

  int size() const { return static_cast<int>(frames.size()); }
  const VecX& shape() const { return frames.front().shape; }
  void set_shape(const VecX& shape);
  /// Throws ModelMismatch / InvalidArgument when the invariants do not hold.
  void validate(const HandModel& model) const;
};

void check_frame(const HandModel& model, const HandFrame& frame);

/// Forward kinematics and skinning evaluated once for a frame. Vertex and
/// point Jacobians are 3 x frame_param_count() in the layout
/// [pose (3J) | trans (3) | shape (B)].
class PosedHand {
 public:
  PosedHand(const HandModel& model, const HandFrame& frame);

  const HandModel& model() const { return *model_; }
  const HandFrame& frame() const { return frame_; }

  /// Skinned vertex without the global translation.
  Vec3 local_vertex(int k) const;
  Vec3 vertex(int k) const { return local_vertex(k) + frame_.trans; }
  MatX3 local_vertices() const;
  MatX3 vertices() const;

  Vec3 point(const SurfacePoint& sp) const;
  /// Regressed joints including translation: R * local_vertices + t.
  MatX3 joints() const;
  MatX3 local_joints() const;

  /// out += scale * d vertex_k / d params
  void add_vertex_jacobian(int k, double scale, Eigen::Ref<MatX> out) const;
  void add_point_jacobian(const SurfacePoint& sp, double scale, Eigen::Ref<MatX> out) const;
  void add_joint_jacobian(int r, double scale, Eigen::Ref<MatX> out) const;

  const Mat3& joint_rotation(int j) const { return rotation_[j]; }
  const Vec3& joint_position(int j) const { return position_[j]; }

 private:
  Vec3 blended(int k, const Vec3& shaped) const;

  const HandModel* model_;
  HandFrame frame_;
  std::vector<Mat3> rotation_;   // world rotation per joint
  std::vector<Vec3> position_;   // posed joint position (no translation)
  std::vector<Vec3> displacement_;  // position_ - center_, exactly 0 at the identity pose
  std::vector<Vec3> center_;     // shaped rest joint center
  std::vector<Mat3> axes_;       // columns: world axis of d/d theta_jc
  std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> position_shape_;  // d position / d beta
};

/// Linear blend skinning of the full mesh (faces copied from the template).
TriMesh skin(const HandModel& model, const HandFrame& frame);
/// Barycentric combination of the skinned vertices of sp's face. The
/// barycentric weights refer to the template face; sp.position is ignored.
Vec3 skin_point(const HandModel& model, const HandFrame& frame, const SurfacePoint& sp);
/// joint_regressor * posed_vertices.
MatX3 regress_joints(const HandModel& model, const MatX3& posed_vertices);

/// Reflection across x = 0: the model, a posed mesh, or a frame.
HandModel mirror_hand(const HandModel& model);
HandFrame mirror_hand(const HandFrame& frame);
TriMesh mirror_hand(const TriMesh& mesh);

}  // namespace toch
