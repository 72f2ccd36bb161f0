#pragma once

#include "toch/bvh.hpp"
#include "toch/hand_model.hpp"
#include "toch/toch_field.hpp"

#include <string>
#include <vector>

namespace toch {

inline constexpr double kDefaultVoxelEdge = 0.005;

/// Arithmetic mean that is exact when every sample is identical.
class RunningMean {
 public:
  void add(double x) {
    ++count_;
    mean_ += (x - mean_) / static_cast<double>(count_);
  }
  double value() const { return mean_; }
  long count() const { return count_; }

 private:
  double mean_ = 0.0;
  long count_ = 0;
};

/// Mean per-point distance in mm over all frames; with `procrustes` each
/// predicted frame is first rigidly aligned to its groundtruth frame.
double mpjpe(const std::vector<MatX3>& pred_joints, const std::vector<MatX3>& gt_joints,
             bool procrustes = false);
double mpvpe(const std::vector<MatX3>& pred_vertices, const std::vector<MatX3>& gt_vertices,
             bool procrustes = false);
/// Per-frame mean distance in mm.
double frame_error_mm(const MatX3& pred, const MatX3& gt, bool procrustes);

/// Volume in cm^3 of voxels (edge in m) whose centers are inside both meshes,
/// on a grid anchored at the minimum corner of the bounding-box overlap.
double intersection_volume(const TriMesh& hand, const Bvh& object,
                           double voxel_edge = kDefaultVoxelEdge);

/// Contact IoU in percent; 100 when both maps are empty.
double contact_iou(const TochFrame& pred, const TochFrame& gt, double tau = kDefaultContactTau);

struct MetricOptions {
  bool procrustes = false;
  double voxel_edge = kDefaultVoxelEdge;
  double tau = kDefaultContactTau;
  int threads = 1;
};

struct MetricReport {
  double mpjpe = 0.0;  // mm
  double mpvpe = 0.0;  // mm
  double iv = 0.0;     // cm^3, mean over frames of the prediction
  double ciou = 0.0;   // percent, mean over frames
  bool procrustes = false;
  double voxel_edge = kDefaultVoxelEdge;
  double tau = kDefaultContactTau;
  std::vector<double> mpjpe_per_frame;
  std::vector<double> mpvpe_per_frame;
  std::vector<double> iv_per_frame;
  std::vector<double> ciou_per_frame;

  std::string to_json() const;
};

/// Errors are formed as (local_pred - local_gt) + (t_pred - t_gt) so a pure
/// translation offset gives identical per-joint and per-vertex distances.
/// Contact maps are extracted from both sequences on `points`.
MetricReport evaluate_sequences(const HandModel& model, const HandSequence& pred,
                                const HandSequence& gt, const TriMesh& object,
                                const PointSetPtr& points, const MetricOptions& options = {},
                                double eps = kDefaultEpsilon);

/// Pose-only part of evaluate_sequences (MPJPE/MPVPE, no IV or C-IoU).
MetricReport pose_errors(const HandModel& model, const HandSequence& pred, const HandSequence& gt,
                         bool procrustes = false);

}  // namespace toch
