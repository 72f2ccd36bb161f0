#pragma once

#include "toch/bvh.hpp"
#include "toch/hand_model.hpp"
#include "toch/toch_field.hpp"

#include <string>
#include <vector>

namespace toch {

struct FitConfig {
  double w1 = 1e-3;  // |beta|^2
  double w2 = 1e-4;  // sum |theta_i|^2
  double w3 = 1e-2;  // sum |theta_{i+1} - theta_i|^2
  double w4 = 1e-2;  // sum smooth |joint acceleration|
  int stage1_iters = 200;
  int stage2_iters = 600;
  double smooth_eps = 1e-6;
  /// Stop a stage after `patience` consecutive steps whose relative loss
  /// decrease is below this.
  double tolerance = 1e-10;
  int patience = 5;
  int lbfgs_memory = 10;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  int threads = 1;

  void validate() const;
};

/// Fixed correspondences for one frame: template surface anchors
/// (Proj_Y of the decoded canonical coordinates) and their targets o + d n.
struct Correspondences {
  std::vector<SurfacePoint> anchors;
  MatX3 targets;
  int size() const { return static_cast<int>(anchors.size()); }
};

Correspondences make_correspondences(const Bvh& template_bvh, const TochFrame& frame);
std::vector<Correspondences> make_correspondences(const HandModel& model, const TochSequence& seq);

/// Value plus gradient in the frame layout [pose (3J) | trans (3) | shape (B)].
struct FrameLoss {
  double value = 0.0;
  VecX gradient;
  VecX gauss_newton_diagonal;
};

/// sum_j |target_j - skin_point(anchor_j)|^2; zero with zero gradient when
/// there are no correspondences.
FrameLoss corr_loss(const HandModel& model, const HandFrame& frame, const Correspondences& corr);

/// Parameter vector of a whole sequence: [beta (B) | frame 0 (pose 3J, trans 3) | frame 1 ...].
struct SequenceLayout {
  int joints = 0;
  int shapes = 0;
  int frames = 0;

  SequenceLayout(const HandModel& model, int frame_count);
  int size() const { return shapes + frames * per_frame(); }
  int per_frame() const { return 3 * joints + 3; }
  int frame_offset(int i) const { return shapes + i * per_frame(); }
  int pose_offset(int i, int j) const { return frame_offset(i) + 3 * j; }
  int trans_offset(int i) const { return frame_offset(i) + 3 * joints; }

  VecX pack(const HandSequence& seq) const;
  HandSequence unpack(const VecX& x, double fps) const;
  /// Adds a frame-layout gradient into the sequence-layout vector.
  void scatter(int frame, const VecX& frame_gradient, VecX& out) const;
};

struct RegTerms {
  double shape = 0.0;
  double pose = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
  double total() const { return shape + pose + velocity + acceleration; }
};

struct RegLoss {
  RegTerms terms;
  VecX gradient;  // sequence layout
  double value() const { return terms.total(); }
};

/// w1|beta|^2 + w2 sum|theta_i|^2 + w3 sum|theta_{i+1}-theta_i|^2
/// + w4 sum_{i=1}^{T-2} sum_k sqrt(|p_{i+1,k} - 2 p_{i,k} + p_{i-1,k}|^2 + eps^2)
/// over the regressed joints p (frame-index differencing).
RegLoss reg_loss(const HandModel& model, const HandSequence& seq, const FitConfig& cfg);

struct StageReport {
  std::string name;
  double initial_corr = 0.0;
  RegTerms initial_reg;
  double final_corr = 0.0;
  RegTerms final_reg;
  int iterations = 0;
  std::vector<double> loss_history;  // after every accepted step, starting with the initial loss
  double initial_total() const { return initial_corr + initial_reg.total(); }
  double final_total() const { return final_corr + final_reg.total(); }
};

struct FitReport {
  std::vector<StageReport> stages;
  std::vector<double> residual_mean;  // per frame, m
  std::vector<double> residual_max;   // per frame, m
  std::vector<int> correspondences;   // per frame
  double initial_loss() const { return stages.front().initial_total(); }
  double final_loss() const { return stages.back().final_total(); }
};

struct FitResult {
  HandSequence sequence;
  FitReport report;
};

/// Stage 1 optimizes root orientation and translation of every frame,
/// stage 2 shape, all poses and translations; both by preconditioned L-BFGS
/// with Armijo backtracking, so the total loss never increases.
FitResult fit_sequence(const HandModel& model, const TochSequence& fields,
                       const HandSequence& init, const FitConfig& cfg = {});
/// Same with correspondences already projected.
FitResult fit_sequence(const HandModel& model, const std::vector<Correspondences>& corr,
                       const HandSequence& init, const FitConfig& cfg = {});

}  // namespace toch
