#include "toch/fitter.hpp"

#include "toch/error.hpp"
#include "toch/parallel.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace toch {

void FitConfig::validate() const {
  for (double w : {w1, w2, w3, w4}) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::InvalidArgument, "loss weights must be finite and >= 0");
  }
  if (stage1_iters < 0 || stage2_iters < 0) fail(ErrorCode::InvalidArgument, "iteration counts must be >= 0");
  if (!(smooth_eps > 0.0)) fail(ErrorCode::InvalidArgument, "smoothing epsilon must be > 0");
  if (!(tolerance >= 0.0) || patience < 1 || lbfgs_memory < 1 || max_backtracks < 1 ||
      !(armijo > 0.0 && armijo < 1.0) || !(backtrack > 0.0 && backtrack < 1.0)) {
    fail(ErrorCode::InvalidArgument, "invalid optimizer settings");
  }
}

Correspondences make_correspondences(const Bvh& template_bvh, const TochFrame& frame) {
  const DecodedCloud cloud = decode_field(frame);
  Correspondences out;
  out.targets = cloud.targets;
  out.anchors.reserve(cloud.size());
  for (int i = 0; i < cloud.size(); ++i) {
    out.anchors.push_back(template_bvh.closest_point(cloud.canonical.row(i).transpose()));
  }
  return out;
}

std::vector<Correspondences> make_correspondences(const HandModel& model, const TochSequence& seq) {
  seq.validate();
  const Bvh bvh(model.canonical_mesh());
  std::vector<Correspondences> out(seq.size());
  for (int i = 0; i < seq.size(); ++i) out[i] = make_correspondences(bvh, seq.frames[i]);
  return out;
}

namespace {

FrameLoss corr_loss_posed(const PosedHand& hand, const Correspondences& corr) {
  const int p = hand.model().frame_param_count();
  FrameLoss out;
  out.gradient = VecX::Zero(p);
  out.gauss_newton_diagonal = VecX::Zero(p);
  MatX jac(3, p);
  for (int i = 0; i < corr.size(); ++i) {
    const Vec3 r = hand.point(corr.anchors[i]) - corr.targets.row(i).transpose();
    out.value += r.squaredNorm();
    jac.setZero();
    hand.add_point_jacobian(corr.anchors[i], 1.0, jac);
    out.gradient.noalias() += 2.0 * jac.transpose() * r;
    out.gauss_newton_diagonal += 2.0 * jac.colwise().squaredNorm().transpose();
  }
  return out;
}

Vec3 local_joint(const PosedHand& hand, int r) {
  Vec3 p = Vec3::Zero();
  for (const auto& [v, w] : hand.model().regressor_row(r)) p += w * hand.local_vertex(v);
  return p;
}

}  // namespace

FrameLoss corr_loss(const HandModel& model, const HandFrame& frame, const Correspondences& corr) {
  check_frame(model, frame);
  return corr_loss_posed(PosedHand(model, frame), corr);
}

SequenceLayout::SequenceLayout(const HandModel& model, int frame_count)
    : joints(model.num_joints()), shapes(model.num_shape()), frames(frame_count) {}

VecX SequenceLayout::pack(const HandSequence& seq) const {
  VecX x(size());
  x.head(shapes) = seq.shape();
  for (int i = 0; i < frames; ++i) {
    const HandFrame& f = seq.frames[i];
    for (int j = 0; j < joints; ++j) x.segment<3>(pose_offset(i, j)) = f.pose.row(j).transpose();
    x.segment<3>(trans_offset(i)) = f.trans;
  }
  return x;
}

HandSequence SequenceLayout::unpack(const VecX& x, double fps) const {
  HandSequence seq;
  seq.fps = fps;
  seq.frames.resize(frames);
  for (int i = 0; i < frames; ++i) {
    HandFrame& f = seq.frames[i];
    f.pose.resize(joints, 3);
    for (int j = 0; j < joints; ++j) f.pose.row(j) = x.segment<3>(pose_offset(i, j)).transpose();
    f.trans = x.segment<3>(trans_offset(i));
    f.shape = x.head(shapes);
  }
  return seq;
}

void SequenceLayout::scatter(int frame, const VecX& g, VecX& out) const {
  out.segment(frame_offset(frame), per_frame()) += g.head(per_frame());
  out.head(shapes) += g.tail(shapes);
}

namespace {

// Regularizer on already posed frames; gradient in sequence layout.
RegLoss reg_loss_posed(const HandModel& model, const std::vector<PosedHand>& hands,
                       const VecX& x, const SequenceLayout& layout, const FitConfig& cfg) {
  const int t_count = layout.frames;
  const int nj = layout.joints;
  RegLoss out;
  out.gradient = VecX::Zero(layout.size());
  const VecX beta = x.head(layout.shapes);
  out.terms.shape = cfg.w1 * beta.squaredNorm();
  out.gradient.head(layout.shapes) += 2.0 * cfg.w1 * beta;
  for (int i = 0; i < t_count; ++i) {
    const auto theta = x.segment(layout.frame_offset(i), 3 * nj);
    out.terms.pose += cfg.w2 * theta.squaredNorm();
    out.gradient.segment(layout.frame_offset(i), 3 * nj) += 2.0 * cfg.w2 * theta;
  }
  for (int i = 0; i + 1 < t_count; ++i) {
    const VecX diff = x.segment(layout.frame_offset(i + 1), 3 * nj) -
                      x.segment(layout.frame_offset(i), 3 * nj);
    out.terms.velocity += cfg.w3 * diff.squaredNorm();
    out.gradient.segment(layout.frame_offset(i + 1), 3 * nj) += 2.0 * cfg.w3 * diff;
    out.gradient.segment(layout.frame_offset(i), 3 * nj) -= 2.0 * cfg.w3 * diff;
  }
  if (t_count < 3 || cfg.w4 == 0.0) return out;

  const int nr = model.num_regressed();
  std::vector<MatX3> joints(t_count, MatX3(nr, 3));
  for (int i = 0; i < t_count; ++i) {
    for (int r = 0; r < nr; ++r) {
      joints[i].row(r) = (local_joint(hands[i], r) + hands[i].frame().trans).transpose();
    }
  }
  // d loss / d joint position, per frame
  std::vector<MatX3> dj(t_count, MatX3::Zero(nr, 3));
  const double eps2 = cfg.smooth_eps * cfg.smooth_eps;
  for (int i = 1; i + 1 < t_count; ++i) {
    for (int r = 0; r < nr; ++r) {
      const Eigen::RowVector3d a = joints[i + 1].row(r) - 2.0 * joints[i].row(r) + joints[i - 1].row(r);
      const double n = std::sqrt(a.squaredNorm() + eps2);
      out.terms.acceleration += cfg.w4 * n;
      const Eigen::RowVector3d g = cfg.w4 * a / n;
      dj[i + 1].row(r) += g;
      dj[i].row(r) -= 2.0 * g;
      dj[i - 1].row(r) += g;
    }
  }
  const int p = model.frame_param_count();
  MatX jac(3, p);
  for (int i = 0; i < t_count; ++i) {
    VecX g = VecX::Zero(p);
    for (int r = 0; r < nr; ++r) {
      jac.setZero();
      hands[i].add_joint_jacobian(r, 1.0, jac);
      g.noalias() += jac.transpose() * dj[i].row(r).transpose();
    }
    layout.scatter(i, g, out.gradient);
  }
  return out;
}

std::vector<PosedHand> pose_all(const HandModel& model, const HandSequence& seq) {
  std::vector<PosedHand> hands;
  hands.reserve(seq.size());
  for (const auto& f : seq.frames) hands.emplace_back(model, f);
  return hands;
}

struct Evaluation {
  double corr = 0.0;
  RegTerms reg;
  VecX gradient;
  VecX diagonal;
  double total() const { return corr + reg.total(); }
};

class Objective {
 public:
  Objective(const HandModel& model, const std::vector<Correspondences>& corr,
            const SequenceLayout& layout, const FitConfig& cfg, double fps)
      : model_(model), corr_(corr), layout_(layout), cfg_(cfg), fps_(fps) {}

  Evaluation operator()(const VecX& x) const {
    const HandSequence seq = layout_.unpack(x, fps_);
    const std::vector<PosedHand> hands = pose_all(model_, seq);
    std::vector<FrameLoss> frame_loss(layout_.frames);
    parallel_for(layout_.frames, cfg_.threads,
                 [&](int i) { frame_loss[i] = corr_loss_posed(hands[i], corr_[i]); });
    Evaluation e;
    e.gradient = VecX::Zero(layout_.size());
    e.diagonal = VecX::Zero(layout_.size());
    for (int i = 0; i < layout_.frames; ++i) {
      e.corr += frame_loss[i].value;
      layout_.scatter(i, frame_loss[i].gradient, e.gradient);
      layout_.scatter(i, frame_loss[i].gauss_newton_diagonal, e.diagonal);
    }
    RegLoss reg = reg_loss_posed(model_, hands, x, layout_, cfg_);
    e.reg = reg.terms;
    e.gradient += reg.gradient;
    e.diagonal.head(layout_.shapes).array() += 2.0 * cfg_.w1;
    for (int i = 0; i < layout_.frames; ++i) {
      e.diagonal.segment(layout_.frame_offset(i), 3 * layout_.joints).array() +=
          2.0 * cfg_.w2 + 4.0 * cfg_.w3;
    }
    return e;
  }

 private:
  const HandModel& model_;
  const std::vector<Correspondences>& corr_;
  const SequenceLayout& layout_;
  const FitConfig& cfg_;
  double fps_;
};

// Preconditioned L-BFGS restricted to the entries with mask == true.
void run_stage(const Objective& objective, const std::vector<bool>& mask, int max_iters,
               const FitConfig& cfg, VecX& x, StageReport& report) {
  const int n = static_cast<int>(x.size());
  auto restrict = [&](VecX v) {
    for (int k = 0; k < n; ++k) {
      if (!mask[k]) v[k] = 0.0;
    }
    return v;
  };
  Evaluation e = objective(x);
  report.initial_corr = e.corr;
  report.initial_reg = e.reg;
  report.loss_history.push_back(e.total());
  if (!std::isfinite(e.total()) || !e.gradient.allFinite()) {
    fail(ErrorCode::InvalidInitialization, "initial loss is not finite");
  }
  // Diagonal preconditioner frozen at the stage start.
  VecX inv_diag(n);
  const double floor = std::max(1e-12, 1e-8 * e.diagonal.maxCoeff());
  for (int k = 0; k < n; ++k) inv_diag[k] = mask[k] ? 1.0 / std::max(e.diagonal[k], floor) : 0.0;

  std::deque<VecX> s_hist, y_hist;
  std::deque<double> rho_hist;
  int stalled = 0;
  VecX g = restrict(e.gradient);
  for (int it = 0; it < max_iters; ++it) {
    if (g.squaredNorm() == 0.0) break;
    // two-loop recursion
    VecX q = g;
    std::vector<double> alpha(s_hist.size());
    for (int m = static_cast<int>(s_hist.size()) - 1; m >= 0; --m) {
      alpha[m] = rho_hist[m] * s_hist[m].dot(q);
      q -= alpha[m] * y_hist[m];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) {
      const VecX& y = y_hist.back();
      gamma = s_hist.back().dot(y) / y.dot(inv_diag.cwiseProduct(y));
    }
    VecX dir = gamma * inv_diag.cwiseProduct(q);
    for (std::size_t m = 0; m < s_hist.size(); ++m) {
      const double beta = rho_hist[m] * y_hist[m].dot(dir);
      dir += s_hist[m] * (alpha[m] - beta);
    }
    dir = -dir;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -inv_diag.cwiseProduct(g);
      slope = g.dot(dir);
    }

    double step = 1.0;
    bool accepted = false;
    Evaluation trial;
    VecX x_new;
    for (int b = 0; b < cfg.max_backtracks; ++b) {
      x_new = x + step * dir;
      trial = objective(x_new);
      if (std::isfinite(trial.total()) && trial.total() <= e.total() + cfg.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) break;

    const VecX g_new = restrict(trial.gradient);
    const VecX s = x_new - x;
    const VecX y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * std::sqrt(s.squaredNorm() * y.squaredNorm())) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > cfg.lbfgs_memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double decrease = e.total() - trial.total();
    x = x_new;
    e = trial;
    g = g_new;
    report.iterations = it + 1;
    report.loss_history.push_back(e.total());
    if (decrease <= cfg.tolerance * std::max(e.total(), std::numeric_limits<double>::min())) {
      if (++stalled >= cfg.patience) break;
    } else {
      stalled = 0;
    }
  }
  report.final_corr = e.corr;
  report.final_reg = e.reg;
}

}  // namespace

RegLoss reg_loss(const HandModel& model, const HandSequence& seq, const FitConfig& cfg) {
  seq.validate(model);
  const SequenceLayout layout(model, seq.size());
  return reg_loss_posed(model, pose_all(model, seq), layout.pack(seq), layout, cfg);
}

FitResult fit_sequence(const HandModel& model, const TochSequence& fields,
                       const HandSequence& init, const FitConfig& cfg) {
  if (fields.size() != init.size()) {
    fail(ErrorCode::InvalidArgument, "field has " + std::to_string(fields.size()) +
                                         " frames, initialization has " +
                                         std::to_string(init.size()));
  }
  return fit_sequence(model, make_correspondences(model, fields), init, cfg);
}

FitResult fit_sequence(const HandModel& model, const std::vector<Correspondences>& corr,
                       const HandSequence& init, const FitConfig& cfg) {
  cfg.validate();
  if (init.size() == 0) fail(ErrorCode::InvalidArgument, "empty hand sequence");
  init.validate(model);
  if (static_cast<int>(corr.size()) != init.size()) {
    fail(ErrorCode::InvalidArgument, "correspondences for " + std::to_string(corr.size()) +
                                         " frames, initialization has " +
                                         std::to_string(init.size()));
  }
  const SequenceLayout layout(model, init.size());
  const Objective objective(model, corr, layout, cfg, init.fps);
  VecX x = layout.pack(init);

  FitResult result;
  std::vector<bool> mask1(layout.size(), false);
  for (int i = 0; i < layout.frames; ++i) {
    for (int c = 0; c < 3; ++c) {
      mask1[layout.pose_offset(i, 0) + c] = true;
      mask1[layout.trans_offset(i) + c] = true;
    }
  }
  StageReport s1;
  s1.name = "global";
  run_stage(objective, mask1, cfg.stage1_iters, cfg, x, s1);
  result.report.stages.push_back(s1);

  StageReport s2;
  s2.name = "full";
  run_stage(objective, std::vector<bool>(layout.size(), true), cfg.stage2_iters, cfg, x, s2);
  result.report.stages.push_back(s2);

  result.sequence = layout.unpack(x, init.fps);
  for (int i = 0; i < layout.frames; ++i) {
    const PosedHand hand(model, result.sequence.frames[i]);
    double sum = 0.0, mx = 0.0;
    for (int k = 0; k < corr[i].size(); ++k) {
      const double r = (hand.point(corr[i].anchors[k]) - corr[i].targets.row(k).transpose()).norm();
      sum += r;
      mx = std::max(mx, r);
    }
    result.report.correspondences.push_back(corr[i].size());
    result.report.residual_mean.push_back(corr[i].size() > 0 ? sum / corr[i].size() : 0.0);
    result.report.residual_max.push_back(mx);
  }
  return result;
}

}  // namespace toch
