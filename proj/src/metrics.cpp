#include "toch/metrics.hpp"

#include "toch/error.hpp"
#include "toch/parallel.hpp"
#include "toch/procrustes.hpp"
#include "toch/voxel.hpp"

#include <json.hpp>

#include <cmath>

namespace toch {

namespace {

void check_counts(const std::vector<MatX3>& pred, const std::vector<MatX3>& gt) {
  if (pred.size() != gt.size()) {
    fail(ErrorCode::ShapeMismatch, "frame counts differ: " + std::to_string(pred.size()) +
                                       " vs " + std::to_string(gt.size()));
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].rows() != gt[i].rows()) {
      fail(ErrorCode::ShapeMismatch, "point counts differ in frame " + std::to_string(i));
    }
  }
}

double mean_distance_mm(const MatX3& diff) {
  RunningMean m;
  for (Eigen::Index r = 0; r < diff.rows(); ++r) m.add(diff.row(r).norm());
  return 1000.0 * m.value();
}

double sequence_error(const std::vector<MatX3>& pred, const std::vector<MatX3>& gt,
                      bool procrustes) {
  check_counts(pred, gt);
  RunningMean m;
  for (std::size_t i = 0; i < pred.size(); ++i) m.add(frame_error_mm(pred[i], gt[i], procrustes));
  return m.value();
}

}  // namespace

double frame_error_mm(const MatX3& pred, const MatX3& gt, bool procrustes) {
  if (pred.rows() != gt.rows()) fail(ErrorCode::ShapeMismatch, "point counts differ");
  if (!procrustes) return mean_distance_mm(pred - gt);
  const auto align = procrustes_align<double>(pred, gt);
  return mean_distance_mm(apply_alignment(align, pred) - gt);
}

double mpjpe(const std::vector<MatX3>& pred, const std::vector<MatX3>& gt, bool procrustes) {
  return sequence_error(pred, gt, procrustes);
}

double mpvpe(const std::vector<MatX3>& pred, const std::vector<MatX3>& gt, bool procrustes) {
  return sequence_error(pred, gt, procrustes);
}

double intersection_volume(const TriMesh& hand, const Bvh& object, double voxel_edge) {
  if (!(voxel_edge > 0.0)) fail(ErrorCode::InvalidArgument, "voxel edge must be positive");
  const Aabb hb = hand.bounds();
  const Aabb ob = object.mesh().bounds();
  if (hand.empty() || object.mesh().empty() || !hb.overlaps(ob)) return 0.0;
  const Bvh hand_bvh(hand);
  OccupancyGrid grid = grid_covering(hb.intersection(ob), voxel_edge);
  std::size_t both = 0;
  for (int k = 0; k < grid.dims[2]; ++k) {
    for (int j = 0; j < grid.dims[1]; ++j) {
      for (int i = 0; i < grid.dims[0]; ++i) {
        const Vec3 c = grid.center(i, j, k);
        if (object.contains(c) && hand_bvh.contains(c)) ++both;
      }
    }
  }
  return static_cast<double>(both) * grid.voxel_volume() * 1e6;
}

double contact_iou(const TochFrame& pred, const TochFrame& gt, double tau) {
  if (pred.size() != gt.size() || !pred.points || !gt.points ||
      (pred.points != gt.points && !pred.points->same_points(*gt.points))) {
    fail(ErrorCode::PointSetMismatch, "contact IoU needs fields on the same object points");
  }
  const auto a = contact_map(pred, tau);
  const auto b = contact_map(gt, tau);
  int inter = 0;
  int uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  if (uni == 0) return 100.0;
  return 100.0 * static_cast<double>(inter) / static_cast<double>(uni);
}

MetricReport pose_errors(const HandModel& model, const HandSequence& pred, const HandSequence& gt,
                         bool procrustes) {
  pred.validate(model);
  gt.validate(model);
  if (pred.size() != gt.size()) {
    fail(ErrorCode::ShapeMismatch, "prediction and groundtruth have different frame counts");
  }
  MetricReport report;
  report.procrustes = procrustes;
  RunningMean joints_mean;
  RunningMean verts_mean;
  for (int i = 0; i < pred.size(); ++i) {
    const PosedHand p(model, pred.frames[i]);
    const PosedHand g(model, gt.frames[i]);
    const Vec3 dt = pred.frames[i].trans - gt.frames[i].trans;
    double ej = 0.0;
    double ev = 0.0;
    if (procrustes) {
      ej = frame_error_mm(p.joints(), g.joints(), true);
      ev = frame_error_mm(p.vertices(), g.vertices(), true);
    } else {
      MatX3 dj = p.local_joints() - g.local_joints();
      dj.rowwise() += dt.transpose();
      MatX3 dv = p.local_vertices() - g.local_vertices();
      dv.rowwise() += dt.transpose();
      ej = mean_distance_mm(dj);
      ev = mean_distance_mm(dv);
    }
    report.mpjpe_per_frame.push_back(ej);
    report.mpvpe_per_frame.push_back(ev);
    joints_mean.add(ej);
    verts_mean.add(ev);
  }
  report.mpjpe = joints_mean.value();
  report.mpvpe = verts_mean.value();
  return report;
}

MetricReport evaluate_sequences(const HandModel& model, const HandSequence& pred,
                                const HandSequence& gt, const TriMesh& object,
                                const PointSetPtr& points, const MetricOptions& options,
                                double eps) {
  MetricReport report = pose_errors(model, pred, gt, options.procrustes);
  report.voxel_edge = options.voxel_edge;
  report.tau = options.tau;
  const Bvh object_bvh(object);
  const int t = pred.size();
  report.iv_per_frame.assign(t, 0.0);
  report.ciou_per_frame.assign(t, 0.0);
  parallel_for(t, options.threads, [&](int i) {
    const TriMesh pm = skin(model, pred.frames[i]);
    const TriMesh gm = skin(model, gt.frames[i]);
    report.iv_per_frame[i] = intersection_volume(pm, object_bvh, options.voxel_edge);
    const TochFrame pf = extract_field(pm, model.canonical_mesh(), object_bvh, points, eps);
    const TochFrame gf = extract_field(gm, model.canonical_mesh(), object_bvh, points, eps);
    report.ciou_per_frame[i] = contact_iou(pf, gf, options.tau);
  });
  RunningMean iv;
  RunningMean ciou;
  for (int i = 0; i < t; ++i) {
    iv.add(report.iv_per_frame[i]);
    ciou.add(report.ciou_per_frame[i]);
  }
  report.iv = iv.value();
  report.ciou = ciou.value();
  return report;
}

std::string MetricReport::to_json() const {
  nlohmann::json doc;
  doc["mpjpe_mm"] = mpjpe;
  doc["mpvpe_mm"] = mpvpe;
  doc["iv_cm3"] = iv;
  doc["ciou_percent"] = ciou;
  doc["procrustes"] = procrustes;
  doc["voxel_edge_m"] = voxel_edge;
  doc["tau_m"] = tau;
  doc["per_frame"] = {{"mpjpe_mm", mpjpe_per_frame},
                      {"mpvpe_mm", mpvpe_per_frame},
                      {"iv_cm3", iv_per_frame},
                      {"ciou_percent", ciou_per_frame}};
  return doc.dump(2);
}

}  // namespace toch
