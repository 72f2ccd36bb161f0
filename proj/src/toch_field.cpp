#include "toch/toch_field.hpp"

#include "toch/error.hpp"
#include "toch/parallel.hpp"

#include <cmath>

namespace toch {

int TochFrame::correspondence_count() const {
  int n = 0;
  for (auto v : c) n += v != 0;
  return n;
}

TochFrame TochFrame::empty(PointSetPtr points) {
  TochFrame f;
  const int n = points ? points->size() : 0;
  f.c.assign(n, 0);
  f.d = VecX::Zero(n);
  f.y = MatX3::Zero(n, 3);
  f.points = std::move(points);
  return f;
}

void TochSequence::validate() const {
  if (!points) fail(ErrorCode::PointSetMismatch, "TOCH sequence has no point set");
  for (const auto& f : frames) {
    if (f.points != points && !(f.points && f.points->same_points(*points))) {
      fail(ErrorCode::PointSetMismatch, "TOCH frames reference different point sets");
    }
    if (f.size() != points->size() || f.d.size() != f.size() || f.y.rows() != f.size()) {
      fail(ErrorCode::PointSetMismatch, "TOCH frame size does not match its point set");
    }
  }
}

namespace {

void check_point_set(const ObjectPointSet& points) {
  for (int i = 0; i < points.size(); ++i) {
    // Point sets read back from f32 storage are unit only to single precision.
    if (std::abs(points.normal(i).norm() - 1.0) > 1e-6) {
      fail(ErrorCode::InvalidArgument, "object normal " + std::to_string(i) + " is not unit length");
    }
  }
}

}  // namespace

FieldExtraction extract_field_detailed(const Bvh& hand, const TriMesh& canonical,
                                       const Bvh& object, const PointSetPtr& points, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::InvalidEpsilon, "occlusion epsilon must be positive");
  if (!points) fail(ErrorCode::InvalidArgument, "missing object point set");
  if (canonical.num_faces() != hand.mesh().num_faces()) {
    fail(ErrorCode::ModelMismatch, "canonical template and hand mesh have different faces");
  }
  check_point_set(*points);

  FieldExtraction out;
  out.frame = TochFrame::empty(points);
  out.hand_hits.assign(points->size(), SurfacePoint{});
  for (int i = 0; i < points->size(); ++i) {
    const Vec3 o = points->point(i);
    const double s = hand.contains(o) ? -1.0 : 1.0;
    const Vec3 dir = s * points->normal(i).normalized();
    const auto first = hand.intersect(o, dir);
    if (!first) continue;
    const double hand_distance = (o - first->point.position).norm();
    const auto occluder = object.intersect(o + eps * dir, dir);
    if (occluder && !(hand_distance < (o - occluder->point.position).norm())) continue;

    out.frame.c[i] = 1;
    out.frame.d[i] = s * hand_distance;
    out.frame.y.row(i) =
        canonical.point_on_face(first->point.face, first->point.barycentric).transpose();
    out.hand_hits[i] = first->point;
  }
  return out;
}

TochFrame extract_field(const TriMesh& hand, const TriMesh& canonical, const Bvh& object,
                        const PointSetPtr& points, double eps) {
  return extract_field_detailed(Bvh(hand), canonical, object, points, eps).frame;
}

DecodedCloud decode_field(const TochFrame& frame) {
  DecodedCloud out;
  if (!frame.points) return out;
  const int n = frame.correspondence_count();
  out.index.reserve(n);
  out.targets.resize(n, 3);
  out.canonical.resize(n, 3);
  int row = 0;
  for (int i = 0; i < frame.size(); ++i) {
    if (!frame.c[i]) continue;
    out.index.push_back(i);
    out.targets.row(row) = (frame.points->point(i) + frame.d[i] * frame.points->normal(i)).transpose();
    out.canonical.row(row) = frame.y.row(i);
    ++row;
  }
  return out;
}

std::vector<std::uint8_t> contact_map(const TochFrame& frame, double tau) {
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "contact threshold must be positive");
  std::vector<std::uint8_t> out(frame.size(), 0);
  for (int i = 0; i < frame.size(); ++i) out[i] = frame.c[i] && std::abs(frame.d[i]) <= tau;
  return out;
}

TochSequence extract_sequence(const std::vector<TriMesh>& hands, const TriMesh& canonical,
                              const Bvh& object, const PointSetPtr& points, double eps,
                              int threads) {
  if (hands.empty()) fail(ErrorCode::InvalidArgument, "no hand frames to extract");
  TochSequence seq;
  seq.points = points;
  seq.frames.resize(hands.size());
  parallel_for(static_cast<int>(hands.size()), threads, [&](int i) {
    seq.frames[i] = extract_field(hands[i], canonical, object, points, eps);
  });
  return seq;
}

TochSequence extract_sequence(const std::vector<TriMesh>& hands, const TriMesh& canonical,
                              const TriMesh& object, const ExtractionOptions& options) {
  auto points = std::make_shared<const ObjectPointSet>(
      sample_surface(object, options.n_points, options.seed));
  return extract_sequence(hands, canonical, Bvh(object), points, options.eps, options.threads);
}

TochSequence extract_sequence(const HandModel& model, const HandSequence& hands,
                              const TriMesh& object, const ExtractionOptions& options) {
  hands.validate(model);
  std::vector<TriMesh> meshes;
  meshes.reserve(hands.frames.size());
  for (const auto& f : hands.frames) meshes.push_back(skin(model, f));
  return extract_sequence(meshes, model.canonical_mesh(), object, options);
}

}  // namespace toch
