#pragma once

#include "toch/bvh.hpp"
#include "toch/hand_model.hpp"
#include "toch/sampling.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace toch {

inline constexpr double kDefaultEpsilon = 1e-4;
inline constexpr int kDefaultPointCount = 2000;
inline constexpr double kDefaultContactTau = 0.002;

using PointSetPtr = std::shared_ptr<const ObjectPointSet>;

/// Per object point: correspondence flag, signed distance along the normal,
/// and canonical template coordinate. Entries with c = 0 hold d = 0, y = 0.
struct TochFrame {
  std::vector<std::uint8_t> c;
  VecX d;
  MatX3 y;
  PointSetPtr points;

  int size() const { return static_cast<int>(c.size()); }
  int correspondence_count() const;
  static TochFrame empty(PointSetPtr points);
};

struct TochSequence {
  std::vector<TochFrame> frames;
  PointSetPtr points;

  int size() const { return static_cast<int>(frames.size()); }
  int point_count() const { return points ? points->size() : 0; }
  /// Throws PointSetMismatch if any frame refers to a different point set.
  void validate() const;
};

/// Result of extraction with the hand surface hit per corresponded point.
struct FieldExtraction {
  TochFrame frame;
  std::vector<SurfacePoint> hand_hits;  // face == -1 where c == 0
};

/// Correspondences by casting rays along signed object normals: s = -1 if the
/// point is inside the hand, ray (o, s n) against the hand gives p1, ray
/// (o + eps s n, s n) against the object gives p2, and c = 1 iff p2 is absent
/// or farther than p1. `canonical` is the unposed template with the same
/// faces as `hand`.
FieldExtraction extract_field_detailed(const Bvh& hand, const TriMesh& canonical,
                                       const Bvh& object, const PointSetPtr& points,
                                       double eps = kDefaultEpsilon);
TochFrame extract_field(const TriMesh& hand, const TriMesh& canonical, const Bvh& object,
                        const PointSetPtr& points, double eps = kDefaultEpsilon);

/// Partial hand cloud seen from the object: o + d n for every c = 1 entry.
struct DecodedCloud {
  std::vector<int> index;  // object point index per row
  MatX3 targets;
  MatX3 canonical;
  int size() const { return static_cast<int>(index.size()); }
};
DecodedCloud decode_field(const TochFrame& frame);

/// c = 1 and |d| <= tau.
std::vector<std::uint8_t> contact_map(const TochFrame& frame, double tau = kDefaultContactTau);

struct ExtractionOptions {
  int n_points = kDefaultPointCount;
  std::uint64_t seed = 0;
  double eps = kDefaultEpsilon;
  int threads = 1;
};

/// One point set sampled from `object`, shared by every frame.
TochSequence extract_sequence(const std::vector<TriMesh>& hands, const TriMesh& canonical,
                              const TriMesh& object, const ExtractionOptions& options = {});
TochSequence extract_sequence(const HandModel& model, const HandSequence& hands,
                              const TriMesh& object, const ExtractionOptions& options = {});
/// Extraction on an existing point set.
TochSequence extract_sequence(const std::vector<TriMesh>& hands, const TriMesh& canonical,
                              const Bvh& object, const PointSetPtr& points, double eps,
                              int threads = 1);

}  // namespace toch
