#include "toch/synthetic_hand.hpp"

#include "toch/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace toch {

namespace {

struct Station {
  double axial;
  double radius1;  // along e1
  double radius2;  // along e2
};

struct TubeFrame {
  Vec3 base;
  Vec3 axis;  // u
  Vec3 e1;
  Vec3 e2;    // e1 x e2 = u
};

struct MeshBuilder {
  std::vector<Vec3> vertices;
  std::vector<double> axial;  // tube-local axial coordinate per vertex
  std::vector<Face> faces;

  int add(const Vec3& p, double a) {
    vertices.push_back(p);
    axial.push_back(a);
    return static_cast<int>(vertices.size()) - 1;
  }
};

/// Closed tube: start pole, start cap rings, station rings, end cap rings,
/// end pole. Returns the first vertex index of each station ring.
std::vector<int> add_tube(MeshBuilder& mb, const TubeFrame& tf, const std::vector<Station>& st,
                          int resolution, int cap_rings, double start_depth, double end_depth) {
  auto ring_point = [&](double axial, double r1, double r2, int i) {
    const double phi = 2.0 * std::numbers::pi * i / resolution;
    return Vec3(tf.base + axial * tf.axis + r1 * std::cos(phi) * tf.e1 +
                r2 * std::sin(phi) * tf.e2);
  };
  std::vector<int> rings;  // first index of each ring, in axial order
  std::vector<int> station_rings;

  const int start_pole = mb.add(tf.base + (st.front().axial - start_depth) * tf.axis,
                                st.front().axial - start_depth);
  for (int m = cap_rings; m >= 1; --m) {
    const double alpha = 0.5 * std::numbers::pi * m / (cap_rings + 1);
    const double a = st.front().axial - start_depth * std::sin(alpha);
    rings.push_back(static_cast<int>(mb.vertices.size()));
    for (int i = 0; i < resolution; ++i) {
      mb.add(ring_point(a, st.front().radius1 * std::cos(alpha),
                        st.front().radius2 * std::cos(alpha), i),
             a);
    }
  }
  for (const auto& s : st) {
    rings.push_back(static_cast<int>(mb.vertices.size()));
    station_rings.push_back(rings.back());
    for (int i = 0; i < resolution; ++i) mb.add(ring_point(s.axial, s.radius1, s.radius2, i), s.axial);
  }
  for (int m = 1; m <= cap_rings; ++m) {
    const double alpha = 0.5 * std::numbers::pi * m / (cap_rings + 1);
    const double a = st.back().axial + end_depth * std::sin(alpha);
    rings.push_back(static_cast<int>(mb.vertices.size()));
    for (int i = 0; i < resolution; ++i) {
      mb.add(ring_point(a, st.back().radius1 * std::cos(alpha),
                        st.back().radius2 * std::cos(alpha), i),
             a);
    }
  }
  const int end_pole = mb.add(tf.base + (st.back().axial + end_depth) * tf.axis,
                              st.back().axial + end_depth);

  for (int i = 0; i < resolution; ++i) {
    const int n = (i + 1) % resolution;
    mb.faces.emplace_back(start_pole, rings.front() + n, rings.front() + i);
    for (std::size_t r = 0; r + 1 < rings.size(); ++r) {
      const int a = rings[r] + i, b = rings[r] + n, c = rings[r + 1] + i, d = rings[r + 1] + n;
      mb.faces.emplace_back(a, b, d);
      mb.faces.emplace_back(a, d, c);
    }
    mb.faces.emplace_back(rings.back() + i, rings.back() + n, end_pole);
  }
  return station_rings;
}

TubeFrame make_frame(const Vec3& base, const Vec3& axis) {
  TubeFrame tf;
  tf.base = base;
  tf.axis = axis.normalized();
  tf.e1 = Vec3::UnitZ();
  tf.e2 = tf.axis.cross(tf.e1);
  return tf;
}

}  // namespace

HandModel make_synthetic_hand(const SyntheticHandConfig& cfg) {
  if (cfg.fingers < 0 || cfg.segments < 1 ||
      static_cast<int>(cfg.segment_lengths.size()) != cfg.segments ||
      static_cast<int>(cfg.radius_profile.size()) != cfg.segments || cfg.palm_resolution < 3 ||
      cfg.finger_resolution < 3 || cfg.rings_per_segment < 1) {
    fail(ErrorCode::InvalidArgument, "inconsistent synthetic hand configuration");
  }
  MeshBuilder mb;
  const int nj = 1 + cfg.fingers * cfg.segments;
  const int n_regressed = nj + cfg.fingers;

  struct RegressorRing {
    int row;
    int first;
    int count;
  };
  std::vector<RegressorRing> regressor_rings;

  // Palm: elliptic capsule along +y starting at the wrist (origin).
  const double rx = 0.5 * cfg.palm_width;
  const double rz = 0.5 * cfg.palm_thickness;
  std::vector<Station> palm;
  const int palm_stations = 5;
  for (int i = 0; i < palm_stations; ++i) {
    palm.push_back({cfg.palm_length * i / (palm_stations - 1), rz, rx});
  }
  const auto palm_rings =
      add_tube(mb, make_frame(Vec3::Zero(), Vec3::UnitY()), palm, cfg.palm_resolution, 3, rz, rz);
  regressor_rings.push_back({0, palm_rings.front(), cfg.palm_resolution});
  const int palm_vertex_end = static_cast<int>(mb.vertices.size());

  // Fingers.
  const bool has_thumb = cfg.fingers == 5;
  const int straight = has_thumb ? cfg.fingers - 1 : cfg.fingers;
  const double max_radius = *std::max_element(cfg.radius_profile.begin(), cfg.radius_profile.end());
  const double spread = std::max(0.0, rx - max_radius - 0.004);
  std::vector<double> cumulative(cfg.segments + 1, 0.0);
  for (int s = 0; s < cfg.segments; ++s) cumulative[s + 1] = cumulative[s] + cfg.segment_lengths[s];
  const double total_length = cumulative.back();

  struct FingerSpan {
    int begin;
    int end;
    TubeFrame frame;
  };
  std::vector<FingerSpan> spans;
  MatX3 joint_rest = MatX3::Zero(nj, 3);
  std::vector<int> parents(nj, -1);

  for (int f = 0; f < cfg.fingers; ++f) {
    TubeFrame tf;
    if (has_thumb && f == 0) {
      tf = make_frame(Vec3(rx - 0.012, 0.3 * cfg.palm_length, 0.0), Vec3(1.0, 1.0, 0.0));
    } else {
      const int slot = has_thumb ? f - 1 : f;
      const double x = straight == 1 ? 0.0 : spread - 2.0 * spread * slot / (straight - 1);
      tf = make_frame(Vec3(x, cfg.palm_length, 0.0), Vec3::UnitY());
    }
    std::vector<Station> st;
    for (int s = 0; s < cfg.segments; ++s) {
      const double r0 = cfg.radius_profile[s];
      const double r1 = s + 1 < cfg.segments ? cfg.radius_profile[s + 1] : r0;
      for (int m = 0; m < cfg.rings_per_segment; ++m) {
        const double frac = static_cast<double>(m) / cfg.rings_per_segment;
        const double r = r0 + (r1 - r0) * frac;
        st.push_back({cumulative[s] + frac * cfg.segment_lengths[s], r, r});
      }
    }
    const double tip_radius = cfg.radius_profile.back();
    st.push_back({total_length, tip_radius, tip_radius});

    const int begin = static_cast<int>(mb.vertices.size());
    const auto rings = add_tube(mb, tf, st, cfg.finger_resolution, 2, cfg.radius_profile.front(),
                                tip_radius);
    spans.push_back({begin, static_cast<int>(mb.vertices.size()), tf});
    for (int s = 0; s < cfg.segments; ++s) {
      const int j = 1 + f * cfg.segments + s;
      parents[j] = s == 0 ? 0 : j - 1;
      joint_rest.row(j) = (tf.base + cumulative[s] * tf.axis).transpose();
      regressor_rings.push_back({j, rings[s * cfg.rings_per_segment], cfg.finger_resolution});
    }
    regressor_rings.push_back({nj + f, rings.back(), cfg.finger_resolution});
  }

  const int nv = static_cast<int>(mb.vertices.size());
  HandModelData d;
  d.template_vertices.resize(nv, 3);
  for (int v = 0; v < nv; ++v) d.template_vertices.row(v) = mb.vertices[v].transpose();
  d.faces.resize(static_cast<Eigen::Index>(mb.faces.size()), 3);
  for (std::size_t i = 0; i < mb.faces.size(); ++i) d.faces.row(i) = mb.faces[i].transpose();
  d.parents = parents;
  d.joint_rest_positions = joint_rest;

  // Skinning: palm is rigid on the root; finger vertices blend their own
  // segments with a Gaussian falloff in axial distance to each bone.
  d.skinning_weights = MatX::Zero(nv, nj);
  for (int v = 0; v < palm_vertex_end; ++v) d.skinning_weights(v, 0) = 1.0;
  const double sigma =
      0.25 * *std::min_element(cfg.segment_lengths.begin(), cfg.segment_lengths.end());
  for (int f = 0; f < cfg.fingers; ++f) {
    for (int v = spans[f].begin; v < spans[f].end; ++v) {
      const double a = mb.axial[v];
      VecX w(cfg.segments);
      for (int s = 0; s < cfg.segments; ++s) {
        const double dist = std::max({0.0, cumulative[s] - a, a - cumulative[s + 1]});
        w[s] = std::exp(-(dist / sigma) * (dist / sigma));
      }
      w /= w.sum();
      for (int s = 0; s < cfg.segments; ++s) {
        if (w[s] < 1e-3) w[s] = 0.0;
      }
      w /= w.sum();
      for (int s = 0; s < cfg.segments; ++s) d.skinning_weights(v, 1 + f * cfg.segments + s) = w[s];
    }
  }

  // Shape basis: [scale about the wrist, finger stretch].
  d.shape_basis = MatX::Zero(3 * nv, 2);
  for (int v = 0; v < nv; ++v) d.shape_basis.block(3 * v, 0, 3, 1) = mb.vertices[v];
  for (int f = 0; f < cfg.fingers; ++f) {
    for (int v = spans[f].begin; v < spans[f].end; ++v) {
      const double a = std::clamp(mb.axial[v], 0.0, total_length);
      d.shape_basis.block(3 * v, 1, 3, 1) = a * spans[f].frame.axis;
    }
  }

  d.joint_regressor = MatX::Zero(n_regressed, nv);
  for (const auto& ring : regressor_rings) {
    for (int i = 0; i < ring.count; ++i) d.joint_regressor(ring.row, ring.first + i) = 1.0 / ring.count;
  }
  return HandModel(std::move(d));
}

}  // namespace toch
