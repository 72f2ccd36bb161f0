#include "toch/sampling.hpp"

#include "toch/error.hpp"
#include "toch/rng.hpp"

#include <algorithm>
#include <cmath>

namespace toch {

ObjectPointSet sample_surface(const TriMesh& mesh, int n, std::uint64_t seed) {
  if (mesh.empty()) fail(ErrorCode::InvalidMesh, "cannot sample an empty mesh");
  if (n < 1) fail(ErrorCode::InvalidArgument, "sample count must be >= 1");

  std::vector<double> cumulative(mesh.num_faces());
  double total = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }

  ObjectPointSet out;
  out.seed = seed;
  out.points.resize(n, 3);
  out.normals.resize(n, 3);
  out.faces.resize(n);
  CounterRng rng(seed);
  for (int i = 0; i < n; ++i) {
    const double target = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const int f = std::min<int>(static_cast<int>(it - cumulative.begin()), mesh.num_faces() - 1);
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Vec3 bary(1.0 - r1, r1 * (1.0 - r2), r1 * r2);
    out.points.row(i) = mesh.point_on_face(f, bary).transpose();
    out.normals.row(i) = mesh.face_normals().row(f);
    out.faces[i] = f;
  }
  return out;
}

}  // namespace toch
