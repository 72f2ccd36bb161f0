#include "toch/mesh.hpp"

#include "toch/error.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <utility>

namespace toch {

TriMesh::TriMesh(MatX3 vertices, Faces faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int nv = num_vertices();
  face_normals_.resize(faces_.rows(), 3);
  if (!vertices_.allFinite()) fail(ErrorCode::InvalidMesh, "mesh has non-finite vertex coordinates");
  for (int f = 0; f < num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int idx = faces_(f, k);
      if (idx < 0 || idx >= nv) {
        fail(ErrorCode::InvalidMesh, "face " + std::to_string(f) + " references vertex " +
                                         std::to_string(idx) + " of " + std::to_string(nv));
      }
    }
    const Vec3 a = vertex(faces_(f, 0));
    const Vec3 n = (vertex(faces_(f, 1)) - a).cross(vertex(faces_(f, 2)) - a);
    const double area = 0.5 * n.norm();
    if (!(area > kMinFaceArea)) {
      fail(ErrorCode::InvalidMesh, "face " + std::to_string(f) + " is degenerate (area " +
                                       std::to_string(area) + ")");
    }
    face_normals_.row(f) = n.normalized().transpose();
  }

  std::map<std::pair<int, int>, int> directed;
  for (int f = 0; f < num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) ++directed[{faces_(f, k), faces_(f, (k + 1) % 3)}];
  }
  closed_ = !directed.empty();
  for (const auto& [edge, count] : directed) {
    auto it = directed.find({edge.second, edge.first});
    if (count != 1 || it == directed.end() || it->second != 1) {
      closed_ = false;
      break;
    }
  }
}

double TriMesh::face_area(int f) const {
  const Vec3 a = vertex(faces_(f, 0));
  return 0.5 * (vertex(faces_(f, 1)) - a).cross(vertex(faces_(f, 2)) - a).norm();
}

Vec3 TriMesh::point_on_face(int f, const Vec3& b) const {
  return b[0] * vertex(faces_(f, 0)) + b[1] * vertex(faces_(f, 1)) + b[2] * vertex(faces_(f, 2));
}

SurfacePoint TriMesh::surface_point(int f, const Vec3& barycentric) const {
  return {f, barycentric, point_on_face(f, barycentric)};
}

Aabb TriMesh::bounds() const {
  Aabb box;
  for (int i = 0; i < num_vertices(); ++i) box.extend(vertex(i));
  return box;
}

double TriMesh::signed_volume() const {
  double volume = 0.0;
  for (int f = 0; f < num_faces(); ++f) {
    volume += vertex(faces_(f, 0)).dot(vertex(faces_(f, 1)).cross(vertex(faces_(f, 2))));
  }
  return volume / 6.0;
}

TriMesh TriMesh::transformed(const RigidTransform& transform) const {
  MatX3 moved = (vertices_ * transform.rotation.transpose()).rowwise() +
                transform.translation.transpose();
  return with_vertices(std::move(moved));
}

TriMesh TriMesh::translated(const Vec3& offset) const {
  MatX3 moved = vertices_.rowwise() + offset.transpose();
  return with_vertices(std::move(moved));
}

TriMesh TriMesh::with_vertices(MatX3 vertices) const {
  if (vertices.rows() != vertices_.rows()) {
    fail(ErrorCode::InvalidMesh, "vertex count changed in with_vertices");
  }
  return TriMesh(std::move(vertices), faces_);
}

TriMesh mirror_mesh(const TriMesh& mesh) {
  MatX3 vertices = mesh.vertices();
  vertices.col(0) = -vertices.col(0);
  Faces faces = mesh.faces();
  faces.col(1).swap(faces.col(2));
  return TriMesh(std::move(vertices), std::move(faces));
}

TriMesh make_box(const Vec3& lo, const Vec3& hi) {
  MatX3 v(8, 3);
  for (int i = 0; i < 8; ++i) {
    v(i, 0) = (i & 1) ? hi.x() : lo.x();
    v(i, 1) = (i & 2) ? hi.y() : lo.y();
    v(i, 2) = (i & 4) ? hi.z() : lo.z();
  }
  Faces f(12, 3);
  f << 0, 2, 1, 1, 2, 3,  // z = lo
      4, 5, 6, 5, 7, 6,   // z = hi
      0, 1, 4, 1, 5, 4,   // y = lo
      2, 6, 3, 3, 6, 7,   // y = hi
      0, 4, 2, 2, 4, 6,   // x = lo
      1, 3, 5, 3, 7, 5;   // x = hi
  return TriMesh(std::move(v), std::move(f));
}

namespace {

int resolve_index(const std::string& token, int vertex_count, const std::string& where) {
  const std::string head = token.substr(0, token.find('/'));
  int idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoi(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    fail(ErrorCode::Parse, where + ": bad face index '" + token + "'");
  }
  if (idx > 0) return idx - 1;
  if (idx < 0) return vertex_count + idx;
  fail(ErrorCode::Parse, where + ": face index 0 is invalid");
}

}  // namespace

TriMesh parse_obj(const std::string& text, const std::string& source) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) fail(ErrorCode::Parse, where + ": malformed vertex");
      vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (tokens.size() != 3) {
        fail(ErrorCode::Parse, where + ": only triangles are supported (got " +
                                   std::to_string(tokens.size()) + " vertices)");
      }
      const int n = static_cast<int>(vertices.size());
      faces.emplace_back(resolve_index(tokens[0], n, where), resolve_index(tokens[1], n, where),
                         resolve_index(tokens[2], n, where));
    }
  }
  MatX3 v(vertices.size(), 3);
  for (std::size_t i = 0; i < vertices.size(); ++i) v.row(i) = vertices[i].transpose();
  Faces f(faces.size(), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) f.row(i) = faces[i].transpose();
  try {
    return TriMesh(std::move(v), std::move(f));
  } catch (const Error& e) {
    fail(e.code(), source + ": " + e.what());
  }
}

TriMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_obj(buffer.str(), path.string());
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << std::setprecision(17);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Vec3 p = mesh.vertex(i);
    out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    out << "f " << mesh.faces()(f, 0) + 1 << ' ' << mesh.faces()(f, 1) + 1 << ' '
        << mesh.faces()(f, 2) + 1 << '\n';
  }
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace toch
