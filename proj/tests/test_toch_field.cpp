#include "fixtures.hpp"
#include "oracles.hpp"

#include "toch/demo.hpp"
#include "toch/error.hpp"
#include "toch/sampling.hpp"
#include "toch/toch_field.hpp"
#include "toch/toch_io.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

using namespace toch;

namespace {

PointSetPtr points_of(const TriMesh& object, int n, std::uint64_t seed) {
  return std::make_shared<const ObjectPointSet>(sample_surface(object, n, seed));
}

// Thin plate hand hovering h above the object top face z = 0.
TriMesh plate(double h) { return make_box(Vec3(-0.05, -0.05, h), Vec3(0.05, 0.05, h + 0.01)); }

const TriMesh& flat_object() {
  static const TriMesh box = make_box(Vec3(-0.2, -0.2, -0.05), Vec3(0.2, 0.2, 0.0));
  return box;
}

}  // namespace

TEST_CASE("plate above a flat patch") {
  const double h = 0.0123;
  const TriMesh hand = plate(h);
  const Bvh hand_bvh(hand), object(flat_object());
  const PointSetPtr pts = points_of(flat_object(), 3000, 1);
  const FieldExtraction fx = extract_field_detailed(hand_bvh, hand, object, pts);
  int interior = 0;
  for (int i = 0; i < pts->size(); ++i) {
    const Vec3 o = pts->point(i);
    const bool top = pts->normal(i).z() > 0.5;
    const bool under = std::abs(o.x()) < 0.049 && std::abs(o.y()) < 0.049;
    if (top && under) {
      ++interior;
      CHECK(fx.frame.c[i] == 1);
      CHECK(std::abs(fx.frame.d[i] - h) < 1e-12);
    } else if (!top) {
      CHECK(fx.frame.c[i] == 0);
    }
    if (fx.frame.c[i] == 0) {
      CHECK(fx.frame.d[i] == 0.0);
      CHECK(fx.frame.y.row(i).isZero(0.0));
    }
  }
  CHECK(interior > 50);
}

TEST_CASE("hand behind the object") {
  // off a corner of the box, where no face's normal ray can reach
  const TriMesh hand = make_box(Vec3(0.3, 0.3, 0.1), Vec3(0.4, 0.4, 0.2));
  const TochFrame f = extract_field(hand, hand, Bvh(flat_object()), points_of(flat_object(), 500, 2));
  CHECK(f.correspondence_count() == 0);
}

TEST_CASE("penetration gives negative distance") {
  // plate sunk 4 mm into the object
  const TriMesh hand = make_box(Vec3(-0.05, -0.05, -0.004), Vec3(0.05, 0.05, 0.006));
  const Bvh hand_bvh(hand);
  const PointSetPtr pts = points_of(flat_object(), 3000, 3);
  const TochFrame f = extract_field(hand, hand, Bvh(flat_object()), pts);
  int inside = 0;
  for (int i = 0; i < pts->size(); ++i) {
    if (!hand_bvh.contains(pts->point(i))) {
      if (f.c[i]) CHECK(f.d[i] >= 0.0);
      continue;
    }
    ++inside;
    CHECK(f.c[i] == 1);
    CHECK(f.d[i] < 0.0);
    CHECK(std::abs(f.d[i] + 0.004) < 1e-12);
  }
  CHECK(inside > 20);
}

TEST_CASE("self-occlusion on a concave object") {
  // U-shaped object: two walls rising from a base. A hand above the right
  // wall; points on the inner face of the left wall look toward the hand but
  // the right wall is in between.
  const TriMesh base = make_box(Vec3(-0.1, -0.05, -0.02), Vec3(0.1, 0.05, 0.0));
  const TriMesh left = make_box(Vec3(-0.1, -0.05, 0.0), Vec3(-0.08, 0.05, 0.1));
  const TriMesh right = make_box(Vec3(0.08, -0.05, 0.0), Vec3(0.1, 0.05, 0.1));
  MatX3 v(base.num_vertices() * 3, 3);
  Faces fc(base.num_faces() * 3, 3);
  int vo = 0, fo = 0;
  for (const TriMesh* m : {&base, &left, &right}) {
    v.middleRows(vo, m->num_vertices()) = m->vertices();
    fc.middleRows(fo, m->num_faces()) = m->faces().array() + vo;
    vo += m->num_vertices();
    fo += m->num_faces();
  }
  const TriMesh object(v, fc);
  // hand to the right of the right wall, facing the inner side of the left wall
  const TriMesh hand = make_box(Vec3(0.12, -0.03, 0.02), Vec3(0.14, 0.03, 0.08));
  const PointSetPtr pts = points_of(object, 4000, 4);
  const TochFrame f = extract_field(hand, hand, Bvh(object), pts);
  int occluded = 0, visible = 0;
  for (int i = 0; i < pts->size(); ++i) {
    const Vec3 o = pts->point(i), n = pts->normal(i);
    const bool inner_left = std::abs(o.x() + 0.08) < 1e-12 && n.x() > 0.5 && o.y() > -0.03 &&
                            o.y() < 0.03 && o.z() > 0.02 && o.z() < 0.08;
    const bool outer_right = std::abs(o.x() - 0.1) < 1e-12 && n.x() > 0.5 && o.y() > -0.03 &&
                             o.y() < 0.03 && o.z() > 0.02 && o.z() < 0.08;
    if (inner_left) {
      ++occluded;
      CHECK(f.c[i] == 0);
    }
    if (outer_right) {
      ++visible;
      CHECK(f.c[i] == 1);
      CHECK(std::abs(f.d[i] - 0.02) < 1e-12);
    }
  }
  CHECK(occluded > 5);
  CHECK(visible > 5);
}

TEST_CASE("decode reproduces the hand hits") {
  const DemoScene scene = make_demo_scene(8);
  const PointSetPtr pts = points_of(scene.object, 2000, 5);
  const Bvh object(scene.object);
  const Bvh canon_bvh(scene.model.canonical_mesh());
  CounterRng rng(51, 0);
  for (int i = 0; i < scene.gt.size(); ++i) {
    const TriMesh posed = skin(scene.model, scene.gt.frames[i]);
    const FieldExtraction fx = extract_field_detailed(Bvh(posed), scene.model.canonical_mesh(), object, pts);
    const DecodedCloud cloud = decode_field(fx.frame);
    REQUIRE(cloud.size() == fx.frame.correspondence_count());
    REQUIRE(cloud.size() > 0);
    for (int r = 0; r < cloud.size(); ++r) {
      const int p = cloud.index[r];
      const Vec3 hit = posed.point_on_face(fx.hand_hits[p].face, fx.hand_hits[p].barycentric);
      CHECK((cloud.targets.row(r).transpose() - hit).norm() < 1e-9);
      // y lies on the template surface
      CHECK(oracle::closest_distance(scene.model.canonical_mesh(), cloud.canonical.row(r).transpose()) < 1e-6);
      if (r > 20) break;
    }
  }
  const TochFrame none = TochFrame::empty(pts);
  CHECK(decode_field(none).size() == 0);

  TochFrame touching = TochFrame::empty(pts);
  touching.c[3] = 1;
  touching.y.row(3) << 0.1, 0.2, 0.3;
  const DecodedCloud one = decode_field(touching);
  REQUIRE(one.size() == 1);
  CHECK(one.targets.row(0).transpose() == pts->point(3));
  CHECK(one.canonical.row(0) == touching.y.row(3));
}

TEST_CASE("contact map") {
  const PointSetPtr pts = points_of(flat_object(), 10, 6);
  TochFrame f = TochFrame::empty(pts);
  for (int i = 0; i < 4; ++i) {
    f.c[i] = 1;
    f.d[i] = i % 2 ? 0.001 : -0.001;
  }
  f.c[5] = 1;
  f.d[5] = 0.01;
  const auto cm = contact_map(f, 0.002);
  for (int i = 0; i < 4; ++i) CHECK(cm[i] == 1);
  CHECK(cm[4] == 0);
  CHECK(cm[5] == 0);
  CHECK(contact_map(f)[5] == 0);
}

TEST_CASE("contact map agrees with the hand-object distance") {
  const DemoScene scene = make_demo_scene(30);
  const PointSetPtr pts = points_of(scene.object, 2000, 7);
  const HandFrame& resting = scene.gt.frames.back();
  const TriMesh posed = skin(scene.model, resting);
  const TochFrame f = extract_field(posed, scene.model.canonical_mesh(), Bvh(scene.object), pts);
  const auto cm = contact_map(f, kDefaultContactTau);
  int contacts = 0;
  for (int i = 0; i < pts->size(); ++i) {
    if (!cm[i]) continue;
    ++contacts;
    CHECK(oracle::closest_distance(posed, pts->point(i)) <= kDefaultContactTau + 1e-12);
  }
  CHECK(contacts > 0);
}

TEST_CASE("sequence extraction") {
  const DemoScene scene = make_demo_scene(4);
  ExtractionOptions opt;
  CHECK(opt.n_points == 2000);
  opt.seed = 9;
  const TochSequence seq = extract_sequence(scene.model, scene.gt, scene.object, opt);
  seq.validate();
  CHECK(seq.point_count() == 2000);
  const TochFrame single = extract_field(skin(scene.model, scene.gt.frames[2]),
                                         scene.model.canonical_mesh(), Bvh(scene.object), seq.points);
  CHECK(single.c == seq.frames[2].c);
  CHECK(single.d == seq.frames[2].d);
  CHECK(single.y == seq.frames[2].y);

  HandSequence one;
  one.frames = {scene.gt.frames[2]};
  const TochSequence t1 = extract_sequence(scene.model, one, scene.object, opt);
  CHECK(t1.frames[0].c == single.c);
  CHECK(t1.frames[0].d == single.d);

  opt.threads = 3;
  const TochSequence threaded = extract_sequence(scene.model, scene.gt, scene.object, opt);
  CHECK(encode_toch(threaded) == encode_toch(seq));

  try {
    extract_field(skin(scene.model, scene.gt.frames[0]), scene.model.canonical_mesh(),
                  Bvh(scene.object), seq.points, 0.0);
    FAIL("eps = 0 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidEpsilon);
  }
}

TEST_CASE("rigid invariance") {
  const DemoScene scene = make_demo_scene(30);
  const PointSetPtr pts = points_of(scene.object, 2000, 10);
  const Bvh object(scene.object);
  CounterRng rng(52, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const HandFrame& frame = scene.gt.frames[static_cast<int>(rng.uniform() * scene.gt.size())];
    const TriMesh posed = skin(scene.model, frame);
    const TochFrame base = extract_field(posed, scene.model.canonical_mesh(), object, pts);
    const RigidTransform tr = fixture::random_rigid(rng);
    auto moved_pts = std::make_shared<ObjectPointSet>(*pts);
    for (int i = 0; i < pts->size(); ++i) {
      moved_pts->points.row(i) = tr.apply(pts->point(i)).transpose();
      moved_pts->normals.row(i) = (tr.rotation * pts->normal(i)).transpose();
    }
    const TochFrame moved = extract_field(posed.transformed(tr), scene.model.canonical_mesh(),
                                          Bvh(scene.object.transformed(tr)), moved_pts);
    CHECK(moved.c == base.c);
    CHECK((moved.d - base.d).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((moved.y - base.y).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("toch file round trip") {
  const DemoScene scene = make_demo_scene(5);
  ExtractionOptions opt;
  opt.n_points = 300;
  opt.seed = 77;
  const TochSequence seq = extract_sequence(scene.model, scene.gt, scene.object, opt);
  const auto path = std::filesystem::temp_directory_path() / "toch_field_roundtrip.toch";
  write_toch(path, seq);
  const TochSequence back = read_toch(path);
  CHECK(back.size() == 5);
  CHECK(back.points->seed == 77);
  CHECK(encode_toch(back) == encode_toch(seq));
  // f32 storage
  for (int t = 0; t < seq.size(); ++t) {
    CHECK(back.frames[t].c == seq.frames[t].c);
    for (int i = 0; i < seq.point_count(); ++i) {
      CHECK(back.frames[t].d[i] == static_cast<double>(static_cast<float>(seq.frames[t].d[i])));
    }
  }
  std::string bytes = encode_toch(seq);
  // independent header parse
  REQUIRE(bytes.size() == 24 + 5 * 300 * 17 + 300 * 24);
  CHECK(bytes.substr(0, 4) == "TOCH");
  std::uint32_t version, t_count, n_count;
  std::uint64_t seed;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&t_count, bytes.data() + 8, 4);
  std::memcpy(&n_count, bytes.data() + 12, 4);
  std::memcpy(&seed, bytes.data() + 16, 8);
  CHECK(version == 1);
  CHECK(t_count == 5);
  CHECK(n_count == 300);
  CHECK(seed == 77);
  float d0;
  std::memcpy(&d0, bytes.data() + 25, 4);
  CHECK(d0 == static_cast<float>(seq.frames[0].d[0]));

  for (const std::string& broken : {bytes.substr(0, bytes.size() - 1), bytes + "x",
                                    std::string("TOCX") + bytes.substr(4), bytes.substr(0, 10)}) {
    try {
      decode_toch(broken);
      FAIL("corrupt file accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
    }
  }
  CHECK_THROWS_AS(read_toch("/nonexistent/field.toch"), Error);
}

TEST_CASE("golden field file") {
  // demo scene, 3 frames, 64 points, seed 2024, default eps
  const TochSequence golden = read_toch(std::filesystem::path(TOCH_TEST_DATA) / "demo_3x64.toch");
  const DemoScene scene = make_demo_scene(3);
  ExtractionOptions opt;
  opt.n_points = 64;
  opt.seed = 2024;
  const TochSequence fresh = extract_sequence(scene.model, scene.gt, scene.object, opt);
  CHECK(encode_toch(fresh) == encode_toch(golden));
  int total = 0;
  for (const auto& f : golden.frames) total += f.correspondence_count();
  CHECK(total > 0);
}
