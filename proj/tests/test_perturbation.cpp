#include "toch/demo.hpp"
#include "toch/error.hpp"
#include "toch/perturbation.hpp"
#include "toch/synthetic_hand.hpp"

#include <doctest.h>

#include <cmath>

using namespace toch;

namespace {

HandSequence static_sequence(const HandModel& model, int frames) {
  HandSequence seq;
  HandFrame f = HandFrame::zero(model);
  f.pose.row(3) << 0.2, -0.1, 0.05;
  f.trans << 0.01, 0.02, 0.03;
  seq.frames.assign(frames, f);
  return seq;
}

}  // namespace

TEST_CASE("zero sigma leaves the sequence untouched") {
  const DemoScene scene = make_demo_scene(10);
  for (NoiseKind kind : {NoiseKind::TranslationDominant, NoiseKind::PoseDominant, NoiseKind::Balanced}) {
    NoiseSpec spec;
    spec.kind = kind;
    spec.sigma_trans = 0.0;
    spec.sigma_pose = 0.0;
    const HandSequence out = perturb_sequence(scene.gt, spec);
    for (int i = 0; i < out.size(); ++i) {
      CHECK(out.frames[i].pose == scene.gt.frames[i].pose);
      CHECK(out.frames[i].trans == scene.gt.frames[i].trans);
      CHECK(out.frames[i].shape == scene.gt.frames[i].shape);
    }
  }
}

TEST_CASE("kinds touch only their parameters") {
  const HandModel model = make_synthetic_hand();
  const HandSequence seq = static_sequence(model, 20);
  NoiseSpec spec;
  spec.seed = 3;
  spec.kind = NoiseKind::TranslationDominant;
  HandSequence t = perturb_sequence(seq, spec);
  spec.kind = NoiseKind::PoseDominant;
  HandSequence r = perturb_sequence(seq, spec);
  spec.kind = NoiseKind::Balanced;
  HandSequence b = perturb_sequence(seq, spec);
  for (int i = 0; i < seq.size(); ++i) {
    CHECK(t.frames[i].pose == seq.frames[i].pose);
    CHECK(t.frames[i].trans != seq.frames[i].trans);
    CHECK(r.frames[i].trans == seq.frames[i].trans);
    CHECK(r.frames[i].pose != seq.frames[i].pose);
    // balanced draws translation first, then pose, from the same stream
    CHECK(b.frames[i].trans == t.frames[i].trans);
    CHECK(b.frames[i].shape == seq.frames[i].shape);
  }
}

TEST_CASE("determinism and seeds") {
  const HandModel model = make_synthetic_hand();
  const HandSequence seq = static_sequence(model, 8);
  NoiseSpec spec;
  spec.seed = 11;
  const HandSequence a = perturb_sequence(seq, spec), b = perturb_sequence(seq, spec);
  spec.seed = 12;
  const HandSequence c = perturb_sequence(seq, spec);
  for (int i = 0; i < seq.size(); ++i) {
    CHECK(a.frames[i].pose == b.frames[i].pose);
    CHECK(a.frames[i].trans == b.frames[i].trans);
    CHECK(a.frames[i].trans != c.frames[i].trans);
  }
  // frames are independent streams: a prefix perturbs identically
  HandSequence prefix = seq;
  prefix.frames.resize(3);
  spec.seed = 11;
  const HandSequence p = perturb_sequence(prefix, spec);
  for (int i = 0; i < 3; ++i) CHECK(p.frames[i].trans == a.frames[i].trans);
}

TEST_CASE("noise is zero mean with the requested spread") {
  const HandModel model = make_synthetic_hand();
  const int n = 20000;
  const HandSequence seq = static_sequence(model, n);
  NoiseSpec spec;
  spec.seed = 5;
  spec.sigma_trans = 0.01;
  spec.sigma_pose = 0.1;
  const HandSequence out = perturb_sequence(seq, spec);
  Vec3 mean_t = Vec3::Zero(), var_t = Vec3::Zero();
  Vec3 mean_r = Vec3::Zero();
  for (const auto& f : out.frames) {
    const Vec3 dt = f.trans - seq.frames[0].trans;
    mean_t += dt / n;
    var_t += dt.cwiseProduct(dt) / n;
    mean_r += (f.pose.row(3) - seq.frames[0].pose.row(3)).transpose() / n;
  }
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(mean_t[k]) < 4.0 * spec.sigma_trans / std::sqrt(n));
    CHECK(std::abs(mean_r[k]) < 4.0 * spec.sigma_pose / std::sqrt(n));
    CHECK(std::abs(std::sqrt(var_t[k]) - spec.sigma_trans) < 0.03 * spec.sigma_trans);
  }
}

TEST_CASE("names and validation") {
  CHECK(parse_noise_kind("translation") == NoiseKind::TranslationDominant);
  CHECK(parse_noise_kind("R") == NoiseKind::PoseDominant);
  CHECK(parse_noise_kind("balanced") == NoiseKind::Balanced);
  CHECK_FALSE(parse_noise_kind("gaussian").has_value());
  CHECK(to_string(NoiseKind::PoseDominant) == "pose");
  NoiseSpec bad;
  bad.sigma_trans = -0.1;
  CHECK_THROWS_AS(bad.validate(), Error);
}
