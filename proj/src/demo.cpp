#include "toch/demo.hpp"

#include "toch/error.hpp"
#include "toch/hand_model_io.hpp"
#include "toch/perturbation.hpp"
#include "toch/sequence_io.hpp"
#include "toch/synthetic_hand.hpp"
#include "toch/weights.hpp"

#include <algorithm>

namespace toch {

namespace {

constexpr int kDescentFrames = 12;
constexpr double kDescentSpeed = 0.0015;  // m per frame
constexpr double kSlideSpeed = 0.0003;    // m per frame, along x
constexpr double kRestGap = 0.001;

HandFrame demo_pose(const HandModel& model) {
  HandFrame f = HandFrame::zero(model);
  f.pose.row(0) << 0.04, -0.03, 0.12;
  const int fingers = (model.num_joints() - 1) / 3;
  for (int finger = 0; finger < fingers; ++finger) {
    for (int s = 0; s < 3; ++s) {
      const int j = 1 + 3 * finger + s;
      if (finger == 0) {
        f.pose.row(j) << 0.0, 0.0, 0.1;
      } else {
        f.pose.row(j) << 0.06 + 0.02 * s, 0.0, 0.02 * (finger - 2);
      }
    }
  }
  f.shape = VecX::Zero(model.num_shape());
  if (f.shape.size() > 0) f.shape[0] = 0.05;
  return f;
}

}  // namespace

DemoScene make_demo_scene(int frames) {
  if (frames < 1) fail(ErrorCode::InvalidArgument, "demo needs at least one frame");
  HandModel model = make_synthetic_hand();
  TriMesh object = make_box(Vec3(-0.10, -0.12, -0.02), Vec3(0.10, 0.12, 0.0));

  HandFrame base = demo_pose(model);
  base.trans = Vec3(-0.01, -0.08, 0.0);
  const MatX3 posed = PosedHand(model, base).vertices();
  const double lift = kRestGap - posed.col(2).minCoeff();

  HandSequence gt;
  gt.fps = 30.0;
  for (int i = 0; i < frames; ++i) {
    HandFrame f = base;
    const int remaining = std::max(0, kDescentFrames - i);
    f.trans.x() += kSlideSpeed * i;
    f.trans.z() += lift + kDescentSpeed * remaining;
    gt.frames.push_back(std::move(f));
  }
  return {std::move(model), std::move(object), std::move(gt)};
}

TriMesh make_demo_target() { return make_box(Vec3(-0.14, -0.16, -0.03), Vec3(0.14, 0.16, 0.0)); }

void write_demo(const std::filesystem::path& dir, int frames, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const DemoScene scene = make_demo_scene(frames);
  write_hand_model(dir / "hand_model.json", scene.model);
  write_obj(dir / "object.obj", scene.object);
  write_obj(dir / "target.obj", make_demo_target());

  SequenceBundle bundle;
  bundle.hand_model = "hand_model.json";
  bundle.object_mesh = "object.obj";
  bundle.sequence = scene.gt;
  write_bundle(dir / "gt.json", bundle);

  NoiseSpec noise;
  noise.seed = seed;
  bundle.sequence = perturb_sequence(scene.gt, noise);
  write_bundle(dir / "perturbed.json", bundle);

  WeightContainer::random(Hyperparameters{}, seed).save(dir / "weights.json");
}

}  // namespace toch
