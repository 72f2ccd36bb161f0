#pragma once

#include "toch/hand_model.hpp"
#include "toch/mesh.hpp"

#include <cstdint>
#include <filesystem>

namespace toch {

/// Synthetic hand settling onto a flat box: it descends at constant speed,
/// then rests about 1 mm above the top face while sliding at constant
/// velocity. The pose is fixed, so joint accelerations vanish except at the
/// frame where the descent stops.
struct DemoScene {
  HandModel model;
  TriMesh object;
  HandSequence gt;
};

DemoScene make_demo_scene(int frames = 30);

/// A second, larger box used as a transfer target.
TriMesh make_demo_target();

/// Writes hand_model.json, object.obj, target.obj, gt.json, perturbed.json
/// (Balanced noise with `seed`) and weights.json / weights.bin (random
/// weights with `seed`) into `dir`.
void write_demo(const std::filesystem::path& dir, int frames, std::uint64_t seed);

}  // namespace toch
