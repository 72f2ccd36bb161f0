#pragma once

#include "toch/hand_model.hpp"

#include <vector>

namespace toch {

/// Procedural stand-in for a parametric hand: an elliptic palm capsule with
/// one closed tube per finger. Every component is watertight.
struct SyntheticHandConfig {
  int fingers = 5;
  int segments = 3;
  double palm_length = 0.09;
  double palm_width = 0.08;
  double palm_thickness = 0.03;
  std::vector<double> segment_lengths{0.04, 0.026, 0.02};
  /// Tube radius at the start of each segment; the tip uses the last value.
  std::vector<double> radius_profile{0.009, 0.008, 0.007};
  int palm_resolution = 16;   // vertices per palm ring
  int finger_resolution = 10; // vertices per finger ring
  int rings_per_segment = 3;
};

/// J = 1 + fingers * segments joints (root at the wrist, origin). The
/// regressor emits the J kinematic joints followed by one fingertip per
/// finger. Shape basis: beta_0 scales about the wrist, beta_1 stretches the
/// fingers along their axes.
HandModel make_synthetic_hand(const SyntheticHandConfig& config = {});

}  // namespace toch
