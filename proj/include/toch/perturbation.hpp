#pragma once

#include "toch/hand_model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace toch {

enum class NoiseKind { TranslationDominant, PoseDominant, Balanced };

std::string_view to_string(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view name);

/// Tracking-noise protocol. TranslationDominant perturbs t_H only,
/// PoseDominant every axis-angle component (root included), Balanced both.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::Balanced;
  double sigma_trans = 0.01;  // meters, per component
  double sigma_pose = 0.3;    // radians, per axis-angle component
  std::uint64_t seed = 0;

  void validate() const;
};

/// I.i.d. zero-mean Gaussian noise per frame; shape untouched. Frame i draws
/// from CounterRng(seed, i): 3 translation samples then 3J pose samples (only
/// the ones the kind uses are drawn).
HandSequence perturb_sequence(const HandSequence& seq, const NoiseSpec& spec);

}  // namespace toch
