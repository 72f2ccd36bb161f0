#include "toch/perturbation.hpp"

#include "toch/error.hpp"
#include "toch/rng.hpp"
#include "toch/rotation.hpp"

namespace toch {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::TranslationDominant: return "translation";
    case NoiseKind::PoseDominant: return "pose";
    case NoiseKind::Balanced: return "balanced";
  }
  return "balanced";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  if (name == "translation" || name == "T") return NoiseKind::TranslationDominant;
  if (name == "pose" || name == "R") return NoiseKind::PoseDominant;
  if (name == "balanced" || name == "B") return NoiseKind::Balanced;
  return std::nullopt;
}

void NoiseSpec::validate() const {
  if (!(sigma_trans >= 0.0) || !(sigma_pose >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "noise sigmas must be non-negative");
  }
}

HandSequence perturb_sequence(const HandSequence& seq, const NoiseSpec& spec) {
  spec.validate();
  const bool noisy_trans = spec.kind != NoiseKind::PoseDominant && spec.sigma_trans > 0.0;
  const bool noisy_pose = spec.kind != NoiseKind::TranslationDominant && spec.sigma_pose > 0.0;
  HandSequence out = seq;
  for (int i = 0; i < out.size(); ++i) {
    HandFrame& f = out.frames[i];
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(i));
    if (noisy_trans) {
      for (int k = 0; k < 3; ++k) f.trans[k] += spec.sigma_trans * rng.normal();
    }
    if (noisy_pose) {
      for (Eigen::Index j = 0; j < f.pose.rows(); ++j) {
        Vec3 theta = f.pose.row(j).transpose();
        for (int k = 0; k < 3; ++k) theta[k] += spec.sigma_pose * rng.normal();
        f.pose.row(j) = canonical_axis_angle<double>(theta).transpose();
      }
    }
  }
  return out;
}

}  // namespace toch
