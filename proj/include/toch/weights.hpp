#pragma once

#include "toch/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace toch {

inline constexpr int kWeightFormatVersion = 1;

/// Architecture of the temporal denoising auto-encoder. The manifest carries
/// these so the exporting and the inference side cannot drift apart.
struct Hyperparameters {
  int input_features = 11;                 // c, d, y(3), o(3), n(3)
  std::vector<int> pointnet_widths{64, 128};
  int global_feature = 256;
  int gru_hidden = 128;                    // per direction
  std::vector<int> decoder_widths{256, 128, 64};
  int latent = 256;                        // 2 * gru_hidden
  static constexpr int kOutputs = 5;       // c logit, d, y(3)
  static constexpr int kPointGeometry = 6; // o(3), n(3)

  void validate() const;
  bool operator==(const Hyperparameters&) const = default;
};

using TensorF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TensorInfo {
  std::string name;
  std::vector<int> shape;  // 1-D biases have one entry
  std::uint64_t offset = 0;  // bytes into the blob
};

/// Every tensor the architecture needs, in blob order, with its shape.
std::vector<TensorInfo> expected_tensors(const Hyperparameters& hp);

/// Named f32 tensors plus hyperparameters. On disk: a JSON manifest
/// (`format_version`, `hyperparameters`, `tensors` [{name, shape, offset}],
/// `blob`) next to a raw little-endian f32 blob.
class WeightContainer {
 public:
  WeightContainer(Hyperparameters hp, std::map<std::string, TensorF> tensors);

  /// Deterministic uniform(-scale/sqrt(fan_in), scale/sqrt(fan_in)) weights.
  static WeightContainer random(const Hyperparameters& hp, std::uint64_t seed, double scale = 1.0);
  static WeightContainer constant(const Hyperparameters& hp, float value);

  const Hyperparameters& hyperparameters() const { return hp_; }
  const TensorF& tensor(const std::string& name) const;
  /// Bias tensors as column vectors.
  Eigen::VectorXf vector(const std::string& name) const;
  const std::map<std::string, TensorF>& tensors() const { return tensors_; }

  void save(const std::filesystem::path& manifest_path) const;
  static WeightContainer load(const std::filesystem::path& manifest_path);

 private:
  Hyperparameters hp_;
  std::map<std::string, TensorF> tensors_;
};

}  // namespace toch
