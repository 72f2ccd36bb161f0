#include "toch/weights.hpp"

#include "toch/error.hpp"
#include "toch/rng.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace toch {

using nlohmann::json;

void Hyperparameters::validate() const {
  auto positive = [](int v) { return v > 0; };
  bool ok = input_features == 11 && !pointnet_widths.empty() && global_feature > 0 &&
            gru_hidden > 0 && !decoder_widths.empty() && latent == 2 * gru_hidden;
  for (int w : pointnet_widths) ok = ok && positive(w);
  for (int w : decoder_widths) ok = ok && positive(w);
  if (!ok) fail(ErrorCode::WeightMismatch, "inconsistent auto-encoder hyperparameters");
}

std::vector<TensorInfo> expected_tensors(const Hyperparameters& hp) {
  std::vector<TensorInfo> out;
  auto add = [&](std::string name, std::vector<int> shape) {
    out.push_back({std::move(name), std::move(shape), 0});
  };
  int in = hp.input_features;
  for (std::size_t k = 0; k < hp.pointnet_widths.size(); ++k) {
    const int w = hp.pointnet_widths[k];
    add("enc.block" + std::to_string(k) + ".weight", {w, in});
    add("enc.block" + std::to_string(k) + ".bias", {w});
    in = 2 * w;
  }
  add("enc.global.weight", {hp.global_feature, hp.pointnet_widths.back()});
  add("enc.global.bias", {hp.global_feature});
  const int h3 = 3 * hp.gru_hidden;
  for (const std::string suffix : {"l0", "l0_reverse"}) {
    add("gru.weight_ih_" + suffix, {h3, hp.global_feature});
    add("gru.weight_hh_" + suffix, {h3, hp.gru_hidden});
    add("gru.bias_ih_" + suffix, {h3});
    add("gru.bias_hh_" + suffix, {h3});
  }
  in = hp.latent + Hyperparameters::kPointGeometry;
  for (std::size_t k = 0; k < hp.decoder_widths.size(); ++k) {
    const int w = hp.decoder_widths[k];
    add("dec.layer" + std::to_string(k) + ".weight", {w, in});
    add("dec.layer" + std::to_string(k) + ".bias", {w});
    in = w;
  }
  add("dec.head.weight", {Hyperparameters::kOutputs, in});
  add("dec.head.bias", {Hyperparameters::kOutputs});
  std::uint64_t offset = 0;
  for (auto& t : out) {
    t.offset = offset;
    std::uint64_t count = 1;
    for (int s : t.shape) count *= static_cast<std::uint64_t>(s);
    offset += 4 * count;
  }
  return out;
}

namespace {

std::pair<int, int> matrix_dims(const std::vector<int>& shape) {
  return shape.size() == 1 ? std::pair{shape[0], 1} : std::pair{shape[0], shape[1]};
}

json hp_to_json(const Hyperparameters& hp) {
  return {{"input_features", hp.input_features}, {"pointnet_widths", hp.pointnet_widths},
          {"global_feature", hp.global_feature}, {"gru_hidden", hp.gru_hidden},
          {"decoder_widths", hp.decoder_widths}, {"latent", hp.latent}};
}

Hyperparameters hp_from_json(const json& j) {
  Hyperparameters hp;
  hp.input_features = j.at("input_features").get<int>();
  hp.pointnet_widths = j.at("pointnet_widths").get<std::vector<int>>();
  hp.global_feature = j.at("global_feature").get<int>();
  hp.gru_hidden = j.at("gru_hidden").get<int>();
  hp.decoder_widths = j.at("decoder_widths").get<std::vector<int>>();
  hp.latent = j.at("latent").get<int>();
  return hp;
}

}  // namespace

WeightContainer::WeightContainer(Hyperparameters hp, std::map<std::string, TensorF> tensors)
    : hp_(std::move(hp)), tensors_(std::move(tensors)) {
  hp_.validate();
  const auto expected = expected_tensors(hp_);
  if (expected.size() != tensors_.size()) {
    fail(ErrorCode::WeightMismatch, "expected " + std::to_string(expected.size()) +
                                        " tensors, got " + std::to_string(tensors_.size()));
  }
  for (const auto& info : expected) {
    auto it = tensors_.find(info.name);
    if (it == tensors_.end()) fail(ErrorCode::WeightMismatch, "missing tensor " + info.name);
    const auto [rows, cols] = matrix_dims(info.shape);
    if (it->second.rows() != rows || it->second.cols() != cols) {
      fail(ErrorCode::WeightMismatch, "tensor " + info.name + " has shape " +
                                          std::to_string(it->second.rows()) + "x" +
                                          std::to_string(it->second.cols()) + ", expected " +
                                          std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (!it->second.allFinite()) fail(ErrorCode::WeightMismatch, "tensor " + info.name + " is not finite");
  }
}

WeightContainer WeightContainer::random(const Hyperparameters& hp, std::uint64_t seed,
                                        double scale) {
  hp.validate();
  std::map<std::string, TensorF> tensors;
  CounterRng rng(seed);
  for (const auto& info : expected_tensors(hp)) {
    const auto [rows, cols] = matrix_dims(info.shape);
    // Biases share the fan-in of their weight matrix.
    int fan_in = cols;
    if (info.shape.size() == 1) {
      const std::string weight = info.name.substr(0, info.name.rfind('.')) + ".weight";
      auto w = tensors.find(weight);
      fan_in = w != tensors.end() ? static_cast<int>(w->second.cols()) : hp.gru_hidden;
    }
    const double bound = scale / std::sqrt(static_cast<double>(std::max(1, fan_in)));
    TensorF t(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) t(r, c) = static_cast<float>(bound * (2.0 * rng.uniform() - 1.0));
    }
    tensors.emplace(info.name, std::move(t));
  }
  return WeightContainer(hp, std::move(tensors));
}

WeightContainer WeightContainer::constant(const Hyperparameters& hp, float value) {
  hp.validate();
  std::map<std::string, TensorF> tensors;
  for (const auto& info : expected_tensors(hp)) {
    const auto [rows, cols] = matrix_dims(info.shape);
    tensors.emplace(info.name, TensorF::Constant(rows, cols, value));
  }
  return WeightContainer(hp, std::move(tensors));
}

const TensorF& WeightContainer::tensor(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) fail(ErrorCode::WeightMismatch, "missing tensor " + name);
  return it->second;
}

Eigen::VectorXf WeightContainer::vector(const std::string& name) const {
  const TensorF& t = tensor(name);
  return Eigen::Map<const Eigen::VectorXf>(t.data(), t.size());
}

void WeightContainer::save(const std::filesystem::path& manifest_path) const {
  static_assert(std::endian::native == std::endian::little);
  auto blob_path = manifest_path;
  blob_path.replace_extension(".bin");
  json tensors = json::array();
  std::ofstream blob(blob_path, std::ios::binary);
  if (!blob) fail(ErrorCode::Io, "cannot write " + blob_path.string());
  for (const auto& info : expected_tensors(hp_)) {
    const TensorF& t = tensor(info.name);
    blob.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(4 * t.size()));
    tensors.push_back({{"name", info.name}, {"shape", info.shape}, {"offset", info.offset}});
  }
  if (!blob) fail(ErrorCode::Io, "failed writing " + blob_path.string());
  json doc;
  doc["format_version"] = kWeightFormatVersion;
  doc["hyperparameters"] = hp_to_json(hp_);
  doc["tensors"] = std::move(tensors);
  doc["blob"] = blob_path.filename().string();
  std::ofstream out(manifest_path);
  if (!out) fail(ErrorCode::Io, "cannot write " + manifest_path.string());
  out << doc.dump(2);
  if (!out) fail(ErrorCode::Io, "failed writing " + manifest_path.string());
}

WeightContainer WeightContainer::load(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorCode::Io, "cannot open weight manifest " + manifest_path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, manifest_path.string() + ": " + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kWeightFormatVersion) {
      fail(ErrorCode::WeightMismatch, "unsupported weight format version");
    }
    const Hyperparameters hp = hp_from_json(doc.at("hyperparameters"));
    const auto blob_path = manifest_path.parent_path() / doc.at("blob").get<std::string>();
    std::ifstream blob_in(blob_path, std::ios::binary);
    if (!blob_in) fail(ErrorCode::Io, "cannot open weight blob " + blob_path.string());
    std::stringstream buffer;
    buffer << blob_in.rdbuf();
    const std::string blob = buffer.str();

    std::map<std::string, TensorF> tensors;
    std::set<std::string> seen;
    for (const auto& entry : doc.at("tensors")) {
      const auto name = entry.at("name").get<std::string>();
      if (!seen.insert(name).second) fail(ErrorCode::WeightMismatch, "duplicate tensor " + name);
      const auto shape = entry.at("shape").get<std::vector<int>>();
      const auto offset = entry.at("offset").get<std::uint64_t>();
      if (shape.empty() || shape.size() > 2) {
        fail(ErrorCode::WeightMismatch, "tensor " + name + " must be 1-D or 2-D");
      }
      const auto [rows, cols] = matrix_dims(shape);
      if (rows < 0 || cols < 0) fail(ErrorCode::WeightMismatch, "negative shape for " + name);
      const std::uint64_t bytes = 4ULL * static_cast<std::uint64_t>(rows) * cols;
      if (offset + bytes > blob.size()) {
        fail(ErrorCode::WeightMismatch, "tensor " + name + " extends past the blob end");
      }
      TensorF t(rows, cols);
      std::memcpy(t.data(), blob.data() + offset, bytes);
      tensors.emplace(name, std::move(t));
    }
    return WeightContainer(hp, std::move(tensors));
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, manifest_path.string() + ": " + e.what());
  }
}

}  // namespace toch
