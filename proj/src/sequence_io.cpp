#include "toch/sequence_io.hpp"

#include "toch/error.hpp"
#include "toch/hand_model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace toch {

using nlohmann::json;

std::string bundle_to_json(const SequenceBundle& bundle) {
  const HandSequence& seq = bundle.sequence;
  json doc;
  doc["hand_model"] = bundle.hand_model.generic_string();
  doc["object_mesh"] = bundle.object_mesh.generic_string();
  doc["coordinate_frame"] = bundle.coordinate_frame;
  doc["fps"] = seq.fps;
  json shape = json::array();
  if (seq.size() > 0) {
    for (Eigen::Index b = 0; b < seq.shape().size(); ++b) shape.push_back(seq.shape()[b]);
  }
  doc["shape"] = std::move(shape);
  json frames = json::array();
  for (const HandFrame& f : seq.frames) {
    json pose = json::array();
    for (Eigen::Index j = 0; j < f.pose.rows(); ++j) {
      for (int c = 0; c < 3; ++c) pose.push_back(f.pose(j, c));
    }
    frames.push_back({{"pose", std::move(pose)}, {"trans", {f.trans.x(), f.trans.y(), f.trans.z()}}});
  }
  doc["frames"] = std::move(frames);
  return doc.dump(1);
}

SequenceBundle bundle_from_json(const std::string& text, const std::string& source) {
  try {
    const json doc = json::parse(text);
    SequenceBundle b;
    b.hand_model = doc.at("hand_model").get<std::string>();
    b.object_mesh = doc.at("object_mesh").get<std::string>();
    b.coordinate_frame = doc.value("coordinate_frame", std::string(kObjectLocalFrame));
    if (b.coordinate_frame != kObjectLocalFrame) {
      fail(ErrorCode::Parse, "unsupported coordinate_frame '" + b.coordinate_frame + "'");
    }
    b.sequence.fps = doc.at("fps").get<double>();
    if (!(b.sequence.fps > 0.0)) fail(ErrorCode::Parse, "fps must be positive");
    const auto shape = doc.at("shape").get<std::vector<double>>();
    const VecX beta = Eigen::Map<const VecX>(shape.data(), static_cast<Eigen::Index>(shape.size()));
    const json& frames = doc.at("frames");
    if (!frames.is_array()) fail(ErrorCode::Parse, "frames must be an array");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto pose = frames[i].at("pose").get<std::vector<double>>();
      const auto trans = frames[i].at("trans").get<std::vector<double>>();
      if (pose.size() % 3 != 0) {
        fail(ErrorCode::Parse, "frame " + std::to_string(i) + ": pose length is not a multiple of 3");
      }
      if (trans.size() != 3) fail(ErrorCode::Parse, "frame " + std::to_string(i) + ": trans needs 3 values");
      HandFrame f;
      f.pose = Eigen::Map<const PoseMatrix>(pose.data(), static_cast<Eigen::Index>(pose.size() / 3), 3);
      f.trans = Vec3(trans[0], trans[1], trans[2]);
      f.shape = beta;
      b.sequence.frames.push_back(std::move(f));
    }
    return b;
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, source + ": " + e.what());
  } catch (const Error& e) {
    fail(e.code(), source + ": " + e.what());
  }
}

void write_bundle(const std::filesystem::path& path, const SequenceBundle& bundle) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << bundle_to_json(bundle) << '\n';
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

SequenceBundle read_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  SequenceBundle b = bundle_from_json(buffer.str(), path.string());
  const auto dir = std::filesystem::absolute(path).parent_path();
  if (b.hand_model.is_relative()) b.hand_model = dir / b.hand_model;
  if (b.object_mesh.is_relative()) b.object_mesh = dir / b.object_mesh;
  return b;
}

LoadedBundle load_bundle(const std::filesystem::path& path) {
  SequenceBundle b = read_bundle(path);
  HandModel model = read_hand_model(b.hand_model);
  TriMesh object = read_obj(b.object_mesh);
  if (b.sequence.size() == 0) fail(ErrorCode::InvalidArgument, path.string() + ": sequence has no frames");
  try {
    b.sequence.validate(model);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
  return {std::move(b), std::move(model), std::move(object)};
}

}  // namespace toch
