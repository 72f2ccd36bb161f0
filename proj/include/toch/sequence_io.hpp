#pragma once

#include "toch/hand_model.hpp"

#include <filesystem>
#include <string>

namespace toch {

inline constexpr const char* kObjectLocalFrame = "object-local";

/// A tracked hand sequence expressed in the object's local frame, with the
/// hand model and object mesh it refers to. Relative paths are resolved
/// against the directory of the bundle file.
struct SequenceBundle {
  std::filesystem::path hand_model;
  std::filesystem::path object_mesh;
  HandSequence sequence;
  std::string coordinate_frame = kObjectLocalFrame;
};

/// JSON: {hand_model, object_mesh, coordinate_frame, fps, shape,
/// frames: [{pose: [J*3], trans: [3]}]}.
std::string bundle_to_json(const SequenceBundle& bundle);
SequenceBundle bundle_from_json(const std::string& text, const std::string& source = "<string>");

void write_bundle(const std::filesystem::path& path, const SequenceBundle& bundle);
/// Reads and makes hand_model / object_mesh absolute (relative to the file).
SequenceBundle read_bundle(const std::filesystem::path& path);

/// Reads the referenced model and mesh; throws if they are missing, fail to
/// parse, or disagree with the sequence (frame count 0 included).
struct LoadedBundle {
  SequenceBundle bundle;
  HandModel model;
  TriMesh object;
};
LoadedBundle load_bundle(const std::filesystem::path& path);

}  // namespace toch
