#pragma once

#include "toch/hand_model.hpp"

#include <filesystem>
#include <string>

namespace toch {

inline constexpr int kHandModelVersion = 1;

/// JSON document with template_vertices (K x 3), faces (F x 3),
/// skinning_weights (K x J), parents (J), joint_rest_positions (J x 3),
/// shape_basis (K x 3 x B), joint_regressor (J_out x K) and version.
std::string hand_model_to_json(const HandModel& model);
HandModel hand_model_from_json(const std::string& text, const std::string& source = "<string>");

void write_hand_model(const std::filesystem::path& path, const HandModel& model);
HandModel read_hand_model(const std::filesystem::path& path);

}  // namespace toch
