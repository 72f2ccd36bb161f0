#include "toch/hand_model_io.hpp"

#include "toch/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace toch {

using nlohmann::json;

namespace {

json rows_to_json(const Eigen::Ref<const MatX>& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

MatX json_to_rows(const json& j, const char* field, Eigen::Index expected_cols = -1) {
  if (!j.is_array()) fail(ErrorCode::Parse, std::string(field) + " must be an array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = expected_cols;
  if (cols < 0) cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  MatX out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCode::ModelMismatch, std::string(field) + " row " + std::to_string(r) +
                                         " has the wrong length (expected " +
                                         std::to_string(cols) + ")");
    }
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = row[c].get<double>();
  }
  return out;
}

const json& require(const json& doc, const char* field) {
  if (!doc.contains(field)) fail(ErrorCode::Parse, std::string("missing field '") + field + "'");
  return doc.at(field);
}

}  // namespace

std::string hand_model_to_json(const HandModel& model) {
  const auto& d = model.data();
  json doc;
  doc["version"] = kHandModelVersion;
  doc["template_vertices"] = rows_to_json(d.template_vertices);
  json faces = json::array();
  for (Eigen::Index f = 0; f < d.faces.rows(); ++f) {
    faces.push_back({d.faces(f, 0), d.faces(f, 1), d.faces(f, 2)});
  }
  doc["faces"] = std::move(faces);
  doc["skinning_weights"] = rows_to_json(d.skinning_weights);
  doc["parents"] = d.parents;
  doc["joint_rest_positions"] = rows_to_json(d.joint_rest_positions);
  json basis = json::array();
  for (int k = 0; k < model.num_vertices(); ++k) {
    basis.push_back(rows_to_json(d.shape_basis.middleRows(3 * k, 3)));
  }
  doc["shape_basis"] = std::move(basis);
  doc["joint_regressor"] = rows_to_json(d.joint_regressor);
  return doc.dump();
}

HandModel hand_model_from_json(const std::string& text, const std::string& source) {
  try {
    const json doc = json::parse(text);
    const int version = require(doc, "version").get<int>();
    if (version != kHandModelVersion) {
      fail(ErrorCode::Parse, "unsupported hand model version " + std::to_string(version));
    }
    HandModelData d;
    d.template_vertices = json_to_rows(require(doc, "template_vertices"), "template_vertices", 3);
    const MatX faces = json_to_rows(require(doc, "faces"), "faces", 3);
    d.faces = faces.cast<int>();
    d.parents = require(doc, "parents").get<std::vector<int>>();
    const auto nj = static_cast<Eigen::Index>(d.parents.size());
    d.skinning_weights = json_to_rows(require(doc, "skinning_weights"), "skinning_weights", nj);
    d.joint_rest_positions =
        json_to_rows(require(doc, "joint_rest_positions"), "joint_rest_positions", 3);
    const json& basis = require(doc, "shape_basis");
    const Eigen::Index nv = d.template_vertices.rows();
    if (!basis.is_array() || static_cast<Eigen::Index>(basis.size()) != nv) {
      fail(ErrorCode::ModelMismatch, "shape_basis must have one 3 x B block per vertex");
    }
    const Eigen::Index nb = nv > 0 && !basis[0].empty() ? static_cast<Eigen::Index>(basis[0][0].size()) : 0;
    d.shape_basis.resize(3 * nv, nb);
    for (Eigen::Index k = 0; k < nv; ++k) {
      const MatX block = json_to_rows(basis[k], "shape_basis", nb);
      if (block.rows() != 3) fail(ErrorCode::ModelMismatch, "shape_basis block must have 3 rows");
      d.shape_basis.middleRows(3 * k, 3) = block;
    }
    d.joint_regressor = json_to_rows(require(doc, "joint_regressor"), "joint_regressor", nv);
    return HandModel(std::move(d));
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, source + ": " + e.what());
  } catch (const Error& e) {
    fail(e.code(), source + ": " + e.what());
  }
}

void write_hand_model(const std::filesystem::path& path, const HandModel& model) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << hand_model_to_json(model);
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

HandModel read_hand_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return hand_model_from_json(buffer.str(), path.string());
}

}  // namespace toch
