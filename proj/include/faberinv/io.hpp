#pragma once

// File formats shared by the CLI and the tests: GPT table JSON, shape specs,
// mesh CSV, SVG overlays and the descent run log.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "faberinv/conformal.hpp"
#include "faberinv/gpt.hpp"
#include "faberinv/inversion.hpp"
#include "faberinv/mesh.hpp"
#include "faberinv/optim.hpp"

namespace faberinv::io {

using nlohmann::json;

/// FNV-1a 64-bit, as 16 lowercase hex digits.
std::string config_hash(const std::string& canonical);

json table_to_json(const GptTable& table, const std::string& hash);
/// Throws Input naming the missing or malformed field.
GptTable table_from_json(const json& j);

/// A shape is either a conformal map or a built-in parametric curve.
struct ShapeSpec {
  std::optional<ConformalMap> map;
  ShapeKind kind = ShapeKind::Ellipse;
  ShapeParams params;
  int n = 256;
  std::string label;

  BoundaryMesh mesh(std::optional<int> n_override = std::nullopt) const;
};

ShapeSpec shape_from_json(const json& j);
/// Built-in name ("disk", "ellipse", "kite", "perturbed_circle", "cap"), inline JSON, or a path to a JSON file.
ShapeSpec parse_shape(const std::string& text);
std::vector<std::string> builtin_shapes();
json shape_to_json(const ShapeSpec& spec);
json map_to_json(const ConformalMap& map);

json recovered_to_json(const RecoveredMap& r);
json ellipse_to_json(const EquivalentEllipse& e);

void write_mesh_csv(std::ostream& os, const BoundaryMesh& mesh, const std::string& hash);
void write_density_csv(std::ostream& os, const BoundaryMesh& mesh, const Eigen::VectorXd& phi, const std::string& hash);

/// Recovered curve in black over an optional truth curve in gray.
std::string svg_overlay(const BoundaryMesh& recovered, const BoundaryMesh* truth, const std::string& hash);

json log_record_to_json(const LogRecord& r);

/// Formats a double with 17 significant digits (round-trip exact).
std::string fmt(double x);

/// Reads a whole file; throws Input when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace faberinv::io
