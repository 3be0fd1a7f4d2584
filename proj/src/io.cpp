#include "faberinv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "faberinv/error.hpp"

namespace faberinv::io {

namespace {

json complex_matrix(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

cplx complex_from(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw Error(ErrorKind::Input, "expected [re, im] in field '" + field + "'");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Eigen::MatrixXcd complex_matrix_from(const json& j, const std::string& field, int order) {
  if (!j.is_array() || static_cast<int>(j.size()) < order) {
    throw Error(ErrorKind::Input, "field '" + field + "' must be a " + std::to_string(order) + "x" + std::to_string(order) + " array");
  }
  Eigen::MatrixXcd m(order, order);
  for (int i = 0; i < order; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) < order) {
      throw Error(ErrorKind::Input, "field '" + field + "' row " + std::to_string(i + 1) + " is too short");
    }
    for (int k = 0; k < order; ++k) {
      m(i, k) = complex_from(j[i][k], field + "[" + std::to_string(i + 1) + "][" + std::to_string(k + 1) + "]");
    }
  }
  return m;
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Input, std::string("missing field '") + key + "'");
  return j.at(key);
}

double json_double(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorKind::Input, "field '" + field + "' must be a number");
}

json number_or_string(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Input, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json table_to_json(const GptTable& table, const std::string& hash) {
  json j;
  j["lambda"] = table.lambda;
  j["sigma0"] = table.sigma0 ? number_or_string(*table.sigma0) : json(nullptr);
  j["order"] = table.order;
  j["radius"] = table.radius;
  j["N1"] = complex_matrix(table.N1);
  j["N2"] = complex_matrix(table.N2);
  if (table.has_real()) {
    json idx = json::array();
    for (const auto& a : table.indices) idx.push_back({a.a1, a.a2});
    json vals = json::array();
    for (Eigen::Index r = 0; r < table.M.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < table.M.cols(); ++c) {
        row.push_back(std::isnan(table.M(r, c)) ? json(nullptr) : json(table.M(r, c)));
      }
      vals.push_back(std::move(row));
    }
    j["M"] = {{"indices", idx}, {"values", vals}};
  }
  j["meta"] = {{"config_hash", hash}};
  return j;
}

GptTable table_from_json(const json& j) {
  GptTable t;
  t.lambda = json_double(require(j, "lambda"), "lambda");
  if (!(std::abs(t.lambda) >= 0.5)) throw Error(ErrorKind::Input, "field 'lambda' must satisfy |lambda| >= 1/2");
  if (j.contains("sigma0") && !j["sigma0"].is_null()) t.sigma0 = json_double(j["sigma0"], "sigma0");
  const json& ord = require(j, "order");
  if (!ord.is_number_integer() || ord.get<int>() < 1) throw Error(ErrorKind::Input, "field 'order' must be a positive integer");
  t.order = ord.get<int>();
  t.N1 = complex_matrix_from(require(j, "N1"), "N1", t.order);
  t.N2 = complex_matrix_from(require(j, "N2"), "N2", t.order);
  t.radius = j.contains("radius") ? json_double(j["radius"], "radius") : 0.0;
  if (j.contains("M") && !j["M"].is_null()) {
    const json& m = j["M"];
    const json& idx = require(m, "indices");
    const json& vals = require(m, "values");
    for (const auto& a : idx) {
      if (!a.is_array() || a.size() != 2) throw Error(ErrorKind::Input, "field 'M.indices' must hold [a1, a2] pairs");
      t.indices.push_back({a[0].get<int>(), a[1].get<int>()});
    }
    const auto s = static_cast<Eigen::Index>(t.indices.size());
    if (!vals.is_array() || static_cast<Eigen::Index>(vals.size()) != s) throw Error(ErrorKind::Input, "field 'M.values' has the wrong size");
    t.M.resize(s, s);
    for (Eigen::Index r = 0; r < s; ++r) {
      if (!vals[r].is_array() || static_cast<Eigen::Index>(vals[r].size()) != s) {
        throw Error(ErrorKind::Input, "field 'M.values' has the wrong size");
      }
      for (Eigen::Index c = 0; c < s; ++c) {
        const json& v = vals[r][c];
        t.M(r, c) = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : json_double(v, "M.values");
      }
    }
  }
  return t;
}

BoundaryMesh ShapeSpec::mesh(std::optional<int> n_override) const {
  const int nn = n_override.value_or(n);
  if (map) return mesh_from_map(*map, nn);
  return mesh_from_parametric(kind, params, nn);
}

json map_to_json(const ConformalMap& map) {
  json coeffs = json::array();
  for (const cplx& c : map.coeffs()) coeffs.push_back({c.real(), c.imag()});
  return {{"type", "conformal"}, {"gamma", map.gamma()}, {"coeffs", coeffs}};
}

ShapeSpec shape_from_json(const json& j) {
  ShapeSpec s;
  const std::string type = require(j, "type").get<std::string>();
  if (j.contains("n")) s.n = require(j, "n").get<int>();
  if (type == "conformal") {
    const double gamma = json_double(require(j, "gamma"), "gamma");
    std::vector<cplx> coeffs;
    if (j.contains("coeffs")) {
      int k = 0;
      for (const auto& c : j["coeffs"]) coeffs.push_back(complex_from(c, "coeffs[" + std::to_string(k++) + "]"));
    }
    s.map = ConformalMap(gamma, std::move(coeffs));
    s.label = "conformal";
  } else if (type == "parametric") {
    s.kind = parse_shape_kind(require(j, "kind").get<std::string>());
    if (j.contains("params")) {
      for (const auto& [k, v] : j["params"].items()) s.params[k] = json_double(v, "params." + k);
    }
    s.label = to_string(s.kind);
  } else {
    throw Error(ErrorKind::Input, "field 'type' must be 'conformal' or 'parametric', got '" + type + "'");
  }
  if (s.n < 32 || s.n % 2 != 0) throw Error(ErrorKind::Input, "field 'n' must be even and >= 32");
  return s;
}

std::vector<std::string> builtin_shapes() { return {"disk", "ellipse", "kite", "perturbed_circle", "cap"}; }

ShapeSpec parse_shape(const std::string& text) {
  if (text == "disk") {
    ShapeSpec s;
    s.map = ConformalMap::identity(1.0);
    s.label = "disk";
    return s;
  }
  for (const auto& name : builtin_shapes()) {
    if (text == name) {
      ShapeSpec s;
      s.kind = parse_shape_kind(name);
      s.label = name;
      return s;
    }
  }
  std::string body = text;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw Error(ErrorKind::Input, "empty shape spec");
  if (text[first] != '{') body = read_file(text);
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Input, std::string("shape spec is not valid JSON: ") + e.what());
  }
  try {
    return shape_from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Input, std::string("malformed shape spec: ") + e.what());
  }
}

json shape_to_json(const ShapeSpec& spec) {
  if (spec.map) {
    json j = map_to_json(*spec.map);
    j["n"] = spec.n;
    return j;
  }
  json params = json::object();
  for (const auto& [k, v] : spec.params) params[k] = v;
  return {{"type", "parametric"}, {"kind", to_string(spec.kind)}, {"params", params}, {"n", spec.n}};
}

json ellipse_to_json(const EquivalentEllipse& e) {
  return {{"a", e.a},
          {"b", e.b},
          {"theta", e.theta},
          {"center", {e.center.real(), e.center.imag()}},
          {"p", e.p},
          {"q", e.q},
          {"lambda1", e.lambda1},
          {"lambda2", e.lambda2},
          {"e1", {e.e1[0], e.e1[1]}},
          {"e2", {e.e2[0], e.e2[1]}}};
}

json recovered_to_json(const RecoveredMap& r) {
  json j;
  j["map"] = map_to_json(r.map);
  j["sign"] = r.sign;
  j["lambda_used"] = 0.5 * r.sign;
  j["tail"] = r.tail;
  j["consistency"] = r.consistency;
  j["contrast_mismatch"] = r.contrast_mismatch;
  j["simple"] = r.simple;
  j["crossing"] = r.crossing ? json{r.crossing->t1, r.crossing->t2} : json(nullptr);
  j["fallback"] = r.fallback ? ellipse_to_json(*r.fallback) : json(nullptr);
  return j;
}

void write_mesh_csv(std::ostream& os, const BoundaryMesh& mesh, const std::string& hash) {
  os << "# config_hash=" << hash << "\n";
  if (mesh.source) {
    for (const auto& [k, v] : mesh.source->metadata) os << "# " << k << "=" << fmt(v) << "\n";
  }
  os << "theta,x,y,nx,ny,weight\n";
  for (int j = 0; j < mesh.size(); ++j) {
    os << fmt(mesh.theta[j]) << ',' << fmt(mesh.points[j].real()) << ',' << fmt(mesh.points[j].imag()) << ','
       << fmt(mesh.normals[j].real()) << ',' << fmt(mesh.normals[j].imag()) << ',' << fmt(mesh.weights[j]) << "\n";
  }
}

void write_density_csv(std::ostream& os, const BoundaryMesh& mesh, const Eigen::VectorXd& phi, const std::string& hash) {
  os << "# config_hash=" << hash << "\ntheta,phi\n";
  for (int j = 0; j < mesh.size(); ++j) os << fmt(mesh.theta[j]) << ',' << fmt(phi[j]) << "\n";
}

std::string svg_overlay(const BoundaryMesh& recovered, const BoundaryMesh* truth, const std::string& hash) {
  double xmin = recovered.points.real().minCoeff();
  double xmax = recovered.points.real().maxCoeff();
  double ymin = recovered.points.imag().minCoeff();
  double ymax = recovered.points.imag().maxCoeff();
  if (truth) {
    xmin = std::min(xmin, truth->points.real().minCoeff());
    xmax = std::max(xmax, truth->points.real().maxCoeff());
    ymin = std::min(ymin, truth->points.imag().minCoeff());
    ymax = std::max(ymax, truth->points.imag().maxCoeff());
  }
  const double pad = 0.1 * std::max(xmax - xmin, ymax - ymin);
  xmin -= pad;
  ymin -= pad;
  const double w = xmax - xmin + pad;
  const double h = ymax - ymin + pad;
  const double px = 400.0;
  const double s = px / std::max(w, h);

  auto path = [&](const BoundaryMesh& m) {
    std::ostringstream d;
    d << std::fixed << std::setprecision(3);
    for (int j = 0; j < m.size(); ++j) {
      // SVG y grows downwards.
      d << (j == 0 ? 'M' : 'L') << (m.points[j].real() - xmin) * s << ',' << (ymax + pad - m.points[j].imag()) * s << ' ';
    }
    d << 'Z';
    return d.str();
  };

  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * s << "\" height=\"" << h * s << "\" viewBox=\"0 0 "
     << w * s << ' ' << h * s << "\">\n";
  os << "<metadata>config_hash=" << hash << "</metadata>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (truth) os << "<path d=\"" << path(*truth) << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"3\"/>\n";
  os << "<path d=\"" << path(recovered) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  os << "</svg>\n";
  return os.str();
}

json log_record_to_json(const LogRecord& r) {
  return {{"iter", r.iter}, {"cost", r.cost}, {"step", r.step}, {"rank", r.rank}, {"flags", r.flags}};
}

}  // namespace faberinv::io
