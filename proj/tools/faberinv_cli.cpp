// faberinv: forward GPT computation, exact inversion, descent reconstruction.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "faberinv/error.hpp"
#include "faberinv/gpt.hpp"
#include "faberinv/inversion.hpp"
#include "faberinv/io.hpp"
#include "faberinv/layerpot.hpp"
#include "faberinv/optim.hpp"

namespace fs = std::filesystem;
using namespace faberinv;
using io::json;

namespace {

struct RunConfig {
  std::string command;
  std::string shape;
  std::string sigma0;
  int order = 0;
  int mesh_n = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string init;
  int max_iter = 50;
  std::string out_dir = ".";
  bool svg = false;
  std::string gpt;
  std::string truth;
  int field_samples = 0;
  bool dump_density = false;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::DataInconsistency:
    case ErrorKind::Compatibility:
      return 3;
    case ErrorKind::Resolution:
    case ErrorKind::Numerical:
      return 4;
    default:
      return 2;
  }
}

std::optional<double> parse_sigma0(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "inf" || s == "Inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Input, "--sigma0 must be a number or 'inf', got '" + s + "'");
  }
}

// Everything that influences the outputs except the output directory.
std::string canonical(const RunConfig& c) {
  std::ostringstream os;
  os << "command=" << c.command << ";shape=" << c.shape << ";sigma0=" << c.sigma0 << ";order=" << c.order
     << ";mesh_n=" << c.mesh_n << ";noise=" << io::fmt(c.noise) << ";seed=" << c.seed << ";init=" << c.init
     << ";max_iter=" << c.max_iter << ";svg=" << c.svg << ";truth=" << c.truth << ";field_samples=" << c.field_samples
     << ";dump_density=" << c.dump_density;
  if (!c.gpt.empty()) os << ";gpt=" << io::config_hash(io::read_file(c.gpt));
  for (const std::string* p : {&c.shape, &c.truth}) {
    if (!p->empty() && fs::exists(*p)) os << ";file:" << io::config_hash(io::read_file(*p));
  }
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Input, "cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

GptTable load_table(const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::Input, "--gpt is required");
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Input, "GPT file is not valid JSON: " + std::string(e.what()));
  }
  try {
    return io::table_from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Input, "malformed GPT file: " + std::string(e.what()));
  }
}

double resolve_sigma0(const RunConfig& c, const GptTable& table) {
  if (auto s = parse_sigma0(c.sigma0)) return *s;
  if (table.sigma0) return *table.sigma0;
  return Contrast::from_lambda(table.lambda).sigma0();
}

json shape_meta(const BoundaryMesh& mesh, const std::string& hash) {
  json meta = {{"config_hash", hash}};
  if (mesh.source) {
    for (const auto& [k, v] : mesh.source->metadata) meta[k] = v;
  }
  return meta;
}

int cmd_forward(const RunConfig& c, const std::string& hash) {
  if (c.shape.empty()) throw Error(ErrorKind::Input, "--shape is required");
  const auto s0 = parse_sigma0(c.sigma0);
  if (!s0) throw Error(ErrorKind::Input, "--sigma0 is required");
  const Contrast contrast = Contrast::from_sigma0(*s0);
  if (!(c.noise >= 0.0 && c.noise < 1.0)) throw Error(ErrorKind::Input, "--noise must lie in [0, 1)");
  const io::ShapeSpec spec = io::parse_shape(c.shape);
  const int n = c.mesh_n > 0 ? c.mesh_n : spec.n;
  const int order = c.order > 0 ? c.order : 6;
  const BoundaryMesh mesh = spec.mesh(n);

  GptTable table = compute_gpt_table(mesh, contrast, order, true);
  if (c.noise > 0.0) table = perturb_table(table, c.noise, c.seed);
  json j = io::table_to_json(table, hash);
  j["meta"] = shape_meta(mesh, hash);
  j["meta"]["shape"] = io::shape_to_json(spec);
  j["meta"]["mesh_n"] = n;
  j["meta"]["noise"] = c.noise;
  j["meta"]["seed"] = c.seed;
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  write_json(dir / "gpt.json", j);

  if (c.field_samples > 0 || c.dump_density) {
    const TransmissionSolver solver(mesh, contrast);
    const Polynomial2 h = Polynomial2::monomial({1, 0});
    const Eigen::VectorXd phi = solver.density(h);
    if (c.dump_density) {
      std::ostringstream os;
      io::write_density_csv(os, mesh, phi, hash);
      write_text(dir / "density.csv", os.str());
    }
    if (c.field_samples > 0) {
      const double r = 1.5 * mesh.radius();
      const int g = c.field_samples;
      std::ostringstream os;
      os << "# config_hash=" << hash << "\n# H=x1\nx,y,u,near_boundary\n";
      for (int iy = 0; iy < g; ++iy) {
        for (int ix = 0; ix < g; ++ix) {
          const cplx z(-r + 2.0 * r * (ix + 0.5) / g, -r + 2.0 * r * (iy + 0.5) / g);
          if (contains_point(mesh, z)) continue;
          const PotentialValue u = solver.field(h, phi, z);
          os << io::fmt(z.real()) << ',' << io::fmt(z.imag()) << ',' << io::fmt(u.value) << ',' << (u.near_boundary ? 1 : 0)
             << "\n";
        }
      }
      write_text(dir / "field.csv", os.str());
    }
  }
  std::cout << "wrote " << (dir / "gpt.json").string() << "\n";
  return 0;
}

std::optional<BoundaryMesh> truth_mesh(const RunConfig& c, int n) {
  if (c.truth.empty()) return std::nullopt;
  return io::parse_shape(c.truth).mesh(n);
}

int cmd_invert(const RunConfig& c, const std::string& hash) {
  const GptTable table = load_table(c.gpt);
  const std::string init = c.init.empty() ? "exact" : c.init;
  const int order = c.order > 0 ? c.order : table.order;
  const int n = c.mesh_n > 0 ? c.mesh_n : 256;
  json shape;
  json diag;
  ConformalMap drawn;
  if (init == "exact") {
    std::optional<int> sign;
    if (auto s0 = parse_sigma0(c.sigma0)) {
      if (*s0 == 0.0) {
        sign = -1;
      } else if (std::isinf(*s0)) {
        sign = 1;
      } else {
        throw Error(ErrorKind::Input, "--init exact needs sigma0 = 0 or inf; use --init reference for finite contrast");
      }
    }
    const RecoveredMap r = exact_recover(table, order, sign);
    diag = io::recovered_to_json(r);
    drawn = r.map;
  } else if (init == "reference") {
    const RecoveredMap r = reference_shape(table, resolve_sigma0(c, table), order);
    diag = io::recovered_to_json(r);
    drawn = r.simple ? r.map : r.fallback->as_map();
  } else if (init == "ellipse") {
    const EquivalentEllipse e = equivalent_ellipse(table, resolve_sigma0(c, table));
    diag = {{"ellipse", io::ellipse_to_json(e)}};
    drawn = e.as_map();
  } else {
    throw Error(ErrorKind::Input, "--init must be exact, reference or ellipse");
  }
  shape = io::map_to_json(drawn);
  shape["meta"] = {{"config_hash", hash}, {"init", init}};
  diag["meta"] = {{"config_hash", hash}, {"init", init}, {"order", order}};

  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  write_json(dir / "shape.json", shape);
  write_json(dir / "diagnostics.json", diag);
  if (c.svg) {
    const auto truth = truth_mesh(c, n);
    // Non-simple recovered curves cannot be meshed; draw the raw trace instead.
    BoundaryMesh m;
    try {
      m = mesh_from_map(drawn, n);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Geometry) throw;
      const auto curve = map_curve(drawn);
      m.points.resize(n);
      for (int j = 0; j < n; ++j) m.points[j] = curve->eval(2.0 * std::numbers::pi * j / n).z;
    }
    write_text(dir / "shape.svg", io::svg_overlay(m, truth ? &*truth : nullptr, hash));
  }
  std::cout << "wrote " << (dir / "shape.json").string() << "\n";
  return 0;
}

int cmd_recon(const RunConfig& c, const std::string& hash) {
  const GptTable table = load_table(c.gpt);
  const Contrast contrast = Contrast::from_sigma0(resolve_sigma0(c, table));
  const int order = c.order > 0 ? c.order : std::min(table.order, 6);
  ReconOptions opts;
  opts.max_iter = c.max_iter;
  if (c.max_iter < 0) throw Error(ErrorKind::Input, "--max-iter must be >= 0");
  opts.mesh_n = c.mesh_n > 0 ? c.mesh_n : 256;
  const InitKind init = parse_init_kind(c.init.empty() ? "reference" : c.init);
  const ReconResult r = reconstruct(table, contrast, order, init, opts);

  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  std::ostringstream csv;
  io::write_mesh_csv(csv, r.state.mesh, hash);
  write_text(dir / "final_mesh.csv", csv.str());
  std::ostringstream log;
  for (const auto& rec : r.log) {
    json j = io::log_record_to_json(rec);
    j["config_hash"] = hash;
    log << j.dump() << "\n";
  }
  write_text(dir / "run_log.jsonl", log.str());
  json summary = {{"init", to_string(init)},
                  {"init_map", io::map_to_json(r.init_map)},
                  {"iterations", r.state.iteration},
                  {"initial_cost", r.state.cost_history.front()},
                  {"final_cost", r.state.cost_history.back()},
                  {"converged", r.state.converged},
                  {"stuck", r.state.stuck},
                  {"order", order},
                  {"sigma0", contrast.sigma0()},
                  {"meta", {{"config_hash", hash}}}};
  if (r.reference) summary["reference"] = io::recovered_to_json(*r.reference);
  if (r.ellipse) summary["ellipse"] = io::ellipse_to_json(*r.ellipse);
  write_json(dir / "summary.json", summary);
  if (c.svg) {
    const auto truth = truth_mesh(c, opts.mesh_n);
    write_text(dir / "recon.svg", io::svg_overlay(r.state.mesh, truth ? &*truth : nullptr, hash));
  }
  std::cout << "final cost " << io::fmt(r.state.cost_history.back()) << " after " << r.state.iteration << " iterations\n";
  return 0;
}

int cmd_shapes() {
  json out = json::array();
  out.push_back({{"name", "disk"}, {"type", "conformal"}, {"gamma", 1.0}, {"coeffs", json::array()}});
  for (const std::string name : {"ellipse", "kite", "perturbed_circle", "cap"}) {
    json params = json::object();
    for (const auto& [k, v] : default_shape_params(parse_shape_kind(name))) params[k] = v;
    out.push_back({{"name", name}, {"type", "parametric"}, {"params", params}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization tensors and shape reconstruction for 2D conductivity inclusions"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--sigma0", cfg.sigma0, "Inclusion conductivity (number or 'inf')");
    sub->add_option("--order", cfg.order, "Tensor / map order")->check(CLI::PositiveNumber);
    sub->add_option("--mesh-n", cfg.mesh_n, "Boundary nodes (even, >= 32)");
    sub->add_option("--out-dir", cfg.out_dir, "Output directory");
  };
  CLI::App* forward = app.add_subcommand("forward", "Compute a GPT table for a shape");
  add_common(forward);
  forward->add_option("--shape", cfg.shape, "Built-in name, inline JSON or JSON file");
  forward->add_option("--noise", cfg.noise, "Relative multiplicative noise level in [0, 1)");
  forward->add_option("--seed", cfg.seed, "Noise seed");
  forward->add_option("--field-samples", cfg.field_samples, "Exterior field grid size (H = x1)");
  forward->add_flag("--dump-density", cfg.dump_density, "Write the density for H = x1");

  CLI::App* invert = app.add_subcommand("invert", "Recover a shape from a GPT table");
  add_common(invert);
  invert->add_option("--gpt", cfg.gpt, "GPT table JSON")->required();
  invert->add_option("--init", cfg.init, "exact | reference | ellipse");
  invert->add_option("--truth", cfg.truth, "Shape drawn in gray in the SVG");
  invert->add_flag("--svg", cfg.svg, "Write an SVG overlay");

  CLI::App* recon = app.add_subcommand("recon", "Shape descent from an initial guess");
  add_common(recon);
  recon->add_option("--gpt", cfg.gpt, "GPT table JSON")->required();
  recon->add_option("--init", cfg.init, "ellipse | reference");
  recon->add_option("--max-iter", cfg.max_iter, "Descent iterations");
  recon->add_option("--truth", cfg.truth, "Shape drawn in gray in the SVG");
  recon->add_flag("--svg", cfg.svg, "Write an SVG overlay");

  app.add_subcommand("shapes", "List built-in shapes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.mesh_n != 0 && (cfg.mesh_n < 32 || cfg.mesh_n % 2 != 0)) throw Error(ErrorKind::Input, "--mesh-n must be even and >= 32");
    if (cfg.command == "shapes") return cmd_shapes();
    const std::string hash = io::config_hash(canonical(cfg));
    if (cfg.command == "forward") return cmd_forward(cfg, hash);
    if (cfg.command == "invert") return cmd_invert(cfg, hash);
    return cmd_recon(cfg, hash);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
