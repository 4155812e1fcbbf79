#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfeec/convergence.hpp"

using namespace sfeec;

namespace {

PeriodicMesh mesh_from_flags(const std::string& kind, std::vector<int> grid,
                             std::vector<double> spacing, int vertices,
                             std::vector<double> box, std::uint64_t seed,
                             const std::string& method) {
  if (kind == "cubical") {
    if (grid.size() != 3 || spacing.size() != 3)
      throw InvalidParameter("cubical mesh needs --grid nx,ny,nz and --spacing dx,dy,dz");
    return generate_cubical_lattice(grid[0], grid[1], grid[2], spacing[0],
                                    spacing[1], spacing[2]);
  }
  if (kind == "tri") {
    if (box.size() != 2) throw InvalidParameter("tri mesh needs --box Lx,Ly");
    MeshMethod m = method == "structured-jittered"
                       ? MeshMethod::StructuredJittered
                       : MeshMethod::DelaunayTiled;
    return generate_periodic_triangulation(vertices, box[0], box[1], seed, m);
  }
  throw InvalidParameter("unknown mesh kind: " + kind);
}

ConvergenceConfig config_from_file(const std::string& path) {
  ConvergenceConfig cfg;
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      size_t a = item.find_first_not_of(" \t");
      size_t b = item.find_last_not_of(" \t");
      if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
    }
    return out;
  };
  while (std::getline(is, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    key = trim(key);
    val = trim(val);
    if (key == "bases") {
      cfg.bases.clear();
      for (auto& s : split(val)) cfg.bases.push_back(family_from_name(s));
    } else if (key == "patterns") {
      cfg.patterns.clear();
      for (auto& s : split(val)) cfg.patterns.push_back(pattern_from_name(s));
    } else if (key == "Lx") {
      cfg.Lx = std::stod(val);
    } else if (key == "Ly") {
      cfg.Ly = std::stod(val);
    } else if (key == "modes") {
      cfg.modes.clear();
      for (auto& s : split(val)) cfg.modes.push_back(std::stoi(s));
    } else if (key == "vertex_ladder") {
      cfg.vertex_ladder.clear();
      for (auto& s : split(val)) cfg.vertex_ladder.push_back(std::stoi(s));
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (auto& s : split(val)) cfg.seeds.push_back(std::stoull(s));
    } else if (key == "mesh_method") {
      cfg.mesh_method = val == "structured-jittered"
                            ? MeshMethod::StructuredJittered
                            : MeshMethod::DelaunayTiled;
    } else if (key == "quadrature_order") {
      cfg.quadrature_order = std::stoi(val);
    } else if (key == "fit_window_lo") {
      cfg.fit_window_lo = std::stod(val);
    } else if (key == "fit_window_hi") {
      cfg.fit_window_hi = std::stod(val);
    } else {
      throw InvalidParameter("unknown config key: " + key);
    }
  }
  return cfg;
}

int cmd_mesh(const std::string& kind, std::vector<int> grid,
             std::vector<double> spacing, int vertices,
             std::vector<double> box, std::uint64_t seed,
             const std::string& method, const std::string& out) {
  PeriodicMesh mesh =
      mesh_from_flags(kind, grid, spacing, vertices, box, seed, method);
  std::string json = mesh.to_json();
  if (out.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream os(out, std::ios::binary);
    os << json << "\n";
  }
  return 0;
}

int cmd_spai(const std::string& input, const std::string& pattern,
             const std::string& output, const std::string& report_path,
             bool use_cg) {
  std::ifstream is(input);
  if (!is) throw std::runtime_error("cannot open operator file " + input);
  SparseOperator m = read_coordinate_list(is);
  if (!m.symmetric)
    throw InvalidParameter("spai: input operator is not symmetric");
  auto pat = make_pattern(m, pattern_from_name(pattern));
  SpaiOptions opts;
  opts.use_cg = use_cg;
  auto [q, rep] = spai_approximate_inverse(m, pat, opts);
  {
    std::ofstream os(output, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + output);
    write_coordinate_list(os, q);
  }
  nlohmann::ordered_json j;
  j["pattern"] = pattern;
  j["n"] = m.rows;
  j["frobenius_residual"] = rep.frobenius_residual;
  j["avg_nnz_per_row"] = rep.avg_nnz_per_row;
  j["max_column_residual"] = rep.max_column_residual;
  j["wall_time_seconds"] = rep.wall_time_seconds;
  j["fallback_columns"] = rep.fallback_columns;
  if (report_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(report_path, std::ios::binary);
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_evolve(const std::string& scheme_name, double dt, int steps,
               const std::string& pattern, const std::string& formulation,
               int diag_every, const std::string& kind,
               std::vector<int> grid, std::vector<double> spacing,
               int vertices, std::vector<double> box, std::uint64_t seed,
               const std::string& method, const std::string& basis_name,
               bool lumped, double eps0, double mu0, std::uint64_t init_seed,
               const std::string& out) {
  PeriodicMesh mesh =
      mesh_from_flags(kind, grid, spacing, vertices, box, seed, method);
  Family basis = family_from_name(basis_name);
  FormSpace sp1 = build_space(mesh, basis, 1);
  FormSpace sp2 = build_space(mesh, basis, 2);
  SparseOperator c = derivative_matrix(sp1, sp2);
  SparseOperator m1 = lumped ? lumped_mass(sp1) : mass_matrix(sp1);
  SparseOperator m2 = lumped ? lumped_mass(sp2) : mass_matrix(sp2);
  auto [q, rep] =
      spai_approximate_inverse(m1, make_pattern(m1, pattern_from_name(pattern)));

  std::optional<SparseOperator> div;
  const SparseOperator* div_ptr = nullptr;
  if (mesh.dim == 3) {
    FormSpace sp3 = build_space(mesh, basis, 3);
    div = derivative_matrix(sp2, sp3);
    div_ptr = &*div;
  }
  UnitSystem units{eps0, mu0};
  SplitScheme scheme(scheme_name == "lie-trotter" ? SplitKind::LieTrotter
                                                  : SplitKind::Strang,
                     dt, q, c, m2, units, div_ptr);

  Rng rng(init_seed);
  std::vector<double> a((size_t)sp1.n_dofs), e((size_t)sp1.n_dofs);
  for (auto& v : a) v = rng.uniform(-1, 1);
  for (auto& v : e) v = rng.uniform(-1, 1);
  FieldState state;
  if (formulation == "be") {
    state = make_state(Formulation::BE, matvec(c, a), std::move(e));
  } else {
    state = make_state(Formulation::AE, std::move(a), std::move(e));
  }

  std::ostringstream csv;
  csv << "step,time,energy,gauss_residual\n";
  char buf[160];
  auto emit = [&](int s) {
    double gr = state.formulation == Formulation::BE
                    ? scheme.gauss_residual(state)
                    : 0.0;
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", s, state.time,
                  scheme.energy(state), gr);
    csv << buf;
  };
  emit(0);
  for (int s = 1; s <= steps; ++s) {
    state = scheme.step(state);
    if (s % diag_every == 0 || s == steps) emit(s);
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream os(out, std::ios::binary);
    os << csv.str();
  }
  return 0;
}

int cmd_yee_check(std::vector<int> grid, std::vector<double> spacing,
                  double dt, int steps, std::uint64_t seed) {
  if (grid.size() != 3 || spacing.size() != 3)
    throw InvalidParameter("yee-check needs --grid nx,ny,nz and --spacing dx,dy,dz");
  if (dt <= 0) {
    // default to 40% of the lumped-mass stability limit
    double s = 0;
    for (double d : spacing) s += 1.0 / (d * d);
    dt = 0.4 / std::sqrt(s);
  }
  double dev = yee_equivalence_check(grid[0], grid[1], grid[2], spacing[0],
                                     spacing[1], spacing[2], dt, steps, seed);
  bool pass = dev <= 1e-12;
  std::printf("max deviation %.3e after %d steps (dt = %.6g): %s\n", dev, steps,
              dt, pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

int cmd_converge(const std::string& config_path, const std::string& out_dir,
                 bool check, ConvergenceConfig overrides,
                 const std::vector<bool>& overridden) {
  ConvergenceConfig cfg;
  if (!config_path.empty()) cfg = config_from_file(config_path);
  // CLI overrides: [0] ladder, [1] modes, [2] seeds, [3] window, [4] method,
  // [5] bases, [6] patterns
  if (overridden[0]) cfg.vertex_ladder = overrides.vertex_ladder;
  if (overridden[1]) cfg.modes = overrides.modes;
  if (overridden[2]) cfg.seeds = overrides.seeds;
  if (overridden[3]) {
    cfg.fit_window_lo = overrides.fit_window_lo;
    cfg.fit_window_hi = overrides.fit_window_hi;
  }
  if (overridden[4]) cfg.mesh_method = overrides.mesh_method;
  if (overridden[5]) cfg.bases = overrides.bases;
  if (overridden[6]) cfg.patterns = overrides.patterns;

  auto result = run_convergence(cfg);
  auto fits = summarize(result, cfg);
  emit_results(result.records, fits, out_dir + "/records.csv",
               out_dir + "/summary.json");
  for (const auto& f : fits)
    std::printf("%s %-8s exponent %6.3f  r2 %.4f  saturation %s\n",
                f.basis.c_str(), f.pattern.c_str(), f.exponent, f.r2,
                f.saturation ? std::to_string(*f.saturation).c_str() : "none");
  if (!check) return 0;
  int failures = 0;
  for (const auto& c : check_convergence_claims(result, cfg)) {
    std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.c_str());
    if (!c.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structure-preserving FEEC toolkit for Maxwell's equations"};
  app.require_subcommand(1);

  // shared mesh flags
  std::string kind = "cubical", method = "delaunay-tiled", basis = "q1";
  std::vector<int> grid{4, 4, 4};
  std::vector<double> spacing{1, 1, 1};
  std::vector<double> box{1, 1};
  int vertices = 64;
  std::uint64_t seed = 0;

  auto add_mesh_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mesh", kind, "mesh kind: cubical | tri");
    cmd->add_option("--grid", grid, "cubical cells nx,ny,nz")->delimiter(',');
    cmd->add_option("--spacing", spacing, "lattice spacings dx,dy,dz")
        ->delimiter(',');
    cmd->add_option("--vertices", vertices, "triangulation vertex count");
    cmd->add_option("--box", box, "torus box Lx,Ly")->delimiter(',');
    cmd->add_option("--seed", seed, "mesh generation seed");
    cmd->add_option("--method", method,
                    "tri mesh method: delaunay-tiled | structured-jittered");
  };

  // mesh
  std::string out;
  auto* mesh_cmd = app.add_subcommand("mesh", "generate a mesh and print JSON");
  add_mesh_flags(mesh_cmd);
  mesh_cmd->add_option("--out", out, "output path (default stdout)");

  // spai
  std::string input, pattern = "m1", output = "q.txt", report;
  bool use_cg = false;
  auto* spai_cmd =
      app.add_subcommand("spai", "sparse approximate inverse of an operator");
  spai_cmd->add_option("--input", input, "operator in coordinate-list format")
      ->required();
  spai_cmd->add_option("--pattern", pattern,
                       "sparsity pattern: diagonal | m1 | m1sq | dense");
  spai_cmd->add_option("--output", output, "output path for Q");
  spai_cmd->add_option("--report", report, "JSON report path (default stdout)");
  spai_cmd->add_flag("--cg", use_cg, "solve normal equations by CG");

  // evolve
  std::string scheme = "strang", formulation = "ae";
  double dt = 0.05, eps0 = 1, mu0 = 1;
  int steps = 100, diag_every = 10;
  bool lumped = false;
  std::uint64_t init_seed = 1;
  auto* ev = app.add_subcommand("evolve", "run the splitting integrator");
  add_mesh_flags(ev);
  ev->add_option("--scheme", scheme, "strang | lie-trotter");
  ev->add_option("--dt", dt, "time step");
  ev->add_option("--steps", steps, "number of steps");
  ev->add_option("--pattern", pattern, "inverse mass pattern");
  ev->add_option("--formulation", formulation, "ae | be");
  ev->add_option("--diag-every", diag_every, "diagnostic cadence");
  ev->add_option("--basis", basis, "q1 | p1 | p2");
  ev->add_flag("--lumped", lumped, "lump the mass matrices");
  ev->add_option("--eps0", eps0, "vacuum permittivity");
  ev->add_option("--mu0", mu0, "vacuum permeability");
  ev->add_option("--init-seed", init_seed, "random initial data seed");
  ev->add_option("--out", out, "CSV output path (default stdout)");

  // yee-check
  double ycdt = 0;
  int ycsteps = 100;
  auto* yc = app.add_subcommand(
      "yee-check", "lumped-mass SFEEC vs independent FDTD oracle");
  yc->add_option("--grid", grid, "nx,ny,nz")->delimiter(',');
  yc->add_option("--spacing", spacing, "dx,dy,dz")->delimiter(',');
  yc->add_option("--dt", ycdt, "time step (default: 0.4x stability limit)");
  yc->add_option("--steps", ycsteps, "number of steps");
  yc->add_option("--seed", seed, "random initial data seed");

  // converge
  std::string config_path, out_dir = ".";
  bool check = false;
  ConvergenceConfig ov;
  std::vector<std::string> ov_bases, ov_patterns;
  std::vector<double> ov_window;
  auto* cv = app.add_subcommand("converge",
                                "curl-of-curl convergence study");
  auto* o_ladder = cv->add_option("--ladder", ov.vertex_ladder,
                                  "vertex counts")->delimiter(',');
  auto* o_modes = cv->add_option("--modes", ov.modes, "mode numbers n")
                      ->delimiter(',');
  auto* o_seeds = cv->add_option("--seeds", ov.seeds, "mesh seeds")
                      ->delimiter(',');
  auto* o_window =
      cv->add_option("--window", ov_window, "fit window lo,hi in cells/wavelength")
          ->delimiter(',');
  auto* o_method = cv->add_option("--method", method, "mesh method");
  auto* o_bases = cv->add_option("--bases", ov_bases, "bases (p1,p2)")
                      ->delimiter(',');
  auto* o_patterns =
      cv->add_option("--patterns", ov_patterns,
                     "patterns (diagonal,m1,m1sq,dense)")->delimiter(',');
  cv->add_option("--config", config_path, "key = value config file");
  cv->add_option("--out-dir", out_dir, "output directory");
  cv->add_flag("--check", check, "validate the acceptance claims; nonzero exit on failure");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mesh_cmd->parsed())
      return cmd_mesh(kind, grid, spacing, vertices, box, seed, method, out);
    if (spai_cmd->parsed())
      return cmd_spai(input, pattern, output, report, use_cg);
    if (ev->parsed())
      return cmd_evolve(scheme, dt, steps, pattern, formulation, diag_every,
                        kind, grid, spacing, vertices, box, seed, method,
                        basis, lumped, eps0, mu0, init_seed, out);
    if (yc->parsed()) return cmd_yee_check(grid, spacing, ycdt, ycsteps, seed);
    if (cv->parsed()) {
      if (!ov_window.empty()) {
        if (ov_window.size() != 2)
          throw InvalidParameter("--window needs lo,hi");
        ov.fit_window_lo = ov_window[0];
        ov.fit_window_hi = ov_window[1];
      }
      if (!ov_bases.empty()) {
        ov.bases.clear();
        for (auto& s : ov_bases) ov.bases.push_back(family_from_name(s));
      }
      if (!ov_patterns.empty()) {
        ov.patterns.clear();
        for (auto& s : ov_patterns)
          ov.patterns.push_back(pattern_from_name(s));
      }
      ov.mesh_method = method == "structured-jittered"
                           ? MeshMethod::StructuredJittered
                           : MeshMethod::DelaunayTiled;
      std::vector<bool> overridden = {
          (bool)o_ladder->count(), (bool)o_modes->count(),
          (bool)o_seeds->count(),  (bool)o_window->count(),
          (bool)o_method->count(), (bool)o_bases->count(),
          (bool)o_patterns->count()};
      return cmd_converge(config_path, out_dir, check, ov, overridden);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
