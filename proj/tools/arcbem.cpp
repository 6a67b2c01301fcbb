// Command-line front end: scene validation, direct solves, convergence
// studies, field grids, and frequency / arc-count benchmark sweeps.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "arcbem/potentials.hpp"
#include "arcbem/scene_io.hpp"
#include "arcbem/solver.hpp"

namespace {

using namespace arcbem;
using nlohmann::json;

// machine-readable exit codes
constexpr int exit_ok = 0;
constexpr int exit_scene = 2;      // schema violation / invalid geometry
constexpr int exit_numerical = 3;  // non-convergence or singular system
constexpr int exit_io = 4;         // unreadable/unwritable paths

struct RunConfig {
  std::string scene_path;
  std::string problem = "dirichlet";
  double alpha = 0.0;
  std::vector<int> degrees;
  double tol = 1e-10;
  double rhs_tol = 1e-12;
  std::string out;
  std::string grid;
  std::vector<double> omega_list;
  std::vector<int> arc_count_list;
  std::uint64_t seed = 0;
  int overkill = 60;
};

ProblemKind parse_problem(const std::string& p) {
  if (p == "dirichlet") return ProblemKind::Dirichlet;
  if (p == "neumann") return ProblemKind::Neumann;
  throw CLI::ValidationError("--problem must be dirichlet or neumann");
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open output path " + out);
  f << j.dump(2) << "\n";
}

json config_echo(const RunConfig& cfg) {
  json j;
  j["scene"] = cfg.scene_path;
  j["problem"] = cfg.problem;
  j["alpha"] = cfg.alpha;
  j["tol"] = cfg.tol;
  j["rhs_tol"] = cfg.rhs_tol;
  return j;
}

json coeffs_to_json(const DensitySolution& sol) {
  json arcs = json::array();
  for (const auto& c : sol.arc_coeffs) {
    json v = json::array();
    for (int k = 0; k < c.size(); ++k) v.push_back({c[k].real(), c[k].imag()});
    arcs.push_back(std::move(v));
  }
  return arcs;
}

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  char c;
  std::istringstream is(s);
  if (!(is >> g.xmin >> c >> g.xmax >> c >> g.ymin >> c >> g.ymax >> c >> g.nx >> c >> g.ny))
    throw CLI::ValidationError("--grid expects \"xmin,xmax,ymin,ymax,nx,ny\"");
  g.validate();
  return g;
}

int cmd_check(const RunConfig& cfg) {
  const Scene scene = load_scene(cfg.scene_path);
  // arcs self-validate on construction inside load_scene
  scene.medium.validate();
  json rep;
  rep["scene"] = cfg.scene_path;
  rep["arc_count"] = scene.arcs.size();
  rep["kappa_s"] = scene.medium.kappa_s();
  rep["kappa_p"] = scene.medium.kappa_p();
  rep["wavelength_s"] = 2.0 * pi / scene.medium.kappa_s();
  rep["wavelength_p"] = 2.0 * pi / scene.medium.kappa_p();
  rep["diameter"] = scene.diameter();
  const double md = scene_min_distance(scene);
  rep["min_distance"] = std::isfinite(md) ? json(md) : json("inf");
  rep["valid"] = true;
  emit(rep, cfg.out);
  return exit_ok;
}

int cmd_solve(const RunConfig& cfg) {
  const Scene scene = load_scene(cfg.scene_path);
  const ProblemKind pk = parse_problem(cfg.problem);
  const int N = cfg.degrees.empty() ? 200 : cfg.degrees.front();
  const IncidentWave wave{cfg.alpha};

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto sys = assemble_system(pk, scene, wave, N, cfg.tol, cfg.rhs_tol);
  const auto t1 = clock::now();
  const auto sol = solve(sys);
  const auto t2 = clock::now();

  json rep;
  rep["config"] = config_echo(cfg);
  rep["N"] = N;
  rep["dof"] = sys.matrix.rows();
  rep["residual"] = sol.residual;
  rep["nnz_fraction"] = sys.nnz_fraction;
  rep["coefficients"] = coeffs_to_json(sol);
  rep["timings"] = {
      {"assembly_seconds", std::chrono::duration<double>(t1 - t0).count()},
      {"solve_seconds", std::chrono::duration<double>(t2 - t1).count()}};
  emit(rep, cfg.out);
  return exit_ok;
}

int cmd_converge(const RunConfig& cfg) {
  const Scene scene = load_scene(cfg.scene_path);
  const ProblemKind pk = parse_problem(cfg.problem);
  if (cfg.degrees.empty())
    throw CLI::ValidationError("converge needs at least one --degree");
  const auto rep = convergence_study(pk, scene, IncidentWave{cfg.alpha}, cfg.degrees,
                                     cfg.overkill, cfg.tol, cfg.rhs_tol);
  json j = report_to_json(rep);
  j["config"] = config_echo(cfg);
  emit(j, cfg.out);
  return exit_ok;
}

int cmd_field(const RunConfig& cfg) {
  const Scene scene = load_scene(cfg.scene_path);
  const ProblemKind pk = parse_problem(cfg.problem);
  const int N = cfg.degrees.empty() ? 200 : cfg.degrees.front();
  const IncidentWave wave{cfg.alpha};
  const GridSpec spec = parse_grid(cfg.grid);
  if (cfg.out.empty()) throw CLI::ValidationError("field needs --out for the CSV grid");

  const auto sol = solve(assemble_system(pk, scene, wave, N, cfg.tol, cfg.rhs_tol));
  const auto grid = eval_total_field_grid(sol, scene, wave, spec);
  write_grid_csv(grid, cfg.out);
  json header = grid_header_json(grid);
  header["config"] = config_echo(cfg);
  header["N"] = N;
  emit(header, cfg.out + ".json");
  return exit_ok;
}

int cmd_bench(const RunConfig& cfg) {
  const ProblemKind pk = parse_problem(cfg.problem);
  const bool omega_sweep = !cfg.omega_list.empty();
  if (!omega_sweep && cfg.arc_count_list.empty())
    throw CLI::ValidationError("bench needs --omega-list or --arc-count-list");

  json rows = json::array();
  json timings = json::array();
  const std::size_t runs = omega_sweep ? cfg.omega_list.size() : cfg.arc_count_list.size();
  for (std::size_t k = 0; k < runs; ++k) {
    ElasticMedium medium;
    int arcs = 10;
    if (omega_sweep) {
      medium.omega = cfg.omega_list[k];
      if (!cfg.arc_count_list.empty()) arcs = cfg.arc_count_list.front();
    } else {
      arcs = cfg.arc_count_list[k];
      if (!cfg.omega_list.empty()) medium.omega = cfg.omega_list.front();
    }
    int N = 200;
    if (!cfg.degrees.empty())
      N = cfg.degrees.size() == runs ? cfg.degrees[k] : cfg.degrees.front();

    const Scene scene = cfg.scene_path.empty()
                            ? generate_sine_scene(arcs, cfg.seed, {}, medium)
                            : load_scene(cfg.scene_path);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = convergence_study(pk, scene, IncidentWave{cfg.alpha}, {N},
                                       cfg.overkill, cfg.tol, cfg.rhs_tol);
    const double wall = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    json row;
    row["omega"] = scene.medium.omega;
    row["arcs"] = scene.arcs.size();
    row["N"] = N;
    row["N_ref"] = rep.N_ref;
    row["dof"] = static_cast<std::size_t>(scene.arcs.size()) * 2 * (N + 1);
    row["error"] = rep.errors.front();
    row["nnz_percent"] = 100.0 * rep.nnz_fraction;
    row["failure"] = rep.failures.front();
    rows.push_back(std::move(row));
    timings.push_back({{"wall_seconds", wall},
                       {"assembly_seconds", rep.assembly_seconds},
                       {"solve_seconds", rep.solve_seconds.front()}});
  }

  json j;
  j["config"] = config_echo(cfg);
  j["seed"] = cfg.seed;
  j["overkill"] = cfg.overkill;
  j["rows"] = rows;
  j["timings"] = timings;
  emit(j, cfg.out);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("ARCBEM_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));

  CLI::App app{"Spectral Galerkin solver for elastic wave scattering by open arcs"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool needs_scene) {
    auto* opt = sub->add_option("--scene", cfg.scene_path, "scene JSON path");
    if (needs_scene) opt->required();
    sub->add_option("--problem", cfg.problem, "dirichlet|neumann")->default_str("dirichlet");
    sub->add_option("--alpha", cfg.alpha, "incidence angle (radians)");
    sub->add_option("--degree", cfg.degrees,
                    "polynomial degree(s); converge takes several");
    sub->add_option("--tol", cfg.tol, "assembly/compression tolerance")->default_str("1e-10");
    sub->add_option("--rhs-tol", cfg.rhs_tol, "right-hand-side expansion tolerance")
        ->default_str("1e-12");
    sub->add_option("--out", cfg.out, "output path (default: stdout)");
  };

  auto* check = app.add_subcommand("check", "validate a scene file and report wavenumbers");
  add_common(check, true);

  auto* slv = app.add_subcommand("solve", "solve one problem and write the coefficients");
  add_common(slv, true);

  auto* conv = app.add_subcommand("converge", "convergence study against an overkill reference");
  add_common(conv, true);
  conv->add_option("--overkill", cfg.overkill, "reference degree margin")->default_str("60");

  auto* fld = app.add_subcommand("field", "total displacement field on a grid (CSV + JSON)");
  add_common(fld, true);
  fld->add_option("--grid", cfg.grid, "xmin,xmax,ymin,ymax,nx,ny")->required();

  auto* bench = app.add_subcommand("bench", "frequency / arc-count sweeps on generated scenes");
  add_common(bench, false);
  bench->add_option("--omega-list", cfg.omega_list, "frequencies to sweep");
  bench->add_option("--arc-count-list", cfg.arc_count_list, "arc counts to sweep");
  bench->add_option("--seed", cfg.seed, "scene generation seed")->default_str("0");
  bench->add_option("--overkill", cfg.overkill, "reference degree margin")->default_str("60");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(cfg);
    if (slv->parsed()) return cmd_solve(cfg);
    if (conv->parsed()) return cmd_converge(cfg);
    if (fld->parsed()) return cmd_field(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
  } catch (const SceneFormatError& e) {
    std::cerr << "scene error: " << e.what() << "\n";
    return exit_scene;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return exit_scene;
  } catch (const NonConvergence& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const SingularSystem& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  }
  return exit_ok;
}
