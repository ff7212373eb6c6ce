#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "dwdg/driver.hpp"
#include "dwdg/errors.hpp"
#include "dwdg/io.hpp"
#include "dwdg/problems.hpp"

namespace {

double parse_level(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

std::vector<double> parse_levels(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_level(item));
  if (out.empty()) throw CLI::ValidationError("--levels", "no levels given");
  return out;
}

struct CommonArgs {
  std::string example;
  std::string config;
  double eps = -1.0;
  std::string mesh_rule = "corner-safe";
  int quad_assembly = 4;
  int quad_error = 8;
  std::string solver = "direct";
  std::string out_dir;
  bool dump_system = false;
  bool dump_operator = false;
  bool dump_mesh = false;
  std::string mask;
  std::string mesh_file;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--example", a.example, "catalog problem: smooth | boundary-layer | interior-discont | interior-arctan");
  cmd->add_option("--config", a.config, "JSON problem description (see README)");
  cmd->add_option("--eps", a.eps, "diffusion coefficient override");
  cmd->add_option("--mesh-rule", a.mesh_rule, "uniform-ne | corner-safe")
      ->check(CLI::IsMember({"uniform-ne", "corner-safe"}));
  cmd->add_option("--quad-assembly", a.quad_assembly, "assembly quadrature degree");
  cmd->add_option("--quad-error", a.quad_error, "error-norm quadrature degree");
  cmd->add_option("--solver", a.solver, "direct | iterative")
      ->check(CLI::IsMember({"direct", "iterative"}));
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_flag("--dump-system", a.dump_system, "write system matrix and rhs");
  cmd->add_flag("--dump-operator", a.dump_operator, "write discrete operator matrices");
  cmd->add_flag("--dump-mesh", a.dump_mesh, "write the mesh as a node/triangle text file");
  cmd->add_option("--mask", a.mask, "subdomain x0,y0,x1,y1 for local error norms");
  cmd->add_option("--mesh-file", a.mesh_file, "import mesh from node/triangle text file");
}

dwdg::ProblemSpec resolve_problem(const CommonArgs& a) {
  if (!a.config.empty()) {
    dwdg::ProblemSpec p = dwdg::problem_from_json_file(a.config);
    if (a.eps >= 0.0) p.eps = a.eps;
    return p;
  }
  if (a.example.empty())
    throw CLI::ValidationError("--example", "either --example or --config is required");
  return dwdg::example_by_name(a.example, a.eps);
}

dwdg::RunOptions resolve_options(const CommonArgs& a) {
  dwdg::RunOptions opt;
  opt.mesh_rule = a.mesh_rule == "uniform-ne" ? dwdg::DiagonalRule::uniform_ne
                                              : dwdg::DiagonalRule::corner_safe;
  opt.quad_assembly = a.quad_assembly;
  opt.quad_error = a.quad_error;
  opt.solver = a.solver == "iterative" ? dwdg::SolverMethod::iterative
                                       : dwdg::SolverMethod::direct;
  opt.out_dir = a.out_dir;
  opt.dump_system = a.dump_system;
  opt.dump_operators = a.dump_operator;
  opt.dump_mesh = a.dump_mesh;
  if (!a.mesh_file.empty()) opt.mesh_file = a.mesh_file;
  if (!a.mask.empty()) {
    double x0, y0, x1, y1;
    if (std::sscanf(a.mask.c_str(), "%lf,%lf,%lf,%lf", &x0, &y0, &x1, &y1) != 4)
      throw CLI::ValidationError("--mask", "expected x0,y0,x1,y1");
    opt.mask = dwdg::Rect{x0, y0, x1, y1};
  }
  return opt;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("DWDG_THREADS"))
    Eigen::setNbThreads(std::max(1, std::atoi(threads)));

  CLI::App app{"dual-wind DG solver for convection-diffusion-reaction problems"};
  app.require_subcommand(1);

  CommonArgs solve_args, conv_args;
  std::string solve_h = "1/16";
  double solve_sigma = 0.0;
  std::string profile;
  bool no_vtk = false;

  CLI::App* solve = app.add_subcommand("solve", "single assembly + solve with artifact dumps");
  add_common(solve, solve_args);
  solve->add_option("--levels", solve_h, "grid spacing (fraction like 1/32 or decimal)");
  solve->add_option("--sigma", solve_sigma, "penalty parameter sigma_e");
  solve->add_option("--profile", profile, "profile line: x1=VALUE or x2=VALUE");
  solve->add_flag("--no-vtk", no_vtk, "skip the VTK dump");

  std::string levels_csv = "1/4,1/8,1/16,1/32,1/64";
  std::string sigmas_csv = "0";
  int max_level = 0;
  CLI::App* conv = app.add_subcommand("convergence", "refinement sweep with error table");
  add_common(conv, conv_args);
  conv->add_option("--levels", levels_csv, "comma-separated grid spacings");
  conv->add_option("--sigma", sigmas_csv, "comma-separated penalty values");
  conv->add_option("--max-level", max_level,
                   "append halvings of the last level (e.g. 1 adds 1/128)");

  std::string validate_scale = "quick";
  CLI::App* validate = app.add_subcommand("validate", "operator-identity property suite");
  validate->add_option("--scale", validate_scale, "quick | full")
      ->check(CLI::IsMember({"quick", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      dwdg::ProblemSpec problem = resolve_problem(solve_args);
      dwdg::RunOptions opt = resolve_options(solve_args);
      if (opt.out_dir.empty()) opt.out_dir = "out";
      opt.write_vtk = !no_vtk;
      opt.write_csv = true;
      if (!profile.empty()) {
        int axis;
        double value;
        if (std::sscanf(profile.c_str(), "x%d=%lf", &axis, &value) != 2 ||
            (axis != 1 && axis != 2))
          throw CLI::ValidationError("--profile", "expected x1=VALUE or x2=VALUE");
        opt.profile = {axis - 1, value};
      }
      const dwdg::SolveRun run =
          dwdg::run_solve(problem, parse_level(solve_h), solve_sigma, opt);
      print_warnings(run.warnings);
      std::cout << "example: " << problem.name << "\n"
                << "dofs: " << run.solver.n << "\n"
                << "solver: " << run.solver.method << " residual " << run.solver.rel_residual
                << " (" << run.solver.seconds << " s)\n";
      if (run.error) {
        std::cout << "errors (global):";
        for (const std::string& k : {std::string("l2"), std::string("h")})
          std::cout << " " << k << "=" << run.error->value(k);
        std::cout << "\n";
      }
      std::cout << "artifacts in " << opt.out_dir << "\n";
      return 0;
    }

    if (conv->parsed()) {
      dwdg::ProblemSpec problem = resolve_problem(conv_args);
      dwdg::RunOptions opt = resolve_options(conv_args);
      std::vector<double> levels = parse_levels(levels_csv);
      for (int i = 0; i < max_level; ++i) levels.push_back(levels.back() / 2.0);
      const std::vector<double> sigmas = [&] {
        std::vector<double> s;
        for (double v : parse_levels(sigmas_csv)) s.push_back(v);
        return s;
      }();
      const dwdg::ConvergenceReport report =
          dwdg::run_convergence(problem, levels, sigmas, opt);
      print_warnings(report.warnings);
      std::cout << report.markdown() << "\n";
      if (opt.out_dir.empty()) std::cout << report.csv();
      return 0;
    }

    // validate
    const dwdg::ValidateScale scale = validate_scale == "full" ? dwdg::ValidateScale::full
                                                               : dwdg::ValidateScale::quick;
    const auto results = dwdg::run_validate(scale);
    bool all_pass = true;
    for (const dwdg::PropertyResult& r : results) {
      all_pass = all_pass && r.pass;
      std::printf("[%s] %-42s measured %.3e threshold %.3e (%s)\n", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.measured, r.threshold, r.detail.c_str());
    }
    return all_pass ? 0 : 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
