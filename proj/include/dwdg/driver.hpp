#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dwdg/assembly.hpp"
#include "dwdg/norms.hpp"
#include "dwdg/problems.hpp"
#include "dwdg/solver.hpp"

namespace dwdg {

struct RunOptions {
  DiagonalRule mesh_rule = DiagonalRule::corner_safe;
  int quad_assembly = 4;
  int quad_error = 8;
  ConvectionPath path = ConvectionPath::centered_flux;
  SolverMethod solver = SolverMethod::direct;
  std::string out_dir;            // empty: no files written
  bool dump_system = false;       // matrix-market A and plain-text rhs
  bool dump_operators = false;    // gradient/divergence operator matrices
  bool dump_mesh = false;         // node/triangle text file
  bool write_vtk = false;
  bool write_csv = false;
  std::optional<Rect> mask;       // subdomain for local error norms
  std::optional<std::pair<int, double>> profile;  // axis, coordinate
  std::optional<std::string> mesh_file;           // import instead of generating
};

struct SolveRun {
  Mesh mesh;
  double h = 0.0;      // requested grid spacing
  double sigma = 0.0;
  SolveReport solver;
  Eigen::VectorXd coefficients;
  std::optional<NormReport> error;         // global, when an exact solution exists
  std::optional<NormReport> masked_error;  // when a mask is given
  std::vector<std::string> warnings;
};

/// One assembly+solve at grid spacing h (the structured spacing, as reported
/// in result tables) and penalty sigma, with optional artifact dumps.
SolveRun run_solve(const ProblemSpec& problem, double h, double sigma,
                   const RunOptions& options = {});

struct ConvergenceRow {
  double h = 0.0;
  double sigma = 0.0;
  NormReport error;                    // masked when a mask is set
  std::map<std::string, double> rate;  // per norm key; empty at the first level
  SolveReport solver;
  bool quad_saturation = false;
};

struct ConvergenceReport {
  std::string example;
  double eps = 0.0;
  std::optional<Rect> mask;
  std::vector<ConvergenceRow> rows;  // sigma-major, then levels fine-ward
  std::vector<std::string> warnings;

  std::string csv() const;
  std::string markdown(const std::vector<std::string>& norm_keys = {"l2", "h", "h_sharp"}) const;
};

/// One solve per (sigma, h); rates are formed between consecutive levels of
/// the same sigma. Throws CapabilityError when error norms are requested
/// without an exact solution.
ConvergenceReport run_convergence(const ProblemSpec& problem, const std::vector<double>& levels,
                                  const std::vector<double>& sigmas,
                                  const RunOptions& options = {});

struct PropertyResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst observed residual / statistic
  double threshold = 0.0;
  std::string detail;
};

enum class ValidateScale { quick, full };

/// Executes the operator-identity and coercivity property suites on seeded
/// random data. quick: meshes up to h = 1/8; full adds finer meshes and the
/// inf-sup sweep.
std::vector<PropertyResult> run_validate(ValidateScale scale = ValidateScale::quick);

/// Structured spacing -> mesh resolution for a problem's domain.
Mesh mesh_for(const ProblemSpec& problem, double h, DiagonalRule rule);

}  // namespace dwdg
