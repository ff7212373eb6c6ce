#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <random>

#include "dwdg/driver.hpp"
#include "dwdg/errors.hpp"
#include "dwdg/norms.hpp"
#include "dwdg/problems.hpp"

namespace py = pybind11;
using namespace dwdg;

namespace {

ProblemSpec resolve(const std::string& example, double eps, const std::string& config_json) {
  if (!config_json.empty()) {
    ProblemSpec p = problem_from_json_text(config_json);
    if (eps >= 0.0) p.eps = eps;
    return p;
  }
  return example_by_name(example, eps);
}

RunOptions options_from_kwargs(const std::string& mesh_rule, int quad_assembly, int quad_error,
                               const std::string& solver,
                               const std::optional<std::array<double, 4>>& mask) {
  RunOptions opt;
  opt.mesh_rule =
      mesh_rule == "uniform-ne" ? DiagonalRule::uniform_ne : DiagonalRule::corner_safe;
  opt.quad_assembly = quad_assembly;
  opt.quad_error = quad_error;
  opt.solver = solver == "iterative" ? SolverMethod::iterative : SolverMethod::direct;
  if (mask) opt.mask = Rect{(*mask)[0], (*mask)[1], (*mask)[2], (*mask)[3]};
  return opt;
}

py::dict norms_to_dict(const NormReport& r) {
  py::dict d;
  for (const std::string& key : NormReport::keys()) {
    try {
      d[py::str(key)] = r.value(key);
    } catch (const CapabilityError&) {
      d[py::str(key)] = py::none();
    }
  }
  d["quad_saturation"] = r.quad_saturation;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dwdg, m) {
  m.doc() = "dual-wind DG solver for 2D convection-diffusion-reaction problems";

  m.def("example_names", [] { return example_names(); });

  m.def(
      "mesh_info",
      [](double h, const std::string& example, const std::string& rule) {
        const ProblemSpec p = example_by_name(example);
        const Mesh mesh = mesh_for(
            p, h, rule == "uniform-ne" ? DiagonalRule::uniform_ne : DiagonalRule::corner_safe);
        const MeshReport rep = validate_mesh(mesh);
        py::dict d;
        d["elements"] = rep.n_elements;
        d["edges"] = rep.n_edges;
        d["boundary_edges"] = rep.n_boundary_edges;
        d["h_max_diameter"] = rep.h;
        d["double_boundary_elements"] = rep.double_boundary_elements;
        d["quasi_uniformity"] = rep.quasi_uniformity;
        return d;
      },
      py::arg("h"), py::arg("example") = "boundary-layer", py::arg("rule") = "corner-safe");

  m.def(
      "solve",
      [](const std::string& example, double h, double sigma, double eps,
         const std::string& config_json, const std::string& mesh_rule, int quad_assembly,
         int quad_error, const std::string& solver,
         const std::optional<std::array<double, 4>>& mask) {
        const ProblemSpec p = resolve(example, eps, config_json);
        const RunOptions opt =
            options_from_kwargs(mesh_rule, quad_assembly, quad_error, solver, mask);
        const SolveRun run = run_solve(p, h, sigma, opt);
        py::dict d;
        d["dofs"] = run.solver.n;
        d["residual"] = run.solver.rel_residual;
        d["seconds"] = run.solver.seconds;
        d["warnings"] = run.warnings;
        d["coefficients"] = std::vector<double>(
            run.coefficients.data(), run.coefficients.data() + run.coefficients.size());
        if (run.error) d["errors"] = norms_to_dict(*run.error);
        if (run.masked_error) d["masked_errors"] = norms_to_dict(*run.masked_error);
        return d;
      },
      py::arg("example") = "", py::arg("h") = 0.125, py::arg("sigma") = 0.0,
      py::arg("eps") = -1.0, py::arg("config_json") = "", py::arg("mesh_rule") = "corner-safe",
      py::arg("quad_assembly") = 4, py::arg("quad_error") = 8, py::arg("solver") = "direct",
      py::arg("mask") = py::none());

  m.def(
      "convergence",
      [](const std::string& example, const std::vector<double>& levels,
         const std::vector<double>& sigmas, double eps, const std::string& config_json,
         const std::optional<std::array<double, 4>>& mask) {
        const ProblemSpec p = resolve(example, eps, config_json);
        const RunOptions opt = options_from_kwargs("corner-safe", 4, 8, "direct", mask);
        const ConvergenceReport rep = run_convergence(p, levels, sigmas, opt);
        py::list rows;
        for (const ConvergenceRow& row : rep.rows) {
          py::dict d;
          d["h"] = row.h;
          d["sigma"] = row.sigma;
          d["errors"] = norms_to_dict(row.error);
          py::dict rates;
          for (const auto& [k, v] : row.rate) rates[py::str(k)] = v;
          d["rates"] = rates;
          rows.append(d);
        }
        py::dict out;
        out["example"] = rep.example;
        out["rows"] = rows;
        out["csv"] = rep.csv();
        out["markdown"] = rep.markdown();
        return out;
      },
      py::arg("example") = "", py::arg("levels") = std::vector<double>{0.25, 0.125},
      py::arg("sigmas") = std::vector<double>{0.0}, py::arg("eps") = -1.0,
      py::arg("config_json") = "", py::arg("mask") = py::none());

  m.def(
      "operator_identity_residuals",
      [](int n, const std::string& field, unsigned seed) {
        const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, n, n);
        const DGSpace space(mesh);
        VectorField zeta;
        ScalarField div_zeta;
        if (field == "linear") {
          zeta = [](Vec2 p) { return Vec2{p.x, p.y}; };
          div_zeta = [](Vec2) { return 2.0; };
        } else {
          zeta = [](Vec2) { return Vec2{1.0, 1.0}; };
          div_zeta = [](Vec2) { return 0.0; };
        }
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        DGFunction v(space), phi(space);
        for (int i = 0; i < space.n_dofs(); ++i) {
          v.coeffs[i] = dist(rng);
          phi.coeffs[i] = dist(rng);
        }
        py::dict d;
        d["ibp"] = check_ibp_identity(space, zeta, div_zeta, v, phi);
        d["centered_flux"] = check_centered_flux_equiv(space, zeta, div_zeta, v, phi);
        return d;
      },
      py::arg("n") = 4, py::arg("field") = "linear", py::arg("seed") = 1234);

  m.def(
      "infsup",
      [](const std::string& example, double h, double sigma) {
        const ProblemSpec p = example_by_name(example);
        const Mesh mesh = mesh_for(p, h, DiagonalRule::corner_safe);
        const DGSpace space(mesh);
        const InfSupEstimate est = estimate_infsup(space, p.zeta, p.div_zeta, p.gamma, p.eps,
                                                   PenaltyPolicy::constant(mesh, sigma));
        py::dict d;
        d["value"] = est.value;
        d["probe"] = est.probe;
        return d;
      },
      py::arg("example") = "boundary-layer", py::arg("h") = 0.25, py::arg("sigma") = 0.0);

  m.def(
      "validate",
      [](const std::string& scale) {
        const auto results =
            run_validate(scale == "full" ? ValidateScale::full : ValidateScale::quick);
        py::list out;
        for (const PropertyResult& r : results) {
          py::dict d;
          d["name"] = r.name;
          d["pass"] = r.pass;
          d["measured"] = r.measured;
          d["threshold"] = r.threshold;
          out.append(d);
        }
        return out;
      },
      py::arg("scale") = "quick");
}
