#include "dwdg/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dwdg/errors.hpp"
#include "dwdg/io.hpp"
#include "dwdg/quadrature.hpp"

namespace dwdg {

namespace {

std::string fmt(double v, const char* spec = "%.10e") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string level_tag(double h, double sigma) {
  std::ostringstream ss;
  ss << "h" << fmt(h, "%g") << "_s" << fmt(sigma, "%g");
  return ss.str();
}

void dump_artifacts(const ProblemSpec& problem, const RunOptions& opt, const Mesh& mesh,
                    const DGSpace& space, const ZeroDataGradients& grads, const FormMatrices& fm,
                    const DGFunction& uh, double h, double sigma) {
  namespace fs = std::filesystem;
  if (opt.out_dir.empty()) return;
  fs::create_directories(opt.out_dir);
  const std::string base = opt.out_dir + "/" + problem.name + "_" + level_tag(h, sigma);

  if (opt.write_vtk) write_vtk_file(mesh, uh, "u", base + ".vtk");
  if (opt.write_csv) write_coefficients_csv_file(uh, base + ".csv");
  if (opt.profile) {
    const auto prof = extract_profile(uh, opt.profile->first, opt.profile->second);
    write_profile_csv_file(prof, base + "_profile.csv");
  }
  if (opt.dump_system) {
    write_matrix_market_file(fm.A_total, base + "_A.mtx");
    write_vector_file(fm.rhs, base + "_b.txt");
  }
  if (opt.dump_mesh) write_mesh_file(mesh, base + "_mesh.txt");
  if (opt.dump_operators) {
    write_matrix_market_file(grads.plus[0].matrix, base + "_grad0_plus_x1.mtx");
    write_matrix_market_file(grads.plus[1].matrix, base + "_grad0_plus_x2.mtx");
    write_matrix_market_file(grads.minus[0].matrix, base + "_grad0_minus_x1.mtx");
    write_matrix_market_file(grads.minus[1].matrix, base + "_grad0_minus_x2.mtx");
    const DiscreteOperator div_avg =
        build_div_zeta(space, problem.zeta, DivSide::avg, opt.quad_assembly);
    write_matrix_market_file(div_avg.matrix, base + "_div_avg_zeta.mtx");
  }
}

}  // namespace

Mesh mesh_for(const ProblemSpec& problem, double h, DiagonalRule rule) {
  if (!(h > 0.0)) throw std::invalid_argument("mesh_for: h must be positive");
  const int nx = std::max(2, static_cast<int>(std::lround(problem.domain.width() / h)));
  const int ny = std::max(2, static_cast<int>(std::lround(problem.domain.height() / h)));
  return generate_structured_rect(problem.domain, nx, ny, rule);
}

SolveRun run_solve(const ProblemSpec& problem, double h, double sigma,
                   const RunOptions& options) {
  SolveRun run;
  run.h = h;
  run.sigma = sigma;
  run.mesh = options.mesh_file ? read_mesh_file(*options.mesh_file)
                               : mesh_for(problem, h, options.mesh_rule);
  const DGSpace space(run.mesh);
  const PenaltyPolicy penalty = PenaltyPolicy::constant(run.mesh, sigma);
  const ZeroDataGradients grads = build_zero_data_gradients(space, options.quad_assembly);

  const double min_ar = min_advection_reaction_sample(problem);
  if (min_ar <= 0.0)
    run.warnings.push_back("sampled min of gamma - div(zeta)/2 is " + fmt(min_ar, "%g") +
                           " <= 0; the well-posedness assumption fails (solving anyway)");

  FormMatrices fm = assemble_full(space, problem.zeta, problem.div_zeta, problem.gamma,
                                  problem.f, problem.g, problem.eps, penalty, options.path,
                                  options.quad_assembly, &grads);
  run.warnings.insert(run.warnings.end(), fm.warnings.begin(), fm.warnings.end());

  auto [u, rep] = solve(fm.A_total, fm.rhs, options.solver);
  run.solver = rep;
  run.coefficients = std::move(u);

  const DGFunction uh(space, run.coefficients);
  if (problem.has_exact()) {
    const ExactSolution exact{problem.exact, problem.exact_grad};
    run.error = error_norm_suite(exact, uh, problem.zeta, problem.eps, penalty, grads, nullptr,
                                 options.quad_error);
    if (options.mask) {
      const ElementMask mask = subdomain_mask(run.mesh, *options.mask);
      run.masked_error = error_norm_suite(exact, uh, problem.zeta, problem.eps, penalty, grads,
                                          &mask, options.quad_error);
    }
  }

  dump_artifacts(problem, options, run.mesh, space, grads, fm, uh, h, sigma);
  return run;
}

std::string ConvergenceReport::csv() const {
  std::ostringstream out;
  out << "example,eps,sigma,h,norm,error,rate,quad_saturation\n";
  for (const ConvergenceRow& row : rows) {
    for (const std::string& key : NormReport::keys()) {
      double err;
      try {
        err = row.error.value(key);
      } catch (const CapabilityError&) {
        continue;  // sharp norms without derivative callables
      }
      out << example << "," << fmt(eps, "%g") << "," << fmt(row.sigma, "%g") << ","
          << fmt(row.h, "%.12g") << "," << key << "," << fmt(err);
      const auto it = row.rate.find(key);
      out << "," << (it == row.rate.end() ? std::string() : fmt(it->second, "%.4f"));
      out << "," << (row.quad_saturation ? 1 : 0) << "\n";
    }
  }
  return out.str();
}

std::string ConvergenceReport::markdown(const std::vector<std::string>& norm_keys) const {
  std::ostringstream out;
  out << "## " << example << " (eps = " << fmt(eps, "%g");
  if (mask)
    out << ", mask [" << fmt(mask->x0, "%g") << "," << fmt(mask->x1, "%g") << "]x["
        << fmt(mask->y0, "%g") << "," << fmt(mask->y1, "%g") << "]";
  out << ")\n\n";

  double current_sigma = rows.empty() ? 0.0 : rows.front().sigma;
  bool first_block = true;
  auto header = [&](double sigma) {
    out << "sigma_e = " << fmt(sigma, "%g") << "\n\n";
    out << "| h |";
    for (const auto& key : norm_keys) out << " " << key << " | rate |";
    out << "\n|---|";
    for (std::size_t i = 0; i < norm_keys.size(); ++i) out << "---|---|";
    out << "\n";
  };
  if (!rows.empty()) header(current_sigma);
  for (const ConvergenceRow& row : rows) {
    if (!first_block && row.sigma != current_sigma) {
      current_sigma = row.sigma;
      out << "\n";
      header(current_sigma);
    }
    first_block = false;
    out << "| " << fmt(row.h, "%g") << " |";
    for (const auto& key : norm_keys) {
      double err = std::numeric_limits<double>::quiet_NaN();
      try {
        err = row.error.value(key);
      } catch (const CapabilityError&) {
      }
      out << " " << (std::isnan(err) ? std::string("n/a") : fmt(err, "%.2e")) << " |";
      const auto it = row.rate.find(key);
      out << " " << (it == row.rate.end() ? std::string("-") : fmt(it->second, "%.2f")) << " |";
    }
    out << "\n";
  }
  return out.str();
}

ConvergenceReport run_convergence(const ProblemSpec& problem, const std::vector<double>& levels,
                                  const std::vector<double>& sigmas, const RunOptions& options) {
  if (!problem.has_exact())
    throw CapabilityError("run_convergence: example '" + problem.name +
                          "' has no exact solution for error norms");
  ConvergenceReport report;
  report.example = problem.name;
  report.eps = problem.eps;
  report.mask = options.mask;

  for (double sigma : sigmas) {
    const ConvergenceRow* prev = nullptr;
    for (double h : levels) {
      SolveRun run = run_solve(problem, h, sigma, options);
      for (const std::string& w : run.warnings) {
        if (std::find(report.warnings.begin(), report.warnings.end(), w) ==
            report.warnings.end())
          report.warnings.push_back(w);
      }
      ConvergenceRow row;
      row.h = h;
      row.sigma = sigma;
      row.error = options.mask ? *run.masked_error : *run.error;
      row.quad_saturation = row.error.quad_saturation;
      row.solver = run.solver;
      if (prev) {
        const double ratio = prev->h / h;
        for (const std::string& key : NormReport::keys()) {
          double e0, e1;
          try {
            e0 = prev->error.value(key);
            e1 = row.error.value(key);
          } catch (const CapabilityError&) {
            continue;
          }
          if (e0 > 0.0 && e1 > 0.0 && ratio > 0.0 && ratio != 1.0)
            row.rate[key] = std::log(e0 / e1) / std::log(ratio);
        }
      }
      report.rows.push_back(std::move(row));
      prev = &report.rows.back();
    }
  }

  if (!options.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(options.out_dir);
    const std::string base = options.out_dir + "/" + problem.name + "_convergence";
    std::ofstream csv(base + ".csv");
    csv << report.csv();
    std::ofstream md(base + ".md");
    md << report.markdown();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Validation suite
// ---------------------------------------------------------------------------

namespace {

DGFunction random_function(const DGSpace& space, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DGFunction f(space);
  for (int i = 0; i < space.n_dofs(); ++i) f.coeffs[i] = dist(rng);
  return f;
}

struct ZetaChoice {
  std::string name;
  VectorField zeta;
  ScalarField div_zeta;
};

std::vector<ZetaChoice> zeta_choices() {
  return {{"constant", [](Vec2) { return Vec2{1.0, 1.0}; }, [](Vec2) { return 0.0; }},
          {"linear", [](Vec2 x) { return Vec2{x.x, x.y}; }, [](Vec2) { return 2.0; }}};
}

// residual of the +/- pairing identity, evaluated against prebuilt operators
double ibp_residual(const DGSpace& space, const DiscreteOperator& div_p,
                    const DiscreteOperator& div_m, const ZetaChoice& zc, const DGFunction& v,
                    const DGFunction& phi, int qd) {
  const double reaction = volume_product(space, zc.div_zeta, v, phi, qd);
  const double boundary = boundary_flux_product(space, zc.zeta, v, phi, qd);
  double worst = 0.0;
  const SpMat& mass = space.mass_matrix();
  for (int pairing = 0; pairing < 2; ++pairing) {
    const SpMat& dv = pairing == 0 ? div_p.matrix : div_m.matrix;
    const SpMat& dphi = pairing == 0 ? div_m.matrix : div_p.matrix;
    const double t1 = phi.coeffs.dot(mass * (dv * v.coeffs));
    const double t2 = v.coeffs.dot(mass * (dphi * phi.coeffs));
    const double scale =
        std::max({std::abs(t1), std::abs(t2), std::abs(reaction), std::abs(boundary)});
    const double res = std::abs(t1 + t2 - reaction - boundary);
    worst = std::max(worst, scale > 0.0 ? res / scale : res);
  }
  return worst;
}

double centered_flux_residual(const DGSpace& space, const DiscreteOperator& div_avg,
                              const ZetaChoice& zc, const DGFunction& v, const DGFunction& phi,
                              int qd) {
  const Mesh& mesh = space.mesh();
  const double t1 = phi.coeffs.dot(space.mass_matrix() * (div_avg.matrix * v.coeffs));

  const QuadRule& trule = triangle_rule(qd);
  double t2 = 0.0;
  for (int t = 0; t < mesh.n_elements(); ++t) {
    const Vec2 gv = v.gradient(t);
    for (int q = 0; q < trule.size(); ++q) {
      const Vec2 x = map_to_triangle(mesh, t, trule.points[q]);
      const double w = triangle_weight(mesh, t, trule.weights[q]);
      t2 += w * (zc.div_zeta(x) * v.evaluate(t, x) + zc.zeta(x).dot(gv)) * phi.evaluate(t, x);
    }
  }
  const QuadRule& erule = edge_rule(qd);
  double t3 = 0.0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (edge.boundary) continue;
    for (int q = 0; q < erule.size(); ++q) {
      const Vec2 x = map_to_edge(mesh, e, erule.points[q].x);
      const double w = edge_weight(mesh, e, erule.weights[q]);
      const double jump = v.evaluate(edge.plus, x) - v.evaluate(edge.minus, x);
      const double avg = 0.5 * (phi.evaluate(edge.plus, x) + phi.evaluate(edge.minus, x));
      t3 += w * zc.zeta(x).dot(edge.normal) * jump * avg;
    }
  }
  const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  const double res = std::abs(t1 - t2 + t3);
  return scale > 0.0 ? res / scale : res;
}

}  // namespace

std::vector<PropertyResult> run_validate(ValidateScale scale) {
  std::vector<PropertyResult> results;
  const int qd = 4;
  std::vector<int> resolutions = {4, 8};
  if (scale == ValidateScale::full) resolutions.push_back(16);

  // operator identities on random data
  {
    std::mt19937 rng(20240501);
    double worst_ibp = 0.0, worst_cf = 0.0;
    for (int n : resolutions) {
      const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, n, n);
      const DGSpace space(mesh);
      for (const ZetaChoice& zc : zeta_choices()) {
        const DiscreteOperator div_p = build_div_zeta(space, zc.zeta, DivSide::plus, qd);
        const DiscreteOperator div_m = build_div_zeta(space, zc.zeta, DivSide::minus, qd);
        DiscreteOperator div_avg;
        div_avg.matrix = 0.5 * (div_p.matrix + div_m.matrix);
        for (int rep = 0; rep < 50; ++rep) {
          const DGFunction v = random_function(space, rng);
          const DGFunction phi = random_function(space, rng);
          worst_ibp = std::max(worst_ibp, ibp_residual(space, div_p, div_m, zc, v, phi, qd));
          worst_cf =
              std::max(worst_cf, centered_flux_residual(space, div_avg, zc, v, phi, qd));
        }
      }
    }
    results.push_back({"integration-by-parts identity", worst_ibp <= 1e-11, worst_ibp, 1e-11,
                       "50 random pairs per mesh and field"});
    results.push_back({"centered-flux equivalence", worst_cf <= 1e-11, worst_cf, 1e-11,
                       "50 random pairs per mesh and field"});
  }

  // assembly path equivalence, coercivity identities, diffusion identities
  {
    std::mt19937 rng(20240502);
    double worst_path = 0.0, worst_ar = 0.0, worst_upw = 0.0, worst_d = 0.0, worst_cs = 0.0;
    for (int n : resolutions) {
      const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, n, n);
      const DGSpace space(mesh);
      const ScalarField gamma = [](Vec2) { return 2.0; };
      for (const ZetaChoice& zc : zeta_choices()) {
        const SpMat a_cal = assemble_convection_reaction(space, zc.zeta, zc.div_zeta, gamma,
                                                         ConvectionPath::calculus, qd);
        const SpMat a_cen = assemble_convection_reaction(space, zc.zeta, zc.div_zeta, gamma,
                                                         ConvectionPath::centered_flux, qd);
        double scale = 0.0, diff = 0.0;
        const Eigen::MatrixXd diff_m = Eigen::MatrixXd(a_cal) - Eigen::MatrixXd(a_cen);
        scale = Eigen::MatrixXd(a_cen).cwiseAbs().maxCoeff();
        diff = diff_m.cwiseAbs().maxCoeff();
        worst_path = std::max(worst_path, diff / std::max(scale, 1e-300));

        const SpMat s_upw = assemble_upwind_penalty(space, zc.zeta, qd);
        for (int rep = 0; rep < 25; ++rep) {
          const DGFunction v = random_function(space, rng);
          const double lhs_ar = v.coeffs.dot(a_cen * v.coeffs);
          ScalarField gm_half = [&](Vec2 x) { return gamma(x) - 0.5 * zc.div_zeta(x); };
          double rhs = volume_product(space, gm_half, v, v, qd);
          ScalarField absz;  // 1/2 |zeta.n| v^2 over the whole boundary
          {
            const Mesh& m = space.mesh();
            const QuadRule& erule = edge_rule(qd);
            for (int e = 0; e < m.n_edges(); ++e) {
              const Edge& edge = m.edges[e];
              if (!edge.boundary) continue;
              for (int q = 0; q < erule.size(); ++q) {
                const Vec2 x = map_to_edge(m, e, erule.points[q].x);
                const double w = edge_weight(m, e, erule.weights[q]);
                const double tr = v.evaluate(edge.plus, x);
                rhs += 0.5 * w * std::abs(zc.zeta(x).dot(edge.normal)) * tr * tr;
              }
            }
          }
          worst_ar = std::max(worst_ar,
                              std::abs(lhs_ar - rhs) / std::max(std::abs(rhs), 1e-300));
          const double lhs_upw = lhs_ar + v.coeffs.dot(s_upw * v.coeffs);
          const double rhs_upw = rhs + v.coeffs.dot(s_upw * v.coeffs);
          worst_upw = std::max(worst_upw, std::abs(lhs_upw - rhs_upw) /
                                              std::max(std::abs(rhs_upw), 1e-300));
        }
      }

      // diffusion form identities, sigma 0 and 5
      const ZeroDataGradients grads = build_zero_data_gradients(space, qd);
      const VectorField zeta1 = [](Vec2) { return Vec2{1.0, 1.0}; };
      for (double sigma : {0.0, 5.0}) {
        const PenaltyPolicy pen = PenaltyPolicy::constant(mesh, sigma);
        const SpMat a_d = assemble_dwdg_diffusion(space, pen, grads);
        for (int rep = 0; rep < 25; ++rep) {
          const DGFunction v = random_function(space, rng);
          const DGFunction w = random_function(space, rng);
          const NormReport nv = norm_suite(v, zeta1, 1.0, pen, grads, nullptr, qd);
          const double quad = v.coeffs.dot(a_d * v.coeffs);
          worst_d = std::max(worst_d, std::abs(quad - nv.d * nv.d) /
                                          std::max(nv.d * nv.d, 1e-300));
          const NormReport nw = norm_suite(w, zeta1, 1.0, pen, grads, nullptr, qd);
          const double cross = std::abs(v.coeffs.dot(a_d * w.coeffs));
          const double bound = nv.d * nw.d;
          worst_cs = std::max(worst_cs, bound > 0.0 ? cross / bound : 0.0);
        }
      }
    }
    results.push_back({"convection path equivalence", worst_path <= 1e-11, worst_path, 1e-11,
                       "calculus vs centered-flux matrices, entrywise"});
    results.push_back({"advection-reaction coercivity identity", worst_ar <= 1e-11, worst_ar,
                       1e-11, "quadratic form vs closed form"});
    results.push_back({"upwind coercivity identity", worst_upw <= 1e-11, worst_upw, 1e-11,
                       "quadratic form vs closed form"});
    results.push_back({"diffusion norm identity", worst_d <= 1e-12, worst_d, 1e-12,
                       "a_d(v,v) equals the d-norm squared"});
    results.push_back({"diffusion Cauchy-Schwarz bound", worst_cs <= 1.0 + 1e-9, worst_cs,
                       1.0 + 1e-9, "a_d(v,w) <= |v|_d |w|_d"});
  }

  // affine exactness of the reduced scheme
  {
    const Mesh mesh = generate_structured_rect({0, 0, 1, 1}, 8, 8);
    const DGSpace space(mesh);
    const VectorField zeta = [](Vec2) { return Vec2{1.0, 0.5}; };
    const ScalarField div_zeta = [](Vec2) { return 0.0; };
    const ScalarField gamma = [](Vec2) { return 2.0; };
    const ScalarField exact = [](Vec2 x) { return 0.3 + 1.7 * x.x - 0.4 * x.y; };
    const ScalarField f = [&](Vec2 x) { return 1.0 * 1.7 + 0.5 * (-0.4) + 2.0 * exact(x); };
    const FormMatrices fm = assemble_reduced(space, zeta, div_zeta, gamma, f, exact);
    auto [u, rep] = solve(fm.A_total, fm.rhs);
    const DGFunction uh(space, u);
    const DGFunction ue(space, [&] {
      DGFunction tmp = l2_project(space, exact, 4);
      return tmp.coeffs;
    }());
    const PenaltyPolicy pen = PenaltyPolicy::zero(mesh);
    const ZeroDataGradients grads = build_zero_data_gradients(space, 4);
    DGFunction diff(space, uh.coeffs - ue.coeffs);
    const NormReport nr = norm_suite(diff, zeta, 0.0, pen, grads, nullptr, 4);
    results.push_back({"affine exactness (reduced problem)", nr.upw <= 1e-9, nr.upw, 1e-9,
                       "upwind-norm distance to the affine solution"});
  }

  // inf-sup sweep (dense; full scale only)
  if (scale == ValidateScale::full) {
    const ProblemSpec p = example_boundary_layer();
    double prev = 0.0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int n : {4, 8, 16}) {
      const Mesh mesh = generate_structured_rect(p.domain, n, n);
      const DGSpace space(mesh);
      const PenaltyPolicy pen = PenaltyPolicy::zero(mesh);
      const InfSupEstimate est =
          estimate_infsup(space, p.zeta, p.div_zeta, p.gamma, p.eps, pen);
      if (prev > 0.0) worst_ratio = std::min(worst_ratio, est.value / prev);
      prev = est.value;
    }
    results.push_back({"inf-sup sweep ratio", worst_ratio >= 0.5, worst_ratio, 0.5,
                       "consecutive-level estimate ratio, boundary-layer data"});
  }

  return results;
}

}  // namespace dwdg
