#include "dwdg/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace dwdg {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_matrix_market(const SpMat& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << " " << a.cols() << " " << a.nonZeros() << "\n";
  out.precision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

void write_matrix_market_file(const SpMat& a, const std::string& path) {
  auto out = open_out(path);
  write_matrix_market(a, out);
}

void write_vector_file(const Eigen::VectorXd& v, const std::string& path) {
  auto out = open_out(path);
  out.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << "\n";
}

void write_vtk(const Mesh& mesh, const DGFunction& u, const std::string& field_name,
               std::ostream& out) {
  const int nt = mesh.n_elements();
  out << "# vtk DataFile Version 3.0\n";
  out << "dwdg solution\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 3 * nt << " double\n";
  out.precision(12);
  for (int t = 0; t < nt; ++t)
    for (int l = 0; l < 3; ++l) {
      const Vec2 p = mesh.vertex(t, l);
      out << p.x << " " << p.y << " 0\n";
    }
  out << "CELLS " << nt << " " << 4 * nt << "\n";
  for (int t = 0; t < nt; ++t)
    out << "3 " << 3 * t << " " << 3 * t + 1 << " " << 3 * t + 2 << "\n";
  out << "CELL_TYPES " << nt << "\n";
  for (int t = 0; t < nt; ++t) out << "5\n";
  out << "POINT_DATA " << 3 * nt << "\n";
  out << "SCALARS " << field_name << " double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t)
    for (int l = 0; l < 3; ++l) out << u.coeffs[DGSpace::dof(t, l)] << "\n";
}

void write_vtk_file(const Mesh& mesh, const DGFunction& u, const std::string& field_name,
                    const std::string& path) {
  auto out = open_out(path);
  write_vtk(mesh, u, field_name, out);
}

void write_coefficients_csv(const DGFunction& u, std::ostream& out) {
  out << "element,local,coefficient\n";
  out.precision(17);
  const int nt = u.space->mesh().n_elements();
  for (int t = 0; t < nt; ++t)
    for (int l = 0; l < 3; ++l) out << t << "," << l << "," << u.coeffs[DGSpace::dof(t, l)] << "\n";
}

void write_coefficients_csv_file(const DGFunction& u, const std::string& path) {
  auto out = open_out(path);
  write_coefficients_csv(u, out);
}

std::vector<ProfileSample> extract_profile(const DGFunction& u, int axis, double value) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("extract_profile: axis must be 0 or 1");
  const Mesh& mesh = u.space->mesh();
  std::vector<ProfileSample> samples;

  // Points on the line are (value, t) for axis 0 or (t, value) for axis 1.
  // Each barycentric coordinate is affine in t; intersect the three
  // half-planes lambda_i(t) >= 0 to get the in-element parameter interval.
  for (int el = 0; el < mesh.n_elements(); ++el) {
    auto point_at = [&](double t) { return axis == 0 ? Vec2{value, t} : Vec2{t, value}; };
    const double t_ref0 = axis == 0 ? mesh.domain.y0 : mesh.domain.x0;
    const double t_ref1 = axis == 0 ? mesh.domain.y1 : mesh.domain.x1;
    const auto lam0 = u.space->barycentric(el, point_at(t_ref0));
    const auto lam1 = u.space->barycentric(el, point_at(t_ref1));
    double lo = t_ref0, hi = t_ref1;
    bool empty = false;
    for (int i = 0; i < 3 && !empty; ++i) {
      const double a = lam0[i];
      const double b = (lam1[i] - lam0[i]) / (t_ref1 - t_ref0);  // lambda_i = a + b (t - t0)
      if (std::abs(b) < 1e-14) {
        if (a < -1e-12) empty = true;
        continue;
      }
      const double root = t_ref0 - a / b;
      if (b > 0.0)
        lo = std::max(lo, root);
      else
        hi = std::min(hi, root);
    }
    if (empty || hi - lo < 1e-12 * (t_ref1 - t_ref0)) continue;
    samples.push_back({lo, u.evaluate(el, point_at(lo)), el});
    samples.push_back({hi, u.evaluate(el, point_at(hi)), el});
  }

  std::sort(samples.begin(), samples.end(), [](const ProfileSample& a, const ProfileSample& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.element < b.element;
  });
  return samples;
}

void write_profile_csv(const std::vector<ProfileSample>& profile, std::ostream& out) {
  out << "t,value,element\n";
  out.precision(17);
  for (const ProfileSample& s : profile)
    out << s.t << "," << s.value << "," << s.element << "\n";
}

void write_profile_csv_file(const std::vector<ProfileSample>& profile, const std::string& path) {
  auto out = open_out(path);
  write_profile_csv(profile, out);
}

}  // namespace dwdg
