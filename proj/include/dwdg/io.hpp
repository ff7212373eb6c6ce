#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <string>
#include <vector>

#include "dwdg/dg_space.hpp"
#include "dwdg/mesh.hpp"

namespace dwdg {

/// Matrix-market coordinate text format, 1-based indices.
void write_matrix_market(const SpMat& a, std::ostream& out);
void write_matrix_market_file(const SpMat& a, const std::string& path);

void write_vector_file(const Eigen::VectorXd& v, const std::string& path);

/// Legacy-VTK ASCII unstructured grid with duplicated vertices so the
/// per-element point data keeps inter-element discontinuities visible.
void write_vtk(const Mesh& mesh, const DGFunction& u, const std::string& field_name,
               std::ostream& out);
void write_vtk_file(const Mesh& mesh, const DGFunction& u, const std::string& field_name,
                    const std::string& path);

/// (element, local index, coefficient) rows.
void write_coefficients_csv(const DGFunction& u, std::ostream& out);
void write_coefficients_csv_file(const DGFunction& u, const std::string& path);

/// One sample of a 1D solution profile along an axis-aligned line.
struct ProfileSample {
  double t = 0.0;      // coordinate along the line
  double value = 0.0;
  int element = -1;
};

/// Trace of u along the line x_axis = value (axis 0: vertical line x1 = value,
/// axis 1: horizontal line x2 = value). Each crossed element contributes its
/// entry and exit trace values, so jumps appear as doubled sample points.
std::vector<ProfileSample> extract_profile(const DGFunction& u, int axis, double value);

void write_profile_csv(const std::vector<ProfileSample>& profile, std::ostream& out);
void write_profile_csv_file(const std::vector<ProfileSample>& profile, const std::string& path);

}  // namespace dwdg
