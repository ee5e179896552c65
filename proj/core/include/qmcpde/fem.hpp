#pragma once

#include "qmcpde/grid.hpp"

#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmcpde {

struct NonpositiveCoefficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyRegion : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Conforming simplicial mesh of a box domain inside the unit cube.
/// Homogeneous Dirichlet data: flagged vertices carry u = 0.
struct Mesh {
  int dim = 2;
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 4>> elements;  // dim+1 vertex indices each
  std::vector<char> dirichlet;               // per vertex
  double h = 0.0;                            // max element diameter

  int vertices_per_element() const { return dim + 1; }
  std::int64_t num_elements() const { return static_cast<std::int64_t>(elements.size()); }
  std::int64_t num_vertices() const { return static_cast<std::int64_t>(vertices.size()); }
};

enum class Domain { unit_interval, unit_square, unit_cube };

/// k segments on [0,1]; k x k cells split into 2 triangles (h = sqrt(2)/k);
/// or k^3 cells split into 6 tetrahedra by Kuhn subdivision (h = sqrt(3)/k).
/// All boundary vertices are Dirichlet.
Mesh structured_mesh(Domain domain, int k);

// Minimal structured-text mesh exchange format.
void save_mesh(const Mesh& mesh, std::ostream& os);
Mesh load_mesh(std::istream& is);
Mesh load_mesh(const std::string& path);

double element_volume(const Mesh& mesh, int element);
std::array<double, 3> element_centroid(const Mesh& mesh, int element);

/// Repeated per-axis linear interpolation of grid nodal values at x in
/// [0,1]^d.  Points on cell boundaries use the lower-index cell; the
/// interpolant is continuous either way.
double multilinear_interpolate(const GridSpec& grid,
                               std::span<const double> values,
                               std::span<const double> x);

/// Midpoint-rule element integral of the interpolated coefficient:
/// |tau| * interpolant(centroid).
double element_coefficient(const GridSpec& grid, std::span<const double> avals,
                           const Mesh& mesh, int element);

/// element_coefficient for every element.
std::vector<double> element_coefficients(const GridSpec& grid,
                                         std::span<const double> avals,
                                         const Mesh& mesh);

using SourceFn = std::function<double(std::span<const double>)>;

/// Linear system over the free (non-Dirichlet) vertices.
struct FESystem {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd load;
  std::vector<int> free_index;  // vertex -> row, or -1 for Dirichlet
  std::int64_t vertex_count = 0;
};

/// P1 stiffness with per-element coefficients (coeff[e] integrates the
/// field over the element, so entries are coeff * gradphi_i . grad phi_j)
/// and centroid-rule load f(centroid) |tau| / (d+1) per vertex.
/// Throws NonpositiveCoefficient unless all coeff > 0.
FESystem assemble(const Mesh& mesh, std::span<const double> coeff,
                  const SourceFn& f);

/// Full nodal solution (zeros on Dirichlet vertices); relative residual on
/// the free system is at most 1e-10 or SolverBreakdown is thrown.
std::vector<double> solve(const FESystem& sys);

/// Elements whose centroid lies in the closed box [lo, hi].
std::vector<int> elements_in_box(const Mesh& mesh, std::span<const double> lo,
                                 std::span<const double> hi);

/// Volume-weighted average of the P1 function u over the element subset,
/// midpoint rule per element (u at a centroid = vertex mean).
double qoi_average(const Mesh& mesh, std::span<const double> u,
                   std::span<const int> region);

}  // namespace qmcpde
