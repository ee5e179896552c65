#include "qmcpde/fem.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qmcpde {

namespace {

double diameter(const Mesh& mesh, const std::array<int, 4>& elem, int nv) {
  double d2 = 0.0;
  for (int a = 0; a < nv; ++a)
    for (int b = a + 1; b < nv; ++b) {
      double acc = 0.0;
      for (int axis = 0; axis < mesh.dim; ++axis) {
        const double diff =
            mesh.vertices[elem[a]][axis] - mesh.vertices[elem[b]][axis];
        acc += diff * diff;
      }
      d2 = std::max(d2, acc);
    }
  return std::sqrt(d2);
}

double compute_h(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& e : mesh.elements)
    h = std::max(h, diameter(mesh, e, mesh.vertices_per_element()));
  return h;
}

// Signed volume factor and constant P1 shape gradients of one simplex.
struct ElementGeometry {
  double volume;
  std::array<std::array<double, 3>, 4> grad;  // grad[vertex][axis]
};

ElementGeometry element_geometry(const Mesh& mesh, int element) {
  const auto& e = mesh.elements[element];
  const auto& p0 = mesh.vertices[e[0]];
  ElementGeometry g{};
  switch (mesh.dim) {
    case 1: {
      const double L = mesh.vertices[e[1]][0] - p0[0];
      g.volume = std::abs(L);
      g.grad[1][0] = 1.0 / L;
      g.grad[0][0] = -1.0 / L;
      break;
    }
    case 2: {
      const auto& p1 = mesh.vertices[e[1]];
      const auto& p2 = mesh.vertices[e[2]];
      const double ax = p1[0] - p0[0], ay = p1[1] - p0[1];
      const double bx = p2[0] - p0[0], by = p2[1] - p0[1];
      const double det = ax * by - ay * bx;
      g.volume = 0.5 * std::abs(det);
      g.grad[1] = {by / det, -bx / det, 0.0};
      g.grad[2] = {-ay / det, ax / det, 0.0};
      for (int axis = 0; axis < 2; ++axis)
        g.grad[0][axis] = -g.grad[1][axis] - g.grad[2][axis];
      break;
    }
    case 3: {
      std::array<std::array<double, 3>, 3> edge;
      for (int i = 0; i < 3; ++i)
        for (int axis = 0; axis < 3; ++axis)
          edge[i][axis] = mesh.vertices[e[i + 1]][axis] - p0[axis];
      auto cross = [](const std::array<double, 3>& u,
                      const std::array<double, 3>& v) {
        return std::array<double, 3>{u[1] * v[2] - u[2] * v[1],
                                     u[2] * v[0] - u[0] * v[2],
                                     u[0] * v[1] - u[1] * v[0]};
      };
      const auto c23 = cross(edge[1], edge[2]);
      const double det =
          edge[0][0] * c23[0] + edge[0][1] * c23[1] + edge[0][2] * c23[2];
      g.volume = std::abs(det) / 6.0;
      const auto c31 = cross(edge[2], edge[0]);
      const auto c12 = cross(edge[0], edge[1]);
      for (int axis = 0; axis < 3; ++axis) {
        g.grad[1][axis] = c23[axis] / det;
        g.grad[2][axis] = c31[axis] / det;
        g.grad[3][axis] = c12[axis] / det;
        g.grad[0][axis] = -g.grad[1][axis] - g.grad[2][axis] - g.grad[3][axis];
      }
      break;
    }
    default:
      throw std::invalid_argument("element_geometry: dim must be 1..3");
  }
  return g;
}

}  // namespace

Mesh structured_mesh(Domain domain, int k) {
  if (k < 1) throw std::invalid_argument("structured_mesh: k must be >= 1");
  Mesh mesh;
  const double h = 1.0 / k;

  auto on_boundary = [k](int idx) { return idx == 0 || idx == k; };

  switch (domain) {
    case Domain::unit_interval: {
      mesh.dim = 1;
      for (int i = 0; i <= k; ++i) {
        mesh.vertices.push_back({i * h, 0.0, 0.0});
        mesh.dirichlet.push_back(on_boundary(i) ? 1 : 0);
      }
      for (int i = 0; i < k; ++i)
        mesh.elements.push_back({i, i + 1, 0, 0});
      break;
    }
    case Domain::unit_square: {
      mesh.dim = 2;
      auto vid = [k](int i, int j) { return i * (k + 1) + j; };
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j) {
          mesh.vertices.push_back({i * h, j * h, 0.0});
          mesh.dirichlet.push_back(on_boundary(i) || on_boundary(j) ? 1 : 0);
        }
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          const int v00 = vid(i, j), v10 = vid(i + 1, j);
          const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
          mesh.elements.push_back({v00, v10, v11, 0});
          mesh.elements.push_back({v00, v11, v01, 0});
        }
      break;
    }
    case Domain::unit_cube: {
      mesh.dim = 3;
      auto vid = [k](int i, int j, int l) {
        return (i * (k + 1) + j) * (k + 1) + l;
      };
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j)
          for (int l = 0; l <= k; ++l) {
            mesh.vertices.push_back({i * h, j * h, l * h});
            mesh.dirichlet.push_back(
                on_boundary(i) || on_boundary(j) || on_boundary(l) ? 1 : 0);
          }
      // Kuhn subdivision: one tetrahedron per axis permutation, walking
      // from the low corner to the high corner of the cell.
      constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                   {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          for (int l = 0; l < k; ++l)
            for (const auto& p : perms) {
              std::array<int, 3> c{i, j, l};
              std::array<int, 4> tet{};
              tet[0] = vid(c[0], c[1], c[2]);
              for (int step = 0; step < 3; ++step) {
                ++c[p[step]];
                tet[step + 1] = vid(c[0], c[1], c[2]);
              }
              mesh.elements.push_back(tet);
            }
      break;
    }
  }
  mesh.h = compute_h(mesh);
  return mesh;
}

double element_volume(const Mesh& mesh, int element) {
  return element_geometry(mesh, element).volume;
}

std::array<double, 3> element_centroid(const Mesh& mesh, int element) {
  const auto& e = mesh.elements[element];
  const int nv = mesh.vertices_per_element();
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (int a = 0; a < nv; ++a)
    for (int axis = 0; axis < mesh.dim; ++axis)
      c[axis] += mesh.vertices[e[a]][axis];
  for (int axis = 0; axis < mesh.dim; ++axis) c[axis] /= nv;
  return c;
}

double multilinear_interpolate(const GridSpec& grid,
                               std::span<const double> values,
                               std::span<const double> x) {
  if (static_cast<int>(x.size()) != grid.dim)
    throw std::invalid_argument("multilinear_interpolate: dimension mismatch");
  if (static_cast<std::int64_t>(values.size()) != grid.num_points())
    throw std::invalid_argument("multilinear_interpolate: values length != M");

  const int d = grid.dim;
  const int m0 = grid.m0;
  std::array<int, 3> cell{0, 0, 0};
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  for (int axis = 0; axis < d; ++axis) {
    double t = x[axis];
    if (t < -1e-12 || t > 1.0 + 1e-12)
      throw std::invalid_argument("multilinear_interpolate: x outside [0,1]^d");
    t = std::clamp(t, 0.0, 1.0) * m0;
    int c = std::min(static_cast<int>(t), m0 - 1);
    cell[axis] = c;
    xi[axis] = t - c;
  }

  double result = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double weight = 1.0;
    std::int64_t flat = 0;
    for (int axis = 0; axis < d; ++axis) {
      const int bit = (corner >> axis) & 1;
      weight *= bit ? xi[axis] : 1.0 - xi[axis];
      flat = flat * (m0 + 1) + cell[axis] + bit;
    }
    result += weight * values[flat];
  }
  return result;
}

double element_coefficient(const GridSpec& grid, std::span<const double> avals,
                           const Mesh& mesh, int element) {
  const auto c = element_centroid(mesh, element);
  const double vol = element_volume(mesh, element);
  return vol * multilinear_interpolate(
                   grid, avals, std::span<const double>(c.data(), mesh.dim));
}

std::vector<double> element_coefficients(const GridSpec& grid,
                                         std::span<const double> avals,
                                         const Mesh& mesh) {
  std::vector<double> coeff(mesh.num_elements());
  for (std::int64_t e = 0; e < mesh.num_elements(); ++e)
    coeff[e] = element_coefficient(grid, avals, mesh, static_cast<int>(e));
  return coeff;
}

FESystem assemble(const Mesh& mesh, std::span<const double> coeff,
                  const SourceFn& f) {
  if (static_cast<std::int64_t>(coeff.size()) != mesh.num_elements())
    throw std::invalid_argument("assemble: one coefficient per element required");

  FESystem sys;
  sys.vertex_count = mesh.num_vertices();
  sys.free_index.assign(mesh.num_vertices(), -1);
  int free_count = 0;
  for (std::int64_t v = 0; v < mesh.num_vertices(); ++v)
    if (!mesh.dirichlet[v]) sys.free_index[v] = free_count++;

  sys.load = Eigen::VectorXd::Zero(free_count);
  std::vector<Eigen::Triplet<double>> triplets;
  const int nv = mesh.vertices_per_element();
  triplets.reserve(mesh.num_elements() * nv * nv);

  for (std::int64_t e = 0; e < mesh.num_elements(); ++e) {
    if (!(coeff[e] > 0.0))
      throw NonpositiveCoefficient("assemble: nonpositive coefficient on element " +
                                   std::to_string(e));
    const ElementGeometry g = element_geometry(mesh, static_cast<int>(e));
    const auto centroid = element_centroid(mesh, static_cast<int>(e));
    const double fc =
        f(std::span<const double>(centroid.data(), mesh.dim)) * g.volume / nv;
    const auto& elem = mesh.elements[e];
    for (int a = 0; a < nv; ++a) {
      const int ra = sys.free_index[elem[a]];
      if (ra < 0) continue;
      sys.load[ra] += fc;
      for (int b = 0; b < nv; ++b) {
        const int rb = sys.free_index[elem[b]];
        if (rb < 0) continue;
        double dot = 0.0;
        for (int axis = 0; axis < mesh.dim; ++axis)
          dot += g.grad[a][axis] * g.grad[b][axis];
        triplets.emplace_back(ra, rb, coeff[e] * dot);
      }
    }
  }

  sys.stiffness.resize(free_count, free_count);
  sys.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

std::vector<double> solve(const FESystem& sys) {
  std::vector<double> nodal(sys.vertex_count, 0.0);
  if (sys.load.size() == 0) return nodal;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.stiffness);
  if (ldlt.info() != Eigen::Success)
    throw SolverBreakdown("solve: factorisation failed (system not SPD?)");
  const Eigen::VectorXd u = ldlt.solve(sys.load);

  const double bnorm = sys.load.norm();
  if (bnorm > 0.0) {
    const double resid = (sys.stiffness * u - sys.load).norm() / bnorm;
    if (!(resid <= 1e-10))
      throw SolverBreakdown("solve: relative residual " + std::to_string(resid));
  }

  for (std::size_t v = 0; v < sys.free_index.size(); ++v)
    if (sys.free_index[v] >= 0) nodal[v] = u[sys.free_index[v]];
  return nodal;
}

std::vector<int> elements_in_box(const Mesh& mesh, std::span<const double> lo,
                                 std::span<const double> hi) {
  if (static_cast<int>(lo.size()) != mesh.dim ||
      static_cast<int>(hi.size()) != mesh.dim)
    throw std::invalid_argument("elements_in_box: box dimension mismatch");
  std::vector<int> region;
  for (std::int64_t e = 0; e < mesh.num_elements(); ++e) {
    const auto c = element_centroid(mesh, static_cast<int>(e));
    bool inside = true;
    for (int axis = 0; axis < mesh.dim; ++axis)
      inside = inside && c[axis] >= lo[axis] - 1e-12 && c[axis] <= hi[axis] + 1e-12;
    if (inside) region.push_back(static_cast<int>(e));
  }
  return region;
}

double qoi_average(const Mesh& mesh, std::span<const double> u,
                   std::span<const int> region) {
  if (region.empty()) throw EmptyRegion("qoi_average: empty element subset");
  if (static_cast<std::int64_t>(u.size()) != mesh.num_vertices())
    throw std::invalid_argument("qoi_average: nodal vector length mismatch");

  const int nv = mesh.vertices_per_element();
  double num = 0.0, den = 0.0;
  for (int e : region) {
    const double vol = element_volume(mesh, e);
    double mean = 0.0;
    for (int a = 0; a < nv; ++a) mean += u[mesh.elements[e][a]];
    mean /= nv;
    num += mean * vol;
    den += vol;
  }
  return num / den;
}

void save_mesh(const Mesh& mesh, std::ostream& os) {
  os << "qmcpde mesh v1\n";
  os << "dim " << mesh.dim << "\n";
  os << "vertices " << mesh.num_vertices() << "\n" << std::hexfloat;
  for (const auto& v : mesh.vertices) {
    for (int axis = 0; axis < mesh.dim; ++axis)
      os << (axis ? " " : "") << v[axis];
    os << "\n";
  }
  os << std::defaultfloat;
  os << "elements " << mesh.num_elements() << "\n";
  for (const auto& e : mesh.elements) {
    for (int a = 0; a < mesh.vertices_per_element(); ++a)
      os << (a ? " " : "") << e[a];
    os << "\n";
  }
  os << "dirichlet\n";
  for (std::int64_t v = 0; v < mesh.num_vertices(); ++v)
    os << (mesh.dirichlet[v] ? 1 : 0) << "\n";
}

Mesh load_mesh(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (line != "qmcpde mesh v1")
    throw std::runtime_error("load_mesh: bad header '" + line + "'");

  auto expect = [&is](const std::string& key) {
    std::string k;
    if (!(is >> k) || k != key)
      throw std::runtime_error("load_mesh: expected '" + key + "'");
  };

  Mesh mesh;
  expect("dim");
  is >> mesh.dim;
  if (mesh.dim < 1 || mesh.dim > 3)
    throw std::runtime_error("load_mesh: dim must be 1..3");

  expect("vertices");
  std::int64_t nv = 0;
  is >> nv;
  mesh.vertices.resize(nv, {0.0, 0.0, 0.0});
  std::string tok;
  for (std::int64_t v = 0; v < nv; ++v)
    for (int axis = 0; axis < mesh.dim; ++axis) {
      if (!(is >> tok)) throw std::runtime_error("load_mesh: truncated vertices");
      mesh.vertices[v][axis] = std::strtod(tok.c_str(), nullptr);
    }

  expect("elements");
  std::int64_t ne = 0;
  is >> ne;
  mesh.elements.resize(ne, {0, 0, 0, 0});
  for (std::int64_t e = 0; e < ne; ++e)
    for (int a = 0; a < mesh.dim + 1; ++a) {
      if (!(is >> mesh.elements[e][a]) || mesh.elements[e][a] < 0 ||
          mesh.elements[e][a] >= nv)
        throw std::runtime_error("load_mesh: bad element vertex index");
    }

  expect("dirichlet");
  mesh.dirichlet.resize(nv);
  for (std::int64_t v = 0; v < nv; ++v) {
    int flag;
    if (!(is >> flag)) throw std::runtime_error("load_mesh: truncated flags");
    mesh.dirichlet[v] = flag ? 1 : 0;
  }
  mesh.h = compute_h(mesh);

  for (std::int64_t e = 0; e < ne; ++e)
    if (!(element_volume(mesh, static_cast<int>(e)) > 0.0))
      throw std::runtime_error("load_mesh: degenerate element " + std::to_string(e));
  return mesh;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_mesh: cannot open " + path);
  return load_mesh(is);
}

}  // namespace qmcpde
