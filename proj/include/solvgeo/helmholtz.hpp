#ifndef SOLVGEO_HELMHOLTZ_HPP
#define SOLVGEO_HELMHOLTZ_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <vector>

#include "solvgeo/core.hpp"

namespace solvgeo {

/// Connected weighted graph with positive vertex measures; the discretisation
/// carrier for the drift-diffusion kernel problem.
struct FluxGraph {
  struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;
  };
  std::vector<double> measure;  // one per vertex, > 0
  std::vector<Edge> edges;      // undirected, stored once with orientation u -> v

  int vertex_count() const { return static_cast<int>(measure.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
};

/// Antisymmetric edge values: the stored number is X_{uv} for the stored
/// orientation, and X_{vu} = -X_{uv} by construction.
struct EdgeField {
  std::vector<double> value;  // aligned with FluxGraph::edges
};

inline void validate_graph(const FluxGraph& G) {
  const int n = G.vertex_count();
  if (n == 0) throw Error(ErrorKind::validation, "graph has no vertices");
  for (double m : G.measure)
    if (!(m > 0)) throw Error(ErrorKind::validation, "vertex measures must be positive");
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : G.edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n || e.u == e.v)
      throw Error(ErrorKind::validation, "edge endpoints out of range");
    if (!(e.w > 0)) throw Error(ErrorKind::validation, "edge weights must be positive");
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  if (count != n) throw Error(ErrorKind::validation, "graph must be connected");
}

/// Periodic 4-neighbour grid on the flat torus. Vertex measures are the cell
/// area h^2 and edge weights m/h^2, so div(grad .) is consistent with the
/// flat Laplace-Beltrami operator.
inline FluxGraph build_torus_grid(int nx, int ny, double spacing) {
  if (nx < 2 || ny < 2) throw Error(ErrorKind::validation, "torus grid needs nx, ny >= 2");
  if (!(spacing > 0)) throw Error(ErrorKind::validation, "torus spacing must be positive");
  FluxGraph G;
  G.measure.assign(static_cast<size_t>(nx) * ny, spacing * spacing);
  auto id = [&](int x, int y) { return (y % ny) * nx + (x % nx); };
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      G.edges.push_back({id(x, y), id(x + 1, y), 1.0});  // m / h^2
      G.edges.push_back({id(x, y), id(x, y + 1), 1.0});
    }
  return G;
}

/// (grad f)_{uv} = f_v - f_u on the stored orientation.
inline EdgeField discrete_grad(const FluxGraph& G, const std::vector<double>& f) {
  EdgeField out;
  out.value.reserve(G.edges.size());
  for (const auto& e : G.edges) out.value.push_back(f[e.v] - f[e.u]);
  return out;
}

/// (div Y)_u = (1/m_u) sum_{v ~ u} w_{uv} Y_{uv}; adjoint to -grad under the
/// measure-weighted vertex pairing.
inline std::vector<double> discrete_div(const FluxGraph& G, const EdgeField& Y) {
  std::vector<double> out(G.measure.size(), 0.0);
  for (size_t e = 0; e < G.edges.size(); ++e) {
    const auto& ed = G.edges[e];
    out[ed.u] += ed.w * Y.value[e];
    out[ed.v] -= ed.w * Y.value[e];
  }
  for (size_t u = 0; u < out.size(); ++u) out[u] /= G.measure[u];
  return out;
}

namespace detail {

/// Matrix of v -> div(grad v + vbar X) with arithmetic edge means vbar.
inline Eigen::SparseMatrix<double> drift_operator(const FluxGraph& G, const EdgeField& X) {
  const int n = G.vertex_count();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(G.edges.size() * 4 + n);
  for (size_t e = 0; e < G.edges.size(); ++e) {
    const auto& ed = G.edges[e];
    const double x = X.value[e];
    // contribution to row u: w[(v_v - v_u) + (v_u + v_v)/2 x]
    trips.emplace_back(ed.u, ed.v, ed.w * (1.0 + 0.5 * x) / G.measure[ed.u]);
    trips.emplace_back(ed.u, ed.u, ed.w * (0.5 * x - 1.0) / G.measure[ed.u]);
    // row v sees the reversed orientation: X_{vu} = -x
    trips.emplace_back(ed.v, ed.u, ed.w * (1.0 - 0.5 * x) / G.measure[ed.v]);
    trips.emplace_back(ed.v, ed.v, ed.w * (-0.5 * x - 1.0) / G.measure[ed.v]);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

struct KernelPair {
  Eigen::VectorXd v;
  double sigma_min = 0.0;     // ~ ||A v||
  double sigma_second = 0.0;  // second-smallest singular value estimate
};

inline KernelPair kernel_dense(const Eigen::SparseMatrix<double>& A) {
  Eigen::MatrixXd Ad(A);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Ad, Eigen::ComputeFullV);
  const int n = static_cast<int>(Ad.rows());
  KernelPair out;
  out.v = svd.matrixV().col(n - 1);
  out.sigma_min = svd.singularValues()(n - 1);
  out.sigma_second = svd.singularValues()(n - 2);
  if (!out.v.allFinite()) {  // rank-deficient corner case of the divide-and-conquer SVD
    Eigen::JacobiSVD<Eigen::MatrixXd> jsvd(Ad, Eigen::ComputeFullV);
    out.v = jsvd.matrixV().col(n - 1);
    out.sigma_min = jsvd.singularValues()(n - 1);
    out.sigma_second = jsvd.singularValues()(n - 2);
  }
  return out;
}

inline KernelPair kernel_iterative(const Eigen::SparseMatrix<double>& A, int max_iters = 400) {
  const int n = static_cast<int>(A.rows());
  Eigen::SparseMatrix<double> B = Eigen::SparseMatrix<double>(A.transpose()) * A;
  double scale = 0.0;
  for (int k = 0; k < B.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(B + (scale * 1e-14) * I);
  if (chol.info() != Eigen::Success)
    throw Error(ErrorKind::nonconvergence, "kernel solve factorisation failed");

  KernelPair out;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd y = chol.solve(x);
    y.normalize();
    if ((y - x).norm() < 1e-15 && it > 2) {
      x = y;
      break;
    }
    x = y;
  }
  out.v = x;
  out.sigma_min = (A * x).norm();

  Eigen::VectorXd z = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) z(i) += 1e-3 * std::sin(1.0 + 7.0 * i);
  z -= z.dot(x) * x;
  z.normalize();
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd y = chol.solve(z);
    y -= y.dot(x) * x;
    y.normalize();
    if ((y - z).norm() < 1e-13 && it > 2) {
      z = y;
      break;
    }
    z = y;
  }
  out.sigma_second = (A * z).norm();
  return out;
}

}  // namespace detail

struct KernelResult {
  std::vector<double> v;       // positive, normalised to max = 1
  double residual = 0.0;       // ||L v||_inf
  double sigma_second = 0.0;   // kernel-simplicity margin
  int kernel_dimension = 1;
};

/// Sign-definite kernel of v -> div(grad v + vbar X). The kernel must be
/// one-dimensional (second singular value above 1e-8) and the normalised
/// solution strictly positive; anything else reports a discretisation failure.
inline KernelResult modified_helmholtz_kernel(const FluxGraph& G, const EdgeField& X) {
  validate_graph(G);
  if (X.value.size() != G.edges.size())
    throw Error(ErrorKind::validation, "edge field does not match the graph");
  Eigen::SparseMatrix<double> A = detail::drift_operator(G, X);
  const int n = G.vertex_count();
  detail::KernelPair kp = n < 2000 ? detail::kernel_dense(A) : detail::kernel_iterative(A);

  KernelResult out;
  out.sigma_second = kp.sigma_second;
  if (kp.sigma_second <= 1e-8) {
    out.kernel_dimension = 2;  // at least
    throw Error(ErrorKind::nonconvergence,
                "kernel is not one-dimensional: discretisation failure");
  }
  Eigen::VectorXd v = kp.v;
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  v /= v(imax);
  if (v.minCoeff() <= 0)
    throw Error(ErrorKind::nonconvergence, "kernel vector is not sign-definite");
  Eigen::VectorXd Lv = A * v;
  out.residual = Lv.lpNorm<Eigen::Infinity>();
  if (out.residual > 1e-10 * v.norm())
    throw Error(ErrorKind::nonconvergence, "kernel solve did not converge");
  out.v.assign(v.data(), v.data() + n);
  return out;
}

struct HelmholtzDecomposition {
  std::vector<double> v;      // positive vertex function, max = 1
  EdgeField x0;               // div(vbar x0) = 0
  double kernel_residual = 0.0;
  double div_residual = 0.0;  // ||div(vbar x0)||_inf
  double sigma_second = 0.0;
  int kernel_dimension = 1;
};

/// Splits X = -grad(v)/vbar + X0 at the flux level: X0 := grad(v)/vbar + X,
/// which makes div(vbar X0) vanish identically up to the kernel residual.
inline HelmholtzDecomposition helmholtz_decompose(const FluxGraph& G, const EdgeField& X) {
  KernelResult ker = modified_helmholtz_kernel(G, X);
  HelmholtzDecomposition out;
  out.v = ker.v;
  out.kernel_residual = ker.residual;
  out.sigma_second = ker.sigma_second;
  out.kernel_dimension = ker.kernel_dimension;
  out.x0.value.resize(G.edges.size());
  EdgeField weighted;  // vbar X0
  weighted.value.resize(G.edges.size());
  for (size_t e = 0; e < G.edges.size(); ++e) {
    const auto& ed = G.edges[e];
    double vbar = 0.5 * (ker.v[ed.u] + ker.v[ed.v]);
    double grad = ker.v[ed.v] - ker.v[ed.u];
    out.x0.value[e] = grad / vbar + X.value[e];
    weighted.value[e] = grad + vbar * X.value[e];
  }
  double dv = 0.0;
  for (double d : discrete_div(G, weighted)) dv = std::max(dv, std::abs(d));
  out.div_residual = dv;
  return out;
}

}  // namespace solvgeo

#endif
