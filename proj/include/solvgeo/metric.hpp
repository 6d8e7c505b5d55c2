#ifndef SOLVGEO_METRIC_HPP
#define SOLVGEO_METRIC_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <optional>

#include "solvgeo/core.hpp"

namespace solvgeo {

/// Positive-definite inner product on the algebra, optionally carrying a
/// factorisation h = q . hbar, meaning h(x,y) = hbar(q^{-1}x, q^{-1}y).
struct MetricTensor {
  Eigen::MatrixXd m;
  std::optional<Eigen::MatrixXd> factor_q;
  std::optional<Eigen::MatrixXd> background;

  int dim() const { return static_cast<int>(m.rows()); }
};

inline bool is_positive_definite(const Eigen::MatrixXd& H, double sym_tol = 1e-10) {
  if (H.rows() != H.cols()) return false;
  if ((H - H.transpose()).lpNorm<Eigen::Infinity>() > sym_tol) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  return llt.info() == Eigen::Success;
}

inline void require_metric(const Eigen::MatrixXd& H) {
  if (!is_positive_definite(H))
    throw Error(ErrorKind::validation, "metric is not symmetric positive-definite");
}

/// Checks the stored invariants: symmetry, positivity, and when a factor is
/// present, h(q., q.) = hbar within tol.
inline void validate_metric(const MetricTensor& h, double tol = 1e-10) {
  require_metric(h.m);
  if (h.factor_q) {
    Eigen::MatrixXd bg = h.background ? *h.background
                                      : Eigen::MatrixXd::Identity(h.dim(), h.dim());
    double dev = (h.factor_q->transpose() * h.m * (*h.factor_q) - bg).norm();
    if (dev > tol)
      throw Error(ErrorKind::validation, "metric factorisation q does not reproduce the background");
  }
}

/// (rho(E)h)(x,y) = -h(Ex,y) - h(x,Ey), as a symmetric matrix.
inline Eigen::MatrixXd rho_action(const Eigen::MatrixXd& E, const Eigen::MatrixXd& H) {
  return -(E.transpose() * H + H * E);
}

/// Columns form an h-orthonormal basis: C^T H C = I.
inline Eigen::MatrixXd orthonormal_frame(const Eigen::MatrixXd& H) {
  require_metric(H);
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  Eigen::MatrixXd L = llt.matrixL();
  return L.transpose()
      .triangularView<Eigen::Upper>()
      .solve(Eigen::MatrixXd::Identity(H.rows(), H.cols()));
}

/// Lower-triangular q with positive diagonal such that q . Id = h, i.e.
/// q^{-T} q^{-1} = H (equivalently q q^T = H^{-1}).
inline Eigen::MatrixXd triangular_factor(const Eigen::MatrixXd& H) {
  require_metric(H);
  Eigen::LLT<Eigen::MatrixXd> llt(H.inverse());
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::validation, "triangular factorisation failed");
  return llt.matrixL();
}

/// Transpose of A with respect to the inner product H.
inline Eigen::MatrixXd transpose_wrt(const Eigen::MatrixXd& A, const Eigen::MatrixXd& H) {
  return H.ldlt().solve(A.transpose() * H);
}

/// GL action on metrics: (q . h)(x,y) = h(q^{-1}x, q^{-1}y).
inline Eigen::MatrixXd metric_action(const Eigen::MatrixXd& q, const Eigen::MatrixXd& H) {
  Eigen::MatrixXd qinv = q.inverse();
  return qinv.transpose() * H * qinv;
}

}  // namespace solvgeo

#endif
