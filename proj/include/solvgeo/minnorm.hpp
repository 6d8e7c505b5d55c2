#ifndef SOLVGEO_MINNORM_HPP
#define SOLVGEO_MINNORM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "solvgeo/core.hpp"

namespace solvgeo {

/// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
inline Eigen::VectorXd simplex_project(Eigen::VectorXd v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  for (int i = 0; i < n; ++i) v(i) = std::max(0.0, v(i) - theta);
  return v;
}

struct MinNormResult {
  Eigen::VectorXd point;    // m = sum_l x_l p_l
  Eigen::VectorXd weights;  // x on the simplex
  double kkt_residual = 0.0;
};

/// Minimum-norm point of the convex hull of the given vectors: projected
/// gradient over the simplex followed by an active-set polish of the KKT
/// system. Sized for a few dozen points.
inline MinNormResult min_norm_point(const std::vector<Eigen::VectorXd>& pts,
                                    double tol = 1e-12, int max_pg_iters = 5000) {
  if (pts.empty()) throw Error(ErrorKind::validation, "min_norm_point needs at least one point");
  const int d = static_cast<int>(pts[0].size());
  const int m = static_cast<int>(pts.size());
  Eigen::MatrixXd A(d, m);
  for (int l = 0; l < m; ++l) A.col(l) = pts[l];
  Eigen::MatrixXd G = A.transpose() * A;

  Eigen::VectorXd x = Eigen::VectorXd::Constant(m, 1.0 / m);
  double lip = 2.0 * G.operatorNorm();
  double step = lip > 0 ? 1.0 / lip : 1.0;
  for (int it = 0; it < max_pg_iters; ++it) {
    Eigen::VectorXd grad = 2.0 * (G * x);
    Eigen::VectorXd next = simplex_project(x - step * grad);
    if ((next - x).lpNorm<Eigen::Infinity>() < 1e-14) {
      x = next;
      break;
    }
    x = next;
  }

  // Active-set polish: solve the equality-constrained problem on the support,
  // dropping negative weights and re-adding violated ones until KKT holds.
  auto kkt_resid = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd mpt = A * w;
    double msq = mpt.squaredNorm();
    double worst = 0.0;
    for (int l = 0; l < m; ++l) {
      double slack = pts[l].dot(mpt) - msq;
      if (w(l) > tol)
        worst = std::max(worst, std::abs(slack));
      else
        worst = std::max(worst, std::max(0.0, -slack));
    }
    return worst;
  };

  std::vector<bool> active(m);
  for (int l = 0; l < m; ++l) active[l] = x(l) > 1e-9;
  for (int rounds = 0; rounds < 4 * m + 8; ++rounds) {
    std::vector<int> idx;
    for (int l = 0; l < m; ++l)
      if (active[l]) idx.push_back(l);
    if (idx.empty()) {
      int best = 0;
      double bn = std::numeric_limits<double>::max();
      for (int l = 0; l < m; ++l)
        if (G(l, l) < bn) {
          bn = G(l, l);
          best = l;
        }
      active[best] = true;
      continue;
    }
    const int s = static_cast<int>(idx.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s + 1, s + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) K(a, b) = 2.0 * G(idx[a], idx[b]);
    K.block(s, 0, 1, s).setOnes();
    K.block(0, s, s, 1).setOnes();
    rhs(s) = 1.0;
    Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    Eigen::VectorXd cand = Eigen::VectorXd::Zero(m);
    bool neg = false;
    int worst_l = -1;
    double worst_v = 0.0;
    for (int a = 0; a < s; ++a) {
      cand(idx[a]) = sol(a);
      if (sol(a) < worst_v) {
        worst_v = sol(a);
        worst_l = idx[a];
        neg = true;
      }
    }
    if (neg) {
      active[worst_l] = false;
      continue;
    }
    // check optimality over inactive points
    Eigen::VectorXd mpt = A * cand;
    double msq = mpt.squaredNorm();
    int viol = -1;
    double viol_v = -tol;
    for (int l = 0; l < m; ++l)
      if (!active[l]) {
        double slack = pts[l].dot(mpt) - msq;
        if (slack < viol_v) {
          viol_v = slack;
          viol = l;
        }
      }
    x = cand;
    if (viol < 0) break;
    active[viol] = true;
  }

  x = x.cwiseMax(0.0);
  x /= x.sum();
  MinNormResult out;
  out.weights = x;
  out.point = A * x;
  out.kkt_residual = kkt_resid(x);
  return out;
}

struct LpResult {
  bool feasible = false;
  bool unbounded = false;
  double optimum = 0.0;
  Eigen::VectorXd x;  // argmax (the full coordinate vector on the affine set)
};

namespace detail {

/// Dense big-M primal simplex for: max c^T y s.t. B y <= b, y >= 0.
/// Bland's rule; sized for tiny problems.
inline bool simplex_max(const Eigen::MatrixXd& B, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, Eigen::VectorXd& y, double& val,
                        bool& unbounded) {
  const int mrows = static_cast<int>(B.rows());
  const int nvars = static_cast<int>(B.cols());
  // tableau with slacks s_i: B y + s = b; rows needing artificials get them.
  int nart = 0;
  for (int r = 0; r < mrows; ++r)
    if (b(r) < 0) ++nart;
  const int total = nvars + mrows + nart;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(mrows + 1, total + 1);
  std::vector<int> basis(mrows);
  const double bigM = 1e9;
  int art = 0;
  for (int r = 0; r < mrows; ++r) {
    double sgn = b(r) < 0 ? -1.0 : 1.0;
    for (int ccol = 0; ccol < nvars; ++ccol) T(r, ccol) = sgn * B(r, ccol);
    T(r, nvars + r) = sgn;  // slack
    T(r, total) = sgn * b(r);
    if (b(r) < 0) {
      T(r, nvars + mrows + art) = 1.0;
      basis[r] = nvars + mrows + art;
      ++art;
    } else {
      basis[r] = nvars + r;
    }
  }
  for (int ccol = 0; ccol < nvars; ++ccol) T(mrows, ccol) = -c(ccol);
  for (int a = 0; a < nart; ++a) T(mrows, nvars + mrows + a) = bigM;
  for (int r = 0; r < mrows; ++r)
    if (basis[r] >= nvars + mrows) T.row(mrows) -= bigM * T.row(r);

  unbounded = false;
  for (int iter = 0; iter < 20000; ++iter) {
    int pc = -1;
    for (int ccol = 0; ccol < total; ++ccol)
      if (T(mrows, ccol) < -1e-9) {
        pc = ccol;
        break;  // Bland
      }
    if (pc < 0) break;
    int pr = -1;
    double best = std::numeric_limits<double>::max();
    for (int r = 0; r < mrows; ++r)
      if (T(r, pc) > 1e-12) {
        double ratio = T(r, total) / T(r, pc);
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && (pr < 0 || basis[r] < basis[pr]))) {
          best = ratio;
          pr = r;
        }
      }
    if (pr < 0) {
      unbounded = true;
      return true;
    }
    T.row(pr) /= T(pr, pc);
    for (int r = 0; r <= mrows; ++r)
      if (r != pr && T(r, pc) != 0.0) T.row(r) -= T(r, pc) * T.row(pr);
    basis[pr] = pc;
  }
  for (int r = 0; r < mrows; ++r)
    if (basis[r] >= nvars + mrows && T(r, total) > 1e-7) return false;  // infeasible
  y = Eigen::VectorXd::Zero(nvars);
  for (int r = 0; r < mrows; ++r)
    if (basis[r] < nvars) y(basis[r]) = T(r, total);
  val = c.dot(y);
  return true;
}

}  // namespace detail

/// Maximises min_i x_i over the affine solution set of U x = rhs. Infeasible
/// systems (in the least-squares sense) report feasible = false.
inline LpResult max_min_coordinate(const Eigen::MatrixXd& U, const Eigen::VectorXd& rhs,
                                   double feas_tol = 1e-9) {
  LpResult out;
  const int m = static_cast<int>(U.cols());
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(U);
  Eigen::VectorXd x0 = cod.solve(rhs);
  if ((U * x0 - rhs).lpNorm<Eigen::Infinity>() > feas_tol) return out;
  out.feasible = true;
  // nullspace of U
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(U, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  double tol = std::max(1e-11, smax * 1e-13);
  std::vector<int> null_cols;
  for (int ccol = 0; ccol < svd.matrixV().cols(); ++ccol) {
    double s = ccol < sv.size() ? sv(ccol) : 0.0;
    if (s <= tol) null_cols.push_back(ccol);
  }
  if (null_cols.empty()) {
    out.x = x0;
    out.optimum = x0.minCoeff();
    return out;
  }
  const int kdim = static_cast<int>(null_cols.size());
  Eigen::MatrixXd K(m, kdim);
  for (int a = 0; a < kdim; ++a) K.col(a) = svd.matrixV().col(null_cols[a]);
  // max t s.t. x0 + K z >= t 1; free variables split into positive parts.
  const int nv = 2 * kdim + 2;
  Eigen::MatrixXd B(m, nv);
  Eigen::VectorXd b = x0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
  for (int r = 0; r < m; ++r) {
    for (int a = 0; a < kdim; ++a) {
      B(r, 2 * a) = -K(r, a);
      B(r, 2 * a + 1) = K(r, a);
    }
    B(r, 2 * kdim) = 1.0;
    B(r, 2 * kdim + 1) = -1.0;
  }
  c(2 * kdim) = 1.0;
  c(2 * kdim + 1) = -1.0;
  Eigen::VectorXd y;
  double val = 0.0;
  bool unbounded = false;
  if (!detail::simplex_max(B, b, c, y, val, unbounded)) {
    out.feasible = false;
    return out;
  }
  if (unbounded) {
    out.unbounded = true;
    out.optimum = std::numeric_limits<double>::infinity();
    out.x = x0;
    return out;
  }
  Eigen::VectorXd z(kdim);
  for (int a = 0; a < kdim; ++a) z(a) = y(2 * a) - y(2 * a + 1);
  out.x = x0 + K * z;
  out.optimum = out.x.minCoeff();
  return out;
}

}  // namespace solvgeo

#endif
