#ifndef SOLVGEO_SOLITON_HPP
#define SOLVGEO_SOLITON_HPP

#include <Eigen/Dense>
#include <cmath>

#include "solvgeo/beta.hpp"
#include "solvgeo/curvature.hpp"
#include "solvgeo/lie_algebra.hpp"
#include "solvgeo/metric.hpp"

namespace solvgeo {

/// Least-squares decomposition Ric(h) = lambda Id + D + residual with D in Der.
/// The residual is evaluated on the determinant-one rescaling of h, so the
/// is_soliton verdict is scale-invariant; lambda and D refer to the input h.
struct SolitonReport {
  double lambda = 0.0;
  Eigen::MatrixXd derivation;
  double residual = 0.0;      // on the det-one normalisation, h-adapted Frobenius norm
  double raw_residual = 0.0;  // at the metric as given (scales like 1/metric-scale)
  bool is_soliton = false;
  double scal = 0.0;
};

inline SolitonReport soliton_residual(const LieAlgebra& L, const Eigen::MatrixXd& H,
                                      double tol = 1e-8) {
  if (!is_nilpotent(L))
    throw Error(ErrorKind::validation, "soliton decomposition requires a nilpotent algebra");
  require_metric(H);
  const int n = L.dim();
  DerivationSpace der = derivation_space(L);

  // Work in an h-orthonormal frame; the fit is then an ordinary Frobenius
  // projection and the same coefficients transport back to the input frame.
  Eigen::MatrixXd C = orthonormal_frame(H);
  Eigen::MatrixXd Cinv = C.inverse();
  CurvatureReport curv = ricci_endomorphism(L, H);
  Eigen::MatrixXd R = Cinv * curv.ricci_endo * C;

  const int cols = 1 + der.dimension;
  Eigen::MatrixXd Amat(n * n, cols);
  Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(n, n);
  Amat.col(0) = Eigen::Map<const Eigen::VectorXd>(Id.data(), n * n);
  for (int d = 0; d < der.dimension; ++d) {
    Eigen::MatrixXd Dt = Cinv * der.basis[d] * C;
    Amat.col(1 + d) = Eigen::Map<const Eigen::VectorXd>(Dt.data(), n * n);
  }
  Eigen::VectorXd rvec = Eigen::Map<const Eigen::VectorXd>(R.data(), n * n);
  Eigen::VectorXd coef = Amat.colPivHouseholderQr().solve(rvec);

  SolitonReport rep;
  rep.scal = curv.scal;
  rep.lambda = coef(0);
  rep.derivation = Eigen::MatrixXd::Zero(n, n);
  for (int d = 0; d < der.dimension; ++d) rep.derivation += coef(1 + d) * der.basis[d];
  rep.raw_residual = (Amat * coef - rvec).norm();
  // the h-adapted residual scales like 1/metric-scale; evaluate at det-one
  rep.residual = rep.raw_residual * std::pow(H.determinant(), 1.0 / n);
  rep.is_soliton = rep.residual <= tol;
  return rep;
}

/// Rescales the structure constants of a nice algebra so the identity metric
/// becomes a nilsoliton normalised to lambda = -1: c_l^2 = 2 x_l for the
/// positive solution x of the criterion system.
inline LieAlgebra nilsoliton_from_nice(const LieAlgebra& L, const NiceStructure& N,
                                       const Eigen::VectorXd& x) {
  if (static_cast<int>(N.triples.size()) != x.size())
    throw Error(ErrorKind::validation, "weight solution size does not match the triple set");
  if (x.size() > 0 && x.minCoeff() <= 0)
    throw Error(ErrorKind::validation, "criterion solution must be componentwise positive");
  std::vector<BracketEntry> entries;
  for (size_t l = 0; l < N.triples.size(); ++l) {
    const auto& t = N.triples[l];
    double sign = t.c >= 0 ? 1.0 : -1.0;
    entries.push_back({t.i, t.j, t.k, sign * std::sqrt(2.0 * x(l))});
  }
  return LieAlgebra::from_brackets(L.name() + "-soliton", L.dim(), entries, L.nilradical());
}

struct FlowResult {
  bool converged = false;
  Eigen::MatrixXd metric;      // final det-one metric
  int iterations = 0;
  double functional = 0.0;     // tr(Ric^2)/scal^2 at the final iterate
  SolitonReport report;
};

/// Fallback soliton search: descend the scale-invariant functional
/// tr(Ric(h)^2)/scal(h)^2 along h -> exp(sE) . h with E the traceless part of
/// Ric(h), keeping determinant-one iterates. The step is measured against the
/// curvature scale (s/|scal|), which keeps the flow clock uniform near
/// degenerate limits. Convergence requires both the det-one residual and the
/// scale-invariant relative residual ||Ric - fit|| / ||Ric|| to be small: the
/// absolute residual alone also vanishes along collapsing directions where no
/// soliton exists. Non-convergence never certifies non-existence.
inline FlowResult nilsoliton_flow(const LieAlgebra& L, Eigen::MatrixXd H, int max_iters = 500,
                                  double tol = 1e-8) {
  if (!is_nilpotent(L) || L.entries().empty())
    throw Error(ErrorKind::validation, "soliton flow requires a non-abelian nilpotent algebra");
  require_metric(H);
  const int n = L.dim();
  auto det_normalize = [&](const Eigen::MatrixXd& M) {
    Eigen::MatrixXd out = M / std::pow(M.determinant(), 1.0 / n);
    return Eigen::MatrixXd(0.5 * (out + out.transpose()));
  };
  auto functional = [&](const Eigen::MatrixXd& M) {
    CurvatureReport c = ricci_endomorphism(L, M);
    return (c.ricci_endo * c.ricci_endo).trace() / (c.scal * c.scal);
  };
  auto converged_at = [&](const SolitonReport& rep, const CurvatureReport& curv) {
    double rel = rep.raw_residual / curv.ricci_endo.norm();
    return rep.residual <= tol && rel <= 1e3 * tol;
  };

  H = det_normalize(H);
  FlowResult out;
  double F = functional(H);
  bool stalled = false;
  for (int it = 0; it < max_iters && !stalled; ++it) {
    out.iterations = it + 1;
    SolitonReport rep = soliton_residual(L, H, tol);
    CurvatureReport curv = ricci_endomorphism(L, H);
    if (converged_at(rep, curv)) {
      out.converged = true;
      out.report = rep;
      break;
    }
    Eigen::MatrixXd E = curv.ricci_endo - (curv.scal / n) * Eigen::MatrixXd::Identity(n, n);
    if (E.norm() < 1e-15) break;
    double s = 0.1 / (-curv.scal);
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, s *= 0.5) {
      Eigen::MatrixXd step = (-s * E).exp();
      Eigen::MatrixXd Hs = det_normalize(step.transpose() * H * step);
      double Fs = functional(Hs);
      if (Fs < F) {
        stalled = (F - Fs) < 1e-14 * std::abs(F);
        H = Hs;
        F = Fs;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no descent at this resolution
  }
  out.metric = H;
  out.functional = F;
  if (!out.converged) {
    out.report = soliton_residual(L, H, tol);
    out.converged = converged_at(out.report, ricci_endomorphism(L, H));
  }
  return out;
}

/// Distance of the fitted derivation from the conjugated shifted label
/// q beta+ q^{-1} after normalising the soliton to lambda = -1. Small exactly
/// at nilsolitons.
inline double soliton_beta_deviation(const LieAlgebra& L, const Eigen::MatrixXd& H,
                                     const SolitonReport& rep, const BetaLabel& B) {
  if (rep.lambda >= 0.0) {
    if (B.abelian) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  // normalise to lambda = -1: h -> (-lambda) h, D -> D / (-lambda)
  Eigen::MatrixXd Hn = (-rep.lambda) * H;
  Eigen::MatrixXd Dn = rep.derivation / (-rep.lambda);
  Eigen::MatrixXd P = B.eigen_perm_matrix();
  Eigen::MatrixXd q = P * triangular_factor(P.transpose() * Hn * P) * P.transpose();
  Eigen::MatrixXd target = q * B.beta_plus() * q.inverse();
  return (Dn - target).norm();
}

}  // namespace solvgeo

#endif
