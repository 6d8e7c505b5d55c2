#ifndef SOLVGEO_CURVATURE_HPP
#define SOLVGEO_CURVATURE_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "solvgeo/lie_algebra.hpp"
#include "solvgeo/metric.hpp"

namespace solvgeo {

/// Levi-Civita connection of a left-invariant metric in the given frame.
/// gamma[i](k,j) holds Gamma^k_{ij}, i.e. nabla_{e_i} e_j = sum_k Gamma^k_{ij} e_k.
struct ConnectionTable {
  std::vector<Eigen::MatrixXd> gamma;

  Eigen::VectorXd derivative(int i, const Eigen::VectorXd& x) const { return gamma[i] * x; }
};

/// Koszul formula for left-invariant fields:
/// 2 h(nabla_X Y, Z) = h([X,Y],Z) - h([Y,Z],X) + h([Z,X],Y).
inline ConnectionTable koszul_connection(const LieAlgebra& L, const Eigen::MatrixXd& H) {
  require_metric(H);
  const int n = L.dim();
  const auto& mu = L.mu();
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  ConnectionTable table;
  table.gamma.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd rhs(n, n);  // rhs(l, j) = 2 h(nabla_{e_i} e_j, e_l)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd bij(n);
      for (int k = 0; k < n; ++k) bij(k) = mu[k](i, j);
      Eigen::VectorXd Hbij = H * bij;
      for (int l = 0; l < n; ++l) {
        double second = 0.0, third = 0.0;
        for (int k = 0; k < n; ++k) {
          second += mu[k](j, l) * H(k, i);
          third += mu[k](l, i) * H(k, j);
        }
        rhs(l, j) = Hbij(l) - second + third;
      }
    }
    table.gamma[i] = 0.5 * llt.solve(rhs);
  }
  return table;
}

struct CurvatureReport {
  Eigen::MatrixXd ricci_endo;   // Ric(h), h-self-adjoint
  Eigen::MatrixXd ricci_form;   // ric = h(Ric ., .)
  double scal = 0.0;            // tr Ric
  Eigen::VectorXd mean_curvature;  // H with h(H, Y) = tr ad(Y); zero iff unimodular
};

/// Curvature oracle: assembles R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
/// - nabla_{[X,Y]} Z on the frame and traces to the Ricci tensor.
inline CurvatureReport ricci_endomorphism(const LieAlgebra& L, const Eigen::MatrixXd& H) {
  const int n = L.dim();
  ConnectionTable conn = koszul_connection(L, H);
  const auto& mu = L.mu();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXd Rij = conn.gamma[i] * conn.gamma[j] - conn.gamma[j] * conn.gamma[i];
      for (int k = 0; k < n; ++k)
        if (mu[k](i, j) != 0.0) Rij -= mu[k](i, j) * conn.gamma[k];
      ric.row(j) += Rij.row(i);
    }
  // ric(j,l) accumulated as the i-component of R(e_i,e_j)e_l.
  CurvatureReport rep;
  rep.ricci_form = 0.5 * (ric + ric.transpose());  // symmetrise away roundoff
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  rep.ricci_endo = llt.solve(rep.ricci_form);
  rep.scal = rep.ricci_endo.trace();
  Eigen::VectorXd t(n);
  for (int i = 0; i < n; ++i) t(i) = L.ad_basis(i).trace();
  rep.mean_curvature = llt.solve(t);
  return rep;
}

/// GL action on brackets: (q . mu)(x, y) = q mu(q^{-1}x, q^{-1}y).
inline std::vector<Eigen::MatrixXd> gl_action(const Eigen::MatrixXd& q,
                                              const std::vector<Eigen::MatrixXd>& mu) {
  const int n = static_cast<int>(mu.size());
  Eigen::MatrixXd qinv = q.inverse();
  std::vector<Eigen::MatrixXd> pulled(n);
  for (int c = 0; c < n; ++c) pulled[c] = qinv.transpose() * mu[c] * qinv;
  std::vector<Eigen::MatrixXd> out(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < n; ++c)
      if (q(k, c) != 0.0) out[k] += q(k, c) * pulled[c];
  return out;
}

/// Inner product on the space of brackets induced by h, summing components over
/// all ordered index pairs in an h-orthonormal basis.
inline double bracket_inner_product(const std::vector<Eigen::MatrixXd>& muA,
                                    const std::vector<Eigen::MatrixXd>& muB,
                                    const Eigen::MatrixXd& H) {
  const int n = static_cast<int>(muA.size());
  Eigen::MatrixXd C = orthonormal_frame(H);
  Eigen::MatrixXd Cinv = C.inverse();
  std::vector<Eigen::MatrixXd> a = gl_action(Cinv, muA);
  std::vector<Eigen::MatrixXd> b = gl_action(Cinv, muB);
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

inline double bracket_norm_sq(const std::vector<Eigen::MatrixXd>& mu, const Eigen::MatrixXd& H) {
  return bracket_inner_product(mu, mu, H);
}

/// Moment-map pairing (1/4)<<tau(E)mu, mu>>_h; equals tr(Ric(h) E) on nilpotent
/// algebras.
inline double moment_map_ricci(const LieAlgebra& L, const Eigen::MatrixXd& H,
                               const Eigen::MatrixXd& E) {
  if (!is_nilpotent(L))
    throw Error(ErrorKind::validation, "moment-map pairing requires a nilpotent algebra");
  return 0.25 * bracket_inner_product(tau_action(E, L), L.mu(), H);
}

struct VariationCheck {
  double analytic = 0.0;
  double numeric = 0.0;
  double deviation() const { return std::abs(analytic - numeric); }
};

/// First variation of scal at h along rho(E)h: analytic value 2 tr(Ric(h)E)
/// against a central finite difference. Valid for unimodular algebras.
inline VariationCheck scal_variation_check(const LieAlgebra& L, const Eigen::MatrixXd& H,
                                           const Eigen::MatrixXd& E, double step = 1e-5) {
  VariationCheck out;
  out.analytic = 2.0 * (ricci_endomorphism(L, H).ricci_endo * E).trace();
  Eigen::MatrixXd v = rho_action(E, H);
  double plus = ricci_endomorphism(L, H + step * v).scal;
  double minus = ricci_endomorphism(L, H - step * v).scal;
  out.numeric = (plus - minus) / (2.0 * step);
  return out;
}

/// First variation of Ric traced against an h-self-adjoint E along rho(E)h:
/// analytic value -1/2 ||tau(E)mu||^2_h, which is <= 0 with equality exactly on
/// derivations.
inline VariationCheck ric_variation_check(const LieAlgebra& L, const Eigen::MatrixXd& H,
                                          const Eigen::MatrixXd& E, double step = 1e-5) {
  if (!is_nilpotent(L))
    throw Error(ErrorKind::validation, "Ricci variation identity requires a nilpotent algebra");
  if ((H * E - E.transpose() * H).lpNorm<Eigen::Infinity>() > 1e-8)
    throw Error(ErrorKind::validation, "variation direction must be h-self-adjoint");
  VariationCheck out;
  out.analytic = -0.5 * bracket_norm_sq(tau_action(E, L), H);
  Eigen::MatrixXd v = rho_action(E, H);
  Eigen::MatrixXd plus = ricci_endomorphism(L, H + step * v).ricci_endo;
  Eigen::MatrixXd minus = ricci_endomorphism(L, H - step * v).ricci_endo;
  out.numeric = (((plus - minus) / (2.0 * step)) * E).trace();
  return out;
}

/// Ricci form assembled from Killing-field frames at the identity. Killing
/// fields extending the frame are right-invariant, so their brackets carry the
/// opposite sign of the algebra bracket; covariant derivatives come from
/// 2<nabla_X Y, Z> = <[X,Y],Z> + <[X,Z],Y> + <X,[Y,Z]>.
inline Eigen::MatrixXd ricci_via_killing(const LieAlgebra& L, const Eigen::MatrixXd& H) {
  const int n = L.dim();
  Eigen::MatrixXd C = orthonormal_frame(H);
  Eigen::MatrixXd Cinv = C.inverse();
  std::vector<Eigen::MatrixXd> mu = gl_action(Cinv, L.mu());
  // b(i,j,k) = <killing bracket of frame fields i,j, e_k> = -mu^k_{ij}
  auto b = [&](int i, int j, int k) { return -mu[k](i, j); };
  // conn[i](k,j) = <nabla_{e_i} e_j, e_k> for the Killing frame
  std::vector<Eigen::MatrixXd> conn(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        conn[i](k, j) = 0.5 * (b(i, j, k) + b(i, k, j) + b(j, k, i));

  auto kbracket = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) out(k) = -x.dot(mu[k] * y);
    return out;
  };
  auto nabla = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if (x(i) != 0.0) out += x(i) * (conn[i] * y);
    return out;
  };

  Eigen::VectorXd frame_div = Eigen::VectorXd::Zero(n);  // sum_i nabla_{e_i} e_i
  for (int i = 0; i < n; ++i) frame_div += conn[i].col(i);

  auto ric_diag = [&](const Eigen::VectorXd& X) {
    double first = 0.0, grad_sq = 0.0, ad_sq = 0.0;
    Eigen::MatrixXd adX(n, n);
    for (int j = 0; j < n; ++j) adX.col(j) = kbracket(X, Eigen::VectorXd::Unit(n, j));
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
      Eigen::VectorXd dX = nabla(ei, X);
      first += 2.0 * dX.dot(kbracket(X, ei));
      grad_sq += dX.squaredNorm();
      ad_sq += (adX * adX.col(i))(i);
    }
    double fourth = frame_div.dot(nabla(X, X));
    return first + grad_sq - ad_sq - fourth;
  };

  Eigen::MatrixXd ric_on(n, n);
  for (int a = 0; a < n; ++a) ric_on(a, a) = ric_diag(Eigen::VectorXd::Unit(n, a));
  for (int a = 0; a < n; ++a)
    for (int c = a + 1; c < n; ++c) {
      Eigen::VectorXd p = Eigen::VectorXd::Unit(n, a) + Eigen::VectorXd::Unit(n, c);
      Eigen::VectorXd q = Eigen::VectorXd::Unit(n, a) - Eigen::VectorXd::Unit(n, c);
      ric_on(a, c) = ric_on(c, a) = 0.25 * (ric_diag(p) - ric_diag(q));
    }
  // pull the form back to the original frame: ric(x,y) = ric_on(C^{-1}x, C^{-1}y)
  return Cinv.transpose() * ric_on * Cinv;
}

/// Volume-type functional of h relative to the background hbar = Id, determined
/// by the label beta (given by its diagonal in the current basis):
/// v(h) = -sum_i beta_i E_ii / sum_i beta_i^2 for h = exp(E) . hbar with E lower
/// triangular in the eigen-ordered frame. Abelian labels (beta absent) give 0.
inline double beta_volume(const Eigen::MatrixXd& H, const Eigen::VectorXd& beta_diag) {
  const int n = static_cast<int>(H.rows());
  if (beta_diag.size() == 0) return 0.0;  // abelian convention
  if (beta_diag.size() != n)
    throw Error(ErrorKind::validation, "label dimension mismatch in beta-volume");
  require_metric(H);
  // Stable sort of eigenvalues in non-decreasing order fixes the triangular group.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int bp) { return beta_diag(a) < beta_diag(bp); });
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int c = 0; c < n; ++c) P(perm[c], c) = 1.0;
  Eigen::MatrixXd Hp = P.transpose() * H * P;
  Eigen::MatrixXd q = triangular_factor(Hp);
  Eigen::MatrixXd E = q.log();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += beta_diag(perm[i]) * E(i, i);
    den += beta_diag(i) * beta_diag(i);
  }
  return -num / den;
}

}  // namespace solvgeo

#endif
