#ifndef SOLVGEO_BETA_HPP
#define SOLVGEO_BETA_HPP

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "solvgeo/curvature.hpp"
#include "solvgeo/lie_algebra.hpp"
#include "solvgeo/minnorm.hpp"

namespace solvgeo {

/// Weight vector of a bracket triple (i,j,k): e_k - e_i - e_j.
inline std::vector<Eigen::VectorXd> weight_vectors(const NiceStructure& N, int dim) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(N.triples.size());
  for (const auto& t : N.triples) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
    a(t.k) += 1.0;
    a(t.i) -= 1.0;
    a(t.j) -= 1.0;
    out.push_back(a);
  }
  return out;
}

/// Stratification label of a nice nilpotent algebra: beta is diagonal in the
/// nice basis, computed as the minimum-norm point of the weight-vector hull.
/// The shift is beta_plus = beta / tr(beta^2) + Id. Abelian algebras take the
/// convention beta_plus = Id (beta itself is left unset).
struct BetaLabel {
  bool abelian = false;
  Eigen::VectorXd beta_diag;       // empty for abelian
  Eigen::VectorXd convex_weights;  // certificate x >= 0, sum = 1
  double qp_residual = 0.0;
  int dim = 0;

  double trace_beta() const { return abelian ? 0.0 : beta_diag.sum(); }
  double trace_beta_sq() const { return abelian ? 0.0 : beta_diag.squaredNorm(); }

  Eigen::MatrixXd beta() const {
    if (abelian) throw Error(ErrorKind::validation, "abelian algebras carry no beta label");
    return beta_diag.asDiagonal();
  }
  Eigen::VectorXd beta_plus_diag() const {
    if (abelian) return Eigen::VectorXd::Ones(dim);
    return (beta_diag / trace_beta_sq()).array() + 1.0;
  }
  Eigen::MatrixXd beta_plus() const { return beta_plus_diag().asDiagonal(); }

  /// Permutation sorting the eigenvalues in non-decreasing order; the matrix
  /// group of the label consists of lower-triangular matrices in this frame.
  std::vector<int> eigen_order() const {
    std::vector<int> perm(dim);
    for (int i = 0; i < dim; ++i) perm[i] = i;
    if (!abelian)
      std::stable_sort(perm.begin(), perm.end(),
                       [&](int a, int b) { return beta_diag(a) < beta_diag(b); });
    return perm;
  }
  Eigen::MatrixXd eigen_perm_matrix() const {
    auto perm = eigen_order();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(dim, dim);
    for (int c = 0; c < dim; ++c) P(perm[c], c) = 1.0;
    return P;
  }
};

/// Computes the label. The background must be the inner product making the nice
/// basis orthogonal (identity by default; diagonal backgrounds are accepted and
/// give the same label). Non-nice algebras are rejected rather than guessed.
inline BetaLabel beta_label(const LieAlgebra& L,
                            const Eigen::MatrixXd& background = Eigen::MatrixXd()) {
  if (!is_nilpotent(L))
    throw Error(ErrorKind::validation, "beta label requires a nilpotent algebra");
  if (background.size() > 0 && !background.isDiagonal(1e-14))
    throw Error(ErrorKind::validation,
                "beta label requires a background diagonal in the nice basis");
  BetaLabel out;
  out.dim = L.dim();
  if (L.entries().empty()) {
    out.abelian = true;
    return out;
  }
  NiceStructure N = nice_basis_report(L);
  if (!N.nice)
    throw Error(ErrorKind::validation,
                "beta label is only computed for nice bases: " + N.failure_witness);
  MinNormResult qp = min_norm_point(weight_vectors(N, L.dim()));
  out.beta_diag = qp.point;
  out.convex_weights = qp.weights;
  out.qp_residual = qp.kkt_residual;
  return out;
}

struct BetaPropertiesReport {
  bool trace_ok = false;        // tr beta = -1
  double trace_dev = 0.0;
  bool shift_identity_ok = false;  // tr beta+ = tr((beta+)^2)
  double shift_identity_dev = 0.0;
  bool positive_ok = false;     // beta+ > 0
  double min_beta_plus = 0.0;
  bool derivation_trace_ok = false;  // tr(D q beta q^{-1}) = 0
  double derivation_trace_max = 0.0;
  bool commutator_ok = false;   // tr([E,E^T] beta) >= 0, equality iff [E,beta] = 0
  double commutator_min = 0.0;
  bool equality_case_ok = false;

  bool all_ok() const {
    return trace_ok && shift_identity_ok && positive_ok && derivation_trace_ok &&
           commutator_ok && equality_case_ok;
  }
};

namespace detail {

inline Eigen::MatrixXd random_lower_triangular(int n, std::mt19937_64& rng, double spread = 0.5,
                                               bool unit_free_diagonal = true) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < r; ++c) E(r, c) = u(rng);
  if (unit_free_diagonal)
    for (int r = 0; r < n; ++r) E(r, r) = u(rng);
  return E;
}

/// Random triangular-group element in the eigen-ordered frame, mapped back to
/// the nice basis: q = P q' P^T with q' lower triangular, positive diagonal.
inline Eigen::MatrixXd random_triangular_group_element(const BetaLabel& B, std::mt19937_64& rng,
                                                       double spread = 0.5) {
  const int n = B.dim;
  Eigen::MatrixXd q = random_lower_triangular(n, rng, spread, false);
  std::uniform_real_distribution<double> u(-spread, spread);
  for (int r = 0; r < n; ++r) q(r, r) = std::exp(u(rng));
  Eigen::MatrixXd P = B.eigen_perm_matrix();
  return P * q * P.transpose();
}

}  // namespace detail

/// Validates the label against its defining algebraic properties with seeded
/// random sampling in the triangular group.
inline BetaPropertiesReport beta_properties_check(const BetaLabel& B, const LieAlgebra& L,
                                                  std::uint64_t seed = 0, int samples = 50) {
  if (B.abelian)
    throw Error(ErrorKind::validation, "beta properties apply to non-abelian labels");
  BetaPropertiesReport rep;
  const int n = B.dim;
  std::mt19937_64 rng(seed);

  rep.trace_dev = std::abs(B.trace_beta() + 1.0);
  rep.trace_ok = rep.trace_dev <= 1e-12;

  Eigen::VectorXd bp = B.beta_plus_diag();
  rep.shift_identity_dev = std::abs(bp.sum() - bp.squaredNorm());
  rep.shift_identity_ok = rep.shift_identity_dev <= 1e-14;

  rep.min_beta_plus = bp.minCoeff();
  rep.positive_ok = rep.min_beta_plus > 0.0;

  Eigen::MatrixXd beta = B.beta();
  DerivationSpace der = derivation_space(L);
  rep.derivation_trace_max = 0.0;
  for (int s = 0; s < std::max(1, samples / 5); ++s) {
    Eigen::MatrixXd q = detail::random_triangular_group_element(B, rng);
    Eigen::MatrixXd conj = q * beta * q.inverse();
    for (const auto& D : der.basis)
      rep.derivation_trace_max = std::max(rep.derivation_trace_max, std::abs((D * conj).trace()));
  }
  rep.derivation_trace_ok = rep.derivation_trace_max <= 1e-9;

  Eigen::MatrixXd P = B.eigen_perm_matrix();
  Eigen::MatrixXd beta_sorted = P.transpose() * beta * P;
  rep.commutator_min = 0.0;
  bool equality_ok = true;
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd E = detail::random_lower_triangular(n, rng);
    Eigen::MatrixXd comm = E * E.transpose() - E.transpose() * E;
    double val = (comm * beta_sorted).trace();
    rep.commutator_min = std::min(rep.commutator_min, val);
    double ebeta = (E * beta_sorted - beta_sorted * E).norm();
    if (ebeta <= 1e-12 && std::abs(val) > 1e-11) equality_ok = false;
    if (ebeta > 1e-6 && val <= 0.0) equality_ok = false;
  }
  rep.commutator_ok = rep.commutator_min >= -1e-12;
  rep.equality_case_ok = equality_ok;
  return rep;
}

struct GitEstimate {
  double value = 0.0;          // tr(Ric(h) q beta+ q^{-1})
  double derivation_residual = 0.0;
  bool conjugate_is_derivation = false;
};

/// Ricci pairing against the conjugated shifted label for h = q . hbar with q
/// in the triangular group of the label; non-negative, vanishing exactly when
/// q beta+ q^{-1} is a derivation.
inline GitEstimate git_estimate_check(const LieAlgebra& L, const BetaLabel& B,
                                      const Eigen::MatrixXd& q) {
  GitEstimate out;
  Eigen::MatrixXd conj = q * B.beta_plus() * q.inverse();
  Eigen::MatrixXd H = metric_action(q, Eigen::MatrixXd::Identity(L.dim(), L.dim()));
  out.value = (ricci_endomorphism(L, H).ricci_endo * conj).trace();
  auto chk = is_derivation(L, conj, 1e-9);
  out.derivation_residual = chk.residual;
  out.conjugate_is_derivation = chk.ok;
  return out;
}

struct NilradicalVerdict {
  Eigen::MatrixXd gram;        // U_{lm} = <alpha_l, alpha_m>
  bool solvable = false;       // U x = 1 admits a solution
  Eigen::VectorXd solution;    // the max-min-coordinate point of the solution set
  bool verdict = false;        // positive solution exists
  bool degenerate = false;     // optimum pinned at zero within tolerance
  double optimum = 0.0;        // max over the solution set of the min coordinate
};

/// Nice-basis criterion: the algebra admits a nilsoliton inner product exactly
/// when U x = [1] has a componentwise-positive solution.
inline NilradicalVerdict einstein_nilradical_criterion(const NiceStructure& N, int dim) {
  NilradicalVerdict out;
  const auto alphas = weight_vectors(N, dim);
  const int m = static_cast<int>(alphas.size());
  if (m == 0) {  // abelian: trivially a soliton
    out.gram = Eigen::MatrixXd(0, 0);
    out.solvable = true;
    out.verdict = true;
    out.optimum = std::numeric_limits<double>::infinity();
    return out;
  }
  out.gram.resize(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) out.gram(a, b) = alphas[a].dot(alphas[b]);
  LpResult lp = max_min_coordinate(out.gram, Eigen::VectorXd::Ones(m));
  out.solvable = lp.feasible;
  if (!lp.feasible) return out;
  out.solution = lp.x;
  out.optimum = lp.optimum;
  if (lp.unbounded || lp.optimum > 1e-9)
    out.verdict = true;
  else if (std::abs(lp.optimum) <= 1e-9)
    out.degenerate = true;
  return out;
}

}  // namespace solvgeo

#endif
