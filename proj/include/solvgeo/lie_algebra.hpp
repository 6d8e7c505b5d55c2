#ifndef SOLVGEO_LIE_ALGEBRA_HPP
#define SOLVGEO_LIE_ALGEBRA_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "solvgeo/core.hpp"

namespace solvgeo {

/// One structure constant [e_i, e_j] += c * e_k. Indices are 0-based with i < j;
/// antisymmetry is implicit in the storage.
struct BracketEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double c = 0.0;
};

/// Finite-dimensional real Lie algebra given by structure constants in a fixed basis.
/// Immutable after construction; all member queries are const and thread-safe.
class LieAlgebra {
public:
  LieAlgebra() = default;

  /// Entries may come in any index order; they are canonicalised to i < j
  /// (flipping the sign of c as needed). Throws on bad indices, i == j with
  /// nonzero constant, or duplicate (i,j,k) entries.
  static LieAlgebra from_brackets(std::string name, int dim, std::vector<BracketEntry> entries,
                                  std::optional<std::vector<int>> nilradical = std::nullopt) {
    if (dim <= 0) throw Error(ErrorKind::io, "algebra dimension must be positive");
    LieAlgebra L;
    L.name_ = std::move(name);
    L.dim_ = dim;
    std::set<std::tuple<int, int, int>> seen;
    for (BracketEntry e : entries) {
      if (e.i < 0 || e.i >= dim || e.j < 0 || e.j >= dim || e.k < 0 || e.k >= dim)
        throw Error(ErrorKind::io, "bracket index out of range in algebra '" + L.name_ + "'");
      if (e.i == e.j) throw Error(ErrorKind::io, "bracket [e_i, e_i] must vanish");
      if (e.i > e.j) {
        std::swap(e.i, e.j);
        e.c = -e.c;
      }
      if (!seen.insert({e.i, e.j, e.k}).second)
        throw Error(ErrorKind::io, "duplicate bracket entry (" + std::to_string(e.i + 1) + "," +
                                       std::to_string(e.j + 1) + "," + std::to_string(e.k + 1) + ")");
      if (e.c != 0.0) L.entries_.push_back(e);
    }
    std::sort(L.entries_.begin(), L.entries_.end(), [](const BracketEntry& a, const BracketEntry& b) {
      return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
    });
    L.mu_.assign(dim, Eigen::MatrixXd::Zero(dim, dim));
    for (const BracketEntry& e : L.entries_) {
      L.mu_[e.k](e.i, e.j) += e.c;
      L.mu_[e.k](e.j, e.i) -= e.c;
    }
    if (nilradical) {
      for (int idx : *nilradical)
        if (idx < 0 || idx >= dim) throw Error(ErrorKind::io, "nilradical index out of range");
      std::sort(nilradical->begin(), nilradical->end());
      L.nilradical_ = std::move(nilradical);
    }
    return L;
  }

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const std::vector<BracketEntry>& entries() const { return entries_; }

  /// mu()[k](i,j) = c^k_{ij}, antisymmetric in (i,j).
  const std::vector<Eigen::MatrixXd>& mu() const { return mu_; }

  /// Declared nilradical span (basis indices), when the catalog entry provides one.
  const std::optional<std::vector<int>>& nilradical() const { return nilradical_; }

  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd out(dim_);
    for (int k = 0; k < dim_; ++k) out(k) = x.dot(mu_[k] * y);
    return out;
  }

  /// Matrix of ad(x): column j is [x, e_j].
  Eigen::MatrixXd ad(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd A(dim_, dim_);
    for (int k = 0; k < dim_; ++k) A.row(k) = x.transpose() * mu_[k];
    return A;
  }

  Eigen::MatrixXd ad_basis(int i) const { return ad(Eigen::VectorXd::Unit(dim_, i)); }

private:
  std::string name_;
  int dim_ = 0;
  std::vector<BracketEntry> entries_;
  std::vector<Eigen::MatrixXd> mu_;
  std::optional<std::vector<int>> nilradical_;
};

struct JacobiReport {
  bool pass = true;
  double max_residual = 0.0;
  // 0-based triple attaining the worst residual (valid when max_residual > 0).
  int i = -1, j = -1, l = -1;
};

/// Checks sum_cyc [[e_i,e_j],e_l] = 0 over all triples i<j<l.
inline JacobiReport validate_jacobi(const LieAlgebra& L, double tol = 1e-12) {
  JacobiReport rep;
  const int n = L.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int l = j + 1; l < n; ++l) {
        Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
        Eigen::VectorXd ej = Eigen::VectorXd::Unit(n, j);
        Eigen::VectorXd el = Eigen::VectorXd::Unit(n, l);
        Eigen::VectorXd s = L.bracket(L.bracket(ei, ej), el) + L.bracket(L.bracket(ej, el), ei) +
                            L.bracket(L.bracket(el, ei), ej);
        double r = s.lpNorm<Eigen::Infinity>();
        if (r > rep.max_residual) {
          rep.max_residual = r;
          rep.i = i;
          rep.j = j;
          rep.l = l;
        }
      }
  rep.pass = rep.max_residual <= tol;
  return rep;
}

namespace detail {

/// Orthonormal basis (columns) of the span of the given vectors, via column-pivoted QR.
inline Eigen::MatrixXd span_basis(const Eigen::MatrixXd& vecs, double tol = 1e-10) {
  if (vecs.cols() == 0) return Eigen::MatrixXd(vecs.rows(), 0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vecs);
  qr.setThreshold(tol);
  const int r = static_cast<int>(qr.rank());
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(vecs.rows(), r);
  return Q;
}

}  // namespace detail

struct LowerCentralSeries {
  std::vector<int> dims;  // dim g^1, dim g^2, ... up to stabilisation
  bool nilpotent = false;
};

/// g^1 = g, g^{k+1} = [g, g^k]; nilpotent iff the series reaches 0.
inline LowerCentralSeries lower_central_series(const LieAlgebra& L) {
  LowerCentralSeries out;
  const int n = L.dim();
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  out.dims.push_back(n);
  while (true) {
    const int m = static_cast<int>(term.cols());
    Eigen::MatrixXd gens(n, n * m);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < m; ++c)
        gens.col(i * m + c) = L.bracket(Eigen::VectorXd::Unit(n, i), term.col(c));
    Eigen::MatrixXd next = detail::span_basis(gens);
    out.dims.push_back(static_cast<int>(next.cols()));
    if (next.cols() == 0) {
      out.nilpotent = true;
      break;
    }
    if (next.cols() == term.cols()) {
      out.nilpotent = false;
      break;
    }
    term = next;
  }
  return out;
}

inline bool is_nilpotent(const LieAlgebra& L) { return lower_central_series(L).nilpotent; }

/// tau(E)mu(.,.) = E mu(.,.) - mu(E.,.) - mu(.,E.), returned as a structure tensor
/// in the same layout as LieAlgebra::mu(). Vanishes exactly when E is a derivation.
inline std::vector<Eigen::MatrixXd> tau_action(const Eigen::MatrixXd& E,
                                               const std::vector<Eigen::MatrixXd>& mu) {
  const int n = static_cast<int>(mu.size());
  std::vector<Eigen::MatrixXd> out(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd acc = -E.transpose() * mu[k] - mu[k] * E;
    for (int l = 0; l < n; ++l) acc += E(k, l) * mu[l];
    out[k] = acc;
  }
  return out;
}

inline std::vector<Eigen::MatrixXd> tau_action(const Eigen::MatrixXd& E, const LieAlgebra& L) {
  return tau_action(E, L.mu());
}

inline double tensor_norm(const std::vector<Eigen::MatrixXd>& t) {
  double s = 0.0;
  for (const auto& m : t) s += m.squaredNorm();
  return std::sqrt(s);
}

struct DerivationSpace {
  std::vector<Eigen::MatrixXd> basis;  // orthonormal w.r.t. the entrywise inner product
  int dimension = 0;
};

struct DerivationCheck {
  bool ok = false;
  double residual = 0.0;
};

/// Residual of the derivation identity E[x,y] = [Ex,y] + [x,Ey] over all basis pairs.
inline DerivationCheck is_derivation(const LieAlgebra& L, const Eigen::MatrixXd& E,
                                     double tol = 1e-10) {
  if (E.rows() != L.dim() || E.cols() != L.dim())
    throw Error(ErrorKind::validation, "derivation candidate has wrong dimensions");
  DerivationCheck out;
  out.residual = tensor_norm(tau_action(E, L));
  out.ok = out.residual <= tol;
  return out;
}

/// Nullspace of E -> tau(E)mu as a basis of Der(L).
inline DerivationSpace derivation_space(const LieAlgebra& L) {
  const int n = L.dim();
  const int rows = n * n * (n - 1) / 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(std::max(rows, 1), n * n);
  const auto& mu = L.mu();
  int r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // coefficient of E_{ab} in (tau(E)mu)^k_{ij}
        for (int b = 0; b < n; ++b) A(r, k * n + b) += mu[b](i, j);
        for (int a = 0; a < n; ++a) {
          A(r, a * n + i) -= mu[k](a, j);
          A(r, a * n + j) -= mu[k](i, a);
        }
        ++r;
      }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  double tol = std::max(1e-10, smax * 1e-12);
  DerivationSpace out;
  for (int c = 0; c < svd.matrixV().cols(); ++c) {
    double s = c < sv.size() ? sv(c) : 0.0;
    if (s <= tol) {
      Eigen::Map<const Eigen::MatrixXd> Em(svd.matrixV().col(c).data(), n, n);
      // Map reads column-major: entry (a*n+b) lands at (b,a), so transpose back.
      Eigen::MatrixXd E = Em.transpose();
      out.basis.push_back(E);
    }
  }
  out.dimension = static_cast<int>(out.basis.size());
  return out;
}

/// true iff tr ad(e_i) = 0 for every basis vector.
inline bool unimodularity(const LieAlgebra& L) {
  for (int i = 0; i < L.dim(); ++i)
    if (std::abs(L.ad_basis(i).trace()) > 1e-12) return false;
  return true;
}

/// kappa(x,y) = tr(ad x . ad y).
inline Eigen::MatrixXd killing_form(const LieAlgebra& L) {
  const int n = L.dim();
  std::vector<Eigen::MatrixXd> ads(n);
  for (int i = 0; i < n; ++i) ads[i] = L.ad_basis(i);
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) K(i, j) = K(j, i) = (ads[i] * ads[j]).trace();
  return K;
}

/// One-dimensional extension R xi |x n with [xi, x] = Dx; xi becomes the last basis
/// vector. Requires D in Der(L), which makes the Jacobi identity automatic.
inline LieAlgebra semidirect_extend(const LieAlgebra& L, const Eigen::MatrixXd& D,
                                    const std::string& name = "") {
  auto chk = is_derivation(L, D);
  if (!chk.ok)
    throw Error(ErrorKind::validation,
                "extension matrix is not a derivation (residual " + std::to_string(chk.residual) + ")");
  const int n = L.dim();
  std::vector<BracketEntry> entries = L.entries();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (D(k, i) != 0.0) entries.push_back({i, n, k, -D(k, i)});  // [e_i, xi] = -D e_i
  std::vector<int> nil(n);
  for (int i = 0; i < n; ++i) nil[i] = i;
  return LieAlgebra::from_brackets(name.empty() ? L.name() + "+ext" : name, n + 1,
                                   std::move(entries), nil);
}

struct NiceStructure {
  struct Triple {
    int i, j, k;
    double c;
  };
  bool nice = false;
  std::vector<Triple> triples;   // one per pair (i,j) with nonzero bracket
  std::string failure_witness;   // empty when nice
};

/// A basis is nice when every [e_i,e_j] is a multiple of a single basis vector and
/// pairs feeding the same output index are disjoint.
inline NiceStructure nice_basis_report(const LieAlgebra& L, double tol = 1e-12) {
  NiceStructure out;
  const int n = L.dim();
  const auto& mu = L.mu();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int kfound = -1;
      double c = 0.0;
      for (int k = 0; k < n; ++k) {
        double v = mu[k](i, j);
        if (std::abs(v) > tol) {
          if (kfound >= 0) {
            out.nice = false;
            out.failure_witness = "[e" + std::to_string(i + 1) + ",e" + std::to_string(j + 1) +
                                  "] is not a multiple of a single basis vector";
            return out;
          }
          kfound = k;
          c = v;
        }
      }
      if (kfound >= 0) out.triples.push_back({i, j, kfound, c});
    }
  for (size_t a = 0; a < out.triples.size(); ++a)
    for (size_t b = a + 1; b < out.triples.size(); ++b) {
      const auto& ta = out.triples[a];
      const auto& tb = out.triples[b];
      if (ta.k != tb.k) continue;
      bool disjoint = ta.i != tb.i && ta.i != tb.j && ta.j != tb.i && ta.j != tb.j;
      if (!disjoint) {
        out.nice = false;
        out.failure_witness = "pairs (" + std::to_string(ta.i + 1) + "," + std::to_string(ta.j + 1) +
                              ") and (" + std::to_string(tb.i + 1) + "," + std::to_string(tb.j + 1) +
                              ") share output e" + std::to_string(ta.k + 1);
        return out;
      }
    }
  out.nice = true;
  return out;
}

}  // namespace solvgeo

#endif
