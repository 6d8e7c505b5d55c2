#ifndef SOLVGEO_SAMPLING_HPP
#define SOLVGEO_SAMPLING_HPP

#include <Eigen/Dense>
#include <random>

namespace solvgeo {

/// Seeded draws used by randomized property checks; kept well-conditioned so
/// numeric tolerances stay meaningful.
namespace sampling {

inline Eigen::MatrixXd matrix(int n, std::mt19937_64& rng, double spread = 1.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Eigen::MatrixXd M(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) M(r, c) = u(rng);
  return M;
}

/// SPD matrix of moderate condition number: (I + 0.3 G)(I + 0.3 G)^T.
inline Eigen::MatrixXd metric(int n, std::mt19937_64& rng, double spread = 0.3) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n) + spread * matrix(n, rng, 1.0);
  return L * L.transpose();
}

/// Symmetric matrix w.r.t. the inner product H: E = H^{-1} S with S symmetric.
inline Eigen::MatrixXd self_adjoint(int n, const Eigen::MatrixXd& H, std::mt19937_64& rng,
                                    double spread = 1.0) {
  Eigen::MatrixXd S = matrix(n, rng, spread);
  S = 0.5 * (S + S.transpose()).eval();
  return H.ldlt().solve(S);
}

}  // namespace sampling
}  // namespace solvgeo

#endif
