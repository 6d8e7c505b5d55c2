#include <catch2/catch_amalgamated.hpp>

#include "solvgeo/curvature.hpp"
#include "solvgeo/io.hpp"
#include "solvgeo/sampling.hpp"

using namespace solvgeo;
using Catch::Approx;

namespace {

LieAlgebra catalog(const std::string& name) {
  return load_algebra(std::string(SOLVGEO_CATALOG_DIR) + "/" + name + ".alg");
}

LieAlgebra heisenberg(double c = 1.0) {
  return LieAlgebra::from_brackets("h3", 3, {{0, 1, 2, c}});
}

LieAlgebra affine2() { return LieAlgebra::from_brackets("aff", 2, {{0, 1, 1, 1.0}}); }

Eigen::MatrixXd id(int n) { return Eigen::MatrixXd::Identity(n, n); }

}  // namespace

TEST_CASE("Koszul connection on the flat and Heisenberg frames") {
  auto ab = catalog("abelian3");
  auto flat = koszul_connection(ab, id(3));
  for (const auto& g : flat.gamma) REQUIRE(g.norm() == Approx(0.0).margin(1e-15));

  auto conn = koszul_connection(heisenberg(), id(3));
  // nabla_{e1} e2 = 1/2 e3, nabla_{e1} e3 = -1/2 e2, nabla_{e2} e3 = 1/2 e1
  REQUIRE(conn.gamma[0](2, 1) == Approx(0.5));
  REQUIRE(conn.gamma[0](1, 2) == Approx(-0.5));
  REQUIRE(conn.gamma[1](0, 2) == Approx(0.5));
  REQUIRE(conn.gamma[0](0, 1) == Approx(0.0).margin(1e-15));

  // hyperbolic plane: nabla_{e2} e1 = -e2, nabla_{e2} e2 = e1
  auto hyp = koszul_connection(affine2(), id(2));
  REQUIRE(hyp.gamma[1](1, 0) == Approx(-1.0));
  REQUIRE(hyp.gamma[1](0, 1) == Approx(1.0));
  REQUIRE(hyp.gamma[0](0, 0) == Approx(0.0).margin(1e-15));
  REQUIRE(hyp.gamma[0](1, 1) == Approx(0.0).margin(1e-15));

  Eigen::MatrixXd bad = -id(3);
  REQUIRE_THROWS_AS(koszul_connection(heisenberg(), bad), Error);
}

TEST_CASE("connection is torsion-free and metric-compatible on random metrics") {
  std::mt19937_64 rng(7);
  for (const char* name : {"h3", "n4", "g31iii", "s4"}) {
    auto L = catalog(name);
    Eigen::MatrixXd H = sampling::metric(L.dim(), rng);
    auto conn = koszul_connection(L, H);
    const int n = L.dim();
    for (int i = 0; i < n; ++i) {
      // metric compatibility: Gamma_i^T H + H Gamma_i = 0
      REQUIRE((conn.gamma[i].transpose() * H + H * conn.gamma[i]).norm() <= 1e-10);
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd tors = conn.gamma[i].col(j) - conn.gamma[j].col(i) -
                               L.bracket(Eigen::VectorXd::Unit(n, i), Eigen::VectorXd::Unit(n, j));
        REQUIRE(tors.norm() <= 1e-10);
      }
    }
  }
}

TEST_CASE("Ricci oracle on model spaces") {
  auto ab = ricci_endomorphism(catalog("abelian3"), id(3));
  REQUIRE(ab.ricci_endo.norm() == Approx(0.0).margin(1e-14));

  auto h3 = ricci_endomorphism(heisenberg(), id(3));
  Eigen::Vector3d expected(-0.5, -0.5, 0.5);
  REQUIRE((h3.ricci_endo - Eigen::MatrixXd(expected.asDiagonal())).norm() <= 1e-12);
  REQUIRE(h3.scal == Approx(-0.5));
  REQUIRE(h3.mean_curvature.norm() == Approx(0.0).margin(1e-14));

  auto hyp = ricci_endomorphism(affine2(), id(2));
  REQUIRE((hyp.ricci_endo + id(2)).norm() <= 1e-12);
  // mean curvature: <H, Y> = tr ad(Y), so H = e1 in the orthonormal frame
  REQUIRE(hyp.mean_curvature(0) == Approx(1.0));
  REQUIRE(hyp.mean_curvature(1) == Approx(0.0).margin(1e-14));
}

TEST_CASE("Ricci endomorphism is h-self-adjoint") {
  std::mt19937_64 rng(11);
  for (const char* name : {"h3", "n4", "g31iii", "s4"}) {
    auto L = catalog(name);
    Eigen::MatrixXd H = sampling::metric(L.dim(), rng);
    auto rep = ricci_endomorphism(L, H);
    REQUIRE((H * rep.ricci_endo - rep.ricci_endo.transpose() * H).norm() <= 1e-10);
    REQUIRE(rep.scal == Approx(rep.ricci_endo.trace()));
  }
}

TEST_CASE("rho action") {
  Eigen::MatrixXd H = id(3);
  REQUIRE((rho_action(id(3), H) + 2.0 * H).norm() == Approx(0.0).margin(1e-15));

  Eigen::MatrixXd skew(3, 3);
  skew << 0, 1, 0, -1, 0, 2, 0, -2, 0;
  REQUIRE(rho_action(skew, H).norm() == Approx(0.0).margin(1e-15));

  Eigen::MatrixXd E = Eigen::Vector3d(1, 0, 0).asDiagonal();
  Eigen::MatrixXd expect = Eigen::Vector3d(-2, 0, 0).asDiagonal();
  REQUIRE((rho_action(E, H) - expect).norm() == Approx(0.0).margin(1e-15));
}

TEST_CASE("tau action kernel is the derivation algebra") {
  auto h3 = heisenberg();
  Eigen::MatrixXd D = Eigen::Vector3d(1, 1, 2).asDiagonal();
  REQUIRE(tensor_norm(tau_action(D, h3)) <= 1e-15);

  auto t = tau_action(id(3), h3);  // Id mu - 2 mu = -mu
  for (int k = 0; k < 3; ++k) REQUIRE((t[k] + h3.mu()[k]).norm() <= 1e-15);
}

TEST_CASE("bracket inner product: normalisation, scaling, equivariance") {
  auto h3 = heisenberg();
  REQUIRE(bracket_norm_sq(h3.mu(), id(3)) == Approx(2.0));

  auto h3t = heisenberg(1.7);
  REQUIRE(bracket_norm_sq(h3t.mu(), id(3)) == Approx(2.0 * 1.7 * 1.7));

  // equivariance <<mu,la>>_{q.h} = <<q^{-1}.mu, q^{-1}.la>>_h
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd q =
        trial == 0 ? Eigen::MatrixXd(Eigen::Vector3d(2, 1, 1).asDiagonal())
                   : Eigen::MatrixXd(id(3) + 0.4 * sampling::matrix(3, rng));
    if (std::abs(q.determinant()) < 0.2) continue;
    Eigen::MatrixXd H = sampling::metric(3, rng);
    auto mu2 = gl_action(q.inverse(), h3.mu());
    double lhs = bracket_norm_sq(h3.mu(), metric_action(q, H));
    double rhs = bracket_norm_sq(mu2, H);
    REQUIRE(lhs == Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("moment-map formulation of the Ricci curvature") {
  auto h3 = heisenberg();
  REQUIRE(moment_map_ricci(h3, id(3), id(3)) == Approx(-0.5));

  Eigen::MatrixXd D = Eigen::Vector3d(1, 1, 2).asDiagonal();
  REQUIRE(moment_map_ricci(h3, id(3), D) == Approx(0.0).margin(1e-14));

  std::mt19937_64 rng(5);
  for (const char* name : {"h3", "n4", "g31iii"}) {
    auto L = catalog(name);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::MatrixXd H = sampling::metric(L.dim(), rng);
      Eigen::MatrixXd E = sampling::matrix(L.dim(), rng);
      double lhs = (ricci_endomorphism(L, H).ricci_endo * E).trace();
      double rhs = moment_map_ricci(L, H, E);
      REQUIRE(std::abs(lhs - rhs) <= 1e-10);
    }
  }

  REQUIRE_THROWS_AS(moment_map_ricci(catalog("s4"), id(4), id(4)), Error);
}

TEST_CASE("first variation of the scalar curvature") {
  auto ab = scal_variation_check(catalog("abelian3"), id(3), id(3));
  REQUIRE(ab.analytic == Approx(0.0).margin(1e-14));
  REQUIRE(ab.numeric == Approx(0.0).margin(1e-9));

  auto h3 = scal_variation_check(heisenberg(), id(3), id(3));
  REQUIRE(h3.analytic == Approx(-1.0));
  REQUIRE(h3.deviation() <= 1e-6);

  std::mt19937_64 rng(13);
  auto n4 = catalog("n4");
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd H = sampling::metric(4, rng);
    Eigen::MatrixXd E = sampling::matrix(4, rng);
    REQUIRE(scal_variation_check(n4, H, E).deviation() <= 1e-6);
  }
}

TEST_CASE("first variation of the Ricci endomorphism") {
  auto h3 = heisenberg();
  Eigen::MatrixXd D = Eigen::Vector3d(1, 1, 2).asDiagonal();
  auto der = ric_variation_check(h3, id(3), D);
  REQUIRE(der.analytic == Approx(0.0).margin(1e-14));
  REQUIRE(std::abs(der.numeric) <= 1e-8);

  Eigen::MatrixXd E = Eigen::Vector3d(1, 0, 0).asDiagonal();
  auto strict = ric_variation_check(h3, id(3), E);
  REQUIRE(strict.analytic < -0.1);
  REQUIRE(strict.deviation() <= 1e-6);

  std::mt19937_64 rng(17);
  auto g = catalog("g31iii");
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd H = sampling::metric(7, rng);
    Eigen::MatrixXd Es = sampling::self_adjoint(7, H, rng);
    auto chk = ric_variation_check(g, H, Es);
    REQUIRE(chk.analytic <= 0.0);
    REQUIRE(chk.deviation() <= 1e-6);
  }

  // non-self-adjoint directions are rejected
  Eigen::MatrixXd bad(3, 3);
  bad << 0, 1, 0, 0, 0, 0, 0, 0, 0;
  REQUIRE_THROWS_AS(ric_variation_check(h3, id(3), bad), Error);
}

TEST_CASE("Killing-frame Ricci formula agrees with the oracle") {
  REQUIRE(ricci_via_killing(catalog("abelian3"), id(3)).norm() <= 1e-14);

  Eigen::MatrixXd h3form = ricci_via_killing(heisenberg(), id(3));
  Eigen::Vector3d expected(-0.5, -0.5, 0.5);
  REQUIRE((h3form - Eigen::MatrixXd(expected.asDiagonal())).norm() <= 1e-12);

  Eigen::MatrixXd hyp = ricci_via_killing(affine2(), id(2));
  REQUIRE((hyp + id(2)).norm() <= 1e-12);

  std::mt19937_64 rng(19);
  for (const char* name : {"h3", "n4", "g31iii", "s4", "abelian3"}) {
    auto L = catalog(name);
    for (int trial = 0; trial < 4; ++trial) {
      Eigen::MatrixXd H = sampling::metric(L.dim(), rng);
      Eigen::MatrixXd oracle = ricci_endomorphism(L, H).ricci_form;
      Eigen::MatrixXd killing = ricci_via_killing(L, H);
      REQUIRE((oracle - killing).norm() <= 1e-9);
    }
  }
}

TEST_CASE("beta-volume closed form") {
  Eigen::VectorXd beta(3);
  beta << -1, -1, 1;
  std::mt19937_64 rng(29);

  REQUIRE(beta_volume(id(3), beta) == Approx(0.0).margin(1e-14));
  REQUIRE(beta_volume(sampling::metric(3, rng), Eigen::VectorXd()) == 0.0);

  // h = exp(tE) . hbar with E = diag(1,1,1): slope 1/3
  for (double t : {0.5, 1.0, 2.0}) {
    Eigen::MatrixXd H = std::exp(-2.0 * t) * id(3);
    REQUIRE(beta_volume(H, beta) == Approx(t / 3.0));
  }

  // affine in t for triangular directions
  Eigen::MatrixXd E(3, 3);
  E << 0.3, 0, 0, 0.7, -0.2, 0, -0.4, 0.1, 0.5;
  auto vol_at = [&](double t) {
    Eigen::MatrixXd q = (t * E).exp();
    Eigen::MatrixXd H = metric_action(q, id(3));
    return beta_volume(H, beta);
  };
  double v1 = vol_at(1.0), v2 = vol_at(2.0), vhalf = vol_at(0.5);
  REQUIRE(v2 == Approx(2.0 * v1).epsilon(1e-10));
  REQUIRE(vhalf == Approx(0.5 * v1).epsilon(1e-10));

  // Aut-invariance under diagonal automorphisms of h3: a = diag(a1, a2, a1 a2)
  auto h3 = heisenberg();
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::MatrixXd H = sampling::metric(3, rng);
    std::uniform_real_distribution<double> u(0.4, 2.1);
    double a1 = u(rng), a2 = u(rng);
    Eigen::MatrixXd a = Eigen::Vector3d(a1, a2, a1 * a2).asDiagonal();
    double lhs = beta_volume(metric_action(a, H), beta);
    double rhs = beta_volume(H, beta);
    REQUIRE(lhs == Approx(rhs).epsilon(1e-9).margin(1e-11));
  }
}
