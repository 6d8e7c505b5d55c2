#include <catch2/catch_amalgamated.hpp>

#include "solvgeo/io.hpp"
#include "solvgeo/lie_algebra.hpp"

using namespace solvgeo;
using Catch::Approx;

namespace {

LieAlgebra catalog(const std::string& name) {
  return load_algebra(std::string(SOLVGEO_CATALOG_DIR) + "/" + name + ".alg");
}

LieAlgebra heisenberg(double c = 1.0) {
  return LieAlgebra::from_brackets("h3", 3, {{0, 1, 2, c}});
}

}  // namespace

TEST_CASE("parsing the bundled catalog") {
  auto h3 = catalog("h3");
  REQUIRE(h3.dim() == 3);
  REQUIRE(h3.entries().size() == 1);

  auto g = catalog("g31iii");
  REQUIRE(g.dim() == 7);
  REQUIRE(g.entries().size() == 5);
  // bracket list: [e1,e2]=e4, [e1,e3]=e5, [e1,e6]=e7, [e2,e5]=e7, [e3,e4]=e7
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(7, 0), e2 = Eigen::VectorXd::Unit(7, 1);
  REQUIRE(g.bracket(e1, e2)(3) == Approx(1.0));

  REQUIRE_THROWS_AS(parse_algebra(R"({"name":"bad","dim":2,"brackets":[{"i":1,"j":2,"k":5,"c":1}]})"),
                    Error);
  REQUIRE_THROWS_AS(
      parse_algebra(
          R"({"name":"dup","dim":3,"brackets":[{"i":1,"j":2,"k":3,"c":1},{"i":2,"j":1,"k":3,"c":1}]})"),
      Error);
  REQUIRE_THROWS_AS(parse_algebra("{not json"), Error);
}

TEST_CASE("canonical storage flips sign for i > j") {
  auto L = LieAlgebra::from_brackets("t", 3, {{1, 0, 2, 1.0}});
  REQUIRE(L.entries()[0].i == 0);
  REQUIRE(L.entries()[0].c == Approx(-1.0));
}

TEST_CASE("Jacobi validation") {
  REQUIRE(validate_jacobi(heisenberg()).pass);
  REQUIRE(validate_jacobi(catalog("g31iii")).pass);
  REQUIRE(validate_jacobi(catalog("s4")).pass);
  REQUIRE(validate_jacobi(catalog("n4")).pass);

  // [e1,e2]=e3, [e1,e3]=e1 violates Jacobi at the triple (1,2,3)
  auto bad = LieAlgebra::from_brackets("bad", 3, {{0, 1, 2, 1.0}, {0, 2, 0, 1.0}});
  auto rep = validate_jacobi(bad);
  REQUIRE_FALSE(rep.pass);
  REQUIRE(rep.i == 0);
  REQUIRE(rep.j == 1);
  REQUIRE(rep.l == 2);
}

TEST_CASE("lower central series") {
  auto lcs = lower_central_series(heisenberg());
  REQUIRE(lcs.dims == std::vector<int>{3, 1, 0});
  REQUIRE(lcs.nilpotent);

  auto ab = lower_central_series(catalog("abelian3"));
  REQUIRE(ab.dims == std::vector<int>{3, 0});
  REQUIRE(ab.nilpotent);

  auto aff = LieAlgebra::from_brackets("aff", 2, {{0, 1, 1, 1.0}});
  auto rep = lower_central_series(aff);
  REQUIRE(rep.dims == std::vector<int>{2, 1, 1});
  REQUIRE_FALSE(rep.nilpotent);

  REQUIRE_FALSE(lower_central_series(catalog("s4")).nilpotent);
}

TEST_CASE("derivation space dimensions") {
  REQUIRE(derivation_space(heisenberg()).dimension == 6);
  REQUIRE(derivation_space(catalog("abelian3")).dimension == 9);

  auto g = catalog("g31iii");
  auto der = derivation_space(g);
  // contains diag(a,b,c,a+b,a+c,b+c,a+b+c) for all a,b,c
  for (auto [a, b, c] : {std::tuple{1.0, 1.0, 1.0}, {1.0, 2.0, -0.5}, {0.3, -0.7, 2.2}}) {
    Eigen::VectorXd d(7);
    d << a, b, c, a + b, a + c, b + c, a + b + c;
    auto chk = is_derivation(g, d.asDiagonal());
    REQUIRE(chk.ok);
  }
  // every basis element returned is itself a derivation
  for (const auto& E : der.basis) REQUIRE(is_derivation(g, E).ok);
}

TEST_CASE("is_derivation examples") {
  Eigen::MatrixXd D = Eigen::Vector3d(1.0, 1.0, 2.0).asDiagonal();
  REQUIRE(is_derivation(heisenberg(), D).ok);
  REQUIRE(is_derivation(catalog("abelian3"), Eigen::MatrixXd::Identity(3, 3)).ok);

  auto chk = is_derivation(heisenberg(), Eigen::MatrixXd::Identity(3, 3));
  REQUIRE_FALSE(chk.ok);  // identity needs d3 = d1 + d2
  REQUIRE(chk.residual > 0.1);

  REQUIRE_THROWS_AS(is_derivation(heisenberg(), Eigen::MatrixXd::Identity(2, 2)), Error);
}

TEST_CASE("unimodularity") {
  REQUIRE(unimodularity(heisenberg()));
  auto aff = LieAlgebra::from_brackets("aff", 2, {{0, 1, 1, 1.0}});
  REQUIRE_FALSE(unimodularity(aff));
  // h3 + R
  auto h3r = LieAlgebra::from_brackets("h3+R", 4, {{0, 1, 2, 1.0}});
  REQUIRE(unimodularity(h3r));
  REQUIRE_FALSE(unimodularity(catalog("s4")));
}

TEST_CASE("Killing form") {
  REQUIRE(killing_form(catalog("abelian3")).norm() == Approx(0.0));
  REQUIRE(killing_form(heisenberg()).norm() == Approx(0.0));

  // sl(2,R) in the basis H, E, F
  auto sl2 = LieAlgebra::from_brackets(
      "sl2", 3, {{0, 1, 1, 2.0}, {0, 2, 2, -2.0}, {1, 2, 0, 1.0}});
  REQUIRE(validate_jacobi(sl2).pass);
  Eigen::MatrixXd K = killing_form(sl2);
  REQUIRE(K(0, 0) == Approx(8.0));
  REQUIRE(K(1, 2) == Approx(4.0));
  REQUIRE(K(1, 1) == Approx(0.0).margin(1e-14));
  REQUIRE(K(2, 2) == Approx(0.0).margin(1e-14));
  REQUIRE(K(0, 1) == Approx(0.0).margin(1e-14));
}

TEST_CASE("nilpotent algebras have zero Killing form and are unimodular") {
  for (const char* name : {"h3", "n4", "g31iii", "abelian3"}) {
    auto L = catalog(name);
    REQUIRE(is_nilpotent(L));
    REQUIRE(killing_form(L).norm() <= 1e-14);
    REQUIRE(unimodularity(L));
  }
}

TEST_CASE("semidirect extension") {
  Eigen::MatrixXd D = Eigen::Vector3d(1.0, 1.0, 2.0).asDiagonal();
  auto ext = semidirect_extend(heisenberg(), D);
  REQUIRE(ext.dim() == 4);
  REQUIRE(validate_jacobi(ext).pass);
  REQUIRE_FALSE(is_nilpotent(ext));
  // restriction to the first dim coordinates reproduces the base brackets
  Eigen::VectorXd e1 = Eigen::VectorXd::Unit(4, 0), e2 = Eigen::VectorXd::Unit(4, 1);
  REQUIRE(ext.bracket(e1, e2)(2) == Approx(1.0));
  // [xi, e_i] = D e_i
  Eigen::VectorXd xi = Eigen::VectorXd::Unit(4, 3);
  REQUIRE(ext.bracket(xi, e1)(0) == Approx(1.0));
  Eigen::VectorXd e3 = Eigen::VectorXd::Unit(4, 2);
  REQUIRE(ext.bracket(xi, e3)(2) == Approx(2.0));

  // abelian R^2 + identity: [xi,e1]=e1, [xi,e2]=e2
  auto ab2 = LieAlgebra::from_brackets("ab2", 2, {});
  auto hyp = semidirect_extend(ab2, Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd f1 = Eigen::VectorXd::Unit(3, 0), fxi = Eigen::VectorXd::Unit(3, 2);
  REQUIRE(hyp.bracket(fxi, f1)(0) == Approx(1.0));

  REQUIRE_THROWS_AS(semidirect_extend(heisenberg(), Eigen::MatrixXd::Identity(3, 3)), Error);
}

TEST_CASE("nice basis report") {
  auto h3rep = nice_basis_report(heisenberg());
  REQUIRE(h3rep.nice);
  REQUIRE(h3rep.triples.size() == 1);
  REQUIRE(h3rep.triples[0].k == 2);

  auto grep = nice_basis_report(catalog("g31iii"));
  REQUIRE(grep.nice);
  REQUIRE(grep.triples.size() == 5);

  // [e1,e2] = e3 + e4 is not nice
  auto L = LieAlgebra::from_brackets("notnice", 4, {{0, 1, 2, 1.0}, {0, 1, 3, 1.0}});
  auto rep = nice_basis_report(L);
  REQUIRE_FALSE(rep.nice);
  REQUIRE(rep.failure_witness.find("[e1,e2]") != std::string::npos);

  // shared output with overlapping pairs: [e1,e2]=e4, [e1,e3]=e4
  auto L2 = LieAlgebra::from_brackets("overlap", 4, {{0, 1, 3, 1.0}, {0, 2, 3, 1.0}});
  REQUIRE_FALSE(nice_basis_report(L2).nice);
}

TEST_CASE("rational reconstruction") {
  auto r = rationalize(2.0 / 3.0);
  REQUIRE(r.has_value());
  REQUIRE(r->num == 2);
  REQUIRE(r->den == 3);
  auto q = rationalize(-1.0 / 3.0);
  REQUIRE(q.has_value());
  REQUIRE(q->num == -1);
  REQUIRE(q->den == 3);
  REQUIRE_FALSE(rationalize(0.1234567890123, 1000000, 1e-12).has_value());
  auto one = rationalize(1.0);
  REQUIRE(one.has_value());
  REQUIRE(one->num == 1);
  REQUIRE(one->den == 1);
}
