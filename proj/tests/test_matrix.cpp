#include <catch2/catch_amalgamated.hpp>

#include "qpencil/fixtures.hpp"
#include "qpencil/matrix.hpp"

using namespace qpencil;

namespace {

double eigen_residual(const CMatrix& a, const EigenResult& e) {
  int n = a.rows;
  CMatrix av = a * e.vectors;
  CMatrix vl = e.vectors;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) vl.at(i, j) *= e.values[static_cast<size_t>(j)];
  return (av - vl).frob();
}

}  // namespace

TEST_CASE("hermitian_eigen solves a 2x2 with complex off-diagonal") {
  CMatrix a(2, 2);
  a.at(0, 0) = 2.0;
  a.at(0, 1) = cplx(0.0, 1.0);
  a.at(1, 0) = cplx(0.0, -1.0);
  a.at(1, 1) = 2.0;
  EigenResult e = hermitian_eigen(a);
  REQUIRE(e.values.size() == 2);
  CHECK(e.values[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(e.values[1] == Catch::Approx(3.0).margin(1e-12));
  CHECK(eigen_residual(a, e) < 1e-12);
  CHECK(unitary_residual(e.vectors) < 1e-12);
}

TEST_CASE("hermitian_eigen handles seeded dense matrices") {
  for (uint64_t seed : {11u, 12u, 13u}) {
    Xorshift64Star rng(seed);
    CMatrix a = random_hermitian(rng, 6);
    EigenResult e = hermitian_eigen(a);
    for (size_t i = 1; i < e.values.size(); ++i) CHECK(e.values[i - 1] <= e.values[i]);
    CHECK(eigen_residual(a, e) < 1e-10 * (1.0 + a.frob()));
    CHECK(unitary_residual(e.vectors) < 1e-10);
  }
}

TEST_CASE("hermitian_eigen rejects non-self-adjoint input") {
  CMatrix a(2, 2);
  a.at(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eigen(a), InputError);
  CHECK_THROWS_AS(hermitian_eigen(CMatrix(2, 3)), InputError);
}

TEST_CASE("repeated eigenvalues still give orthonormal vectors") {
  Xorshift64Star rng(77);
  CMatrix u = random_unitary(rng, 4);
  // spectrum {1, 1, 1, 2}: a three-fold cluster
  CMatrix d = CMatrix::diag({cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0)});
  CMatrix a = u * d * u.adjoint();
  EigenResult e = hermitian_eigen(a);
  CHECK(unitary_residual(e.vectors) < 1e-10);
  CHECK(eigen_residual(a, e) < 1e-10);
  CHECK(e.values[2] == Catch::Approx(1.0).margin(1e-10));
  CHECK(e.values[3] == Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("orthonormalize produces an isometry preserving the span") {
  Xorshift64Star rng(5);
  CMatrix v = random_matrix(rng, 5, 3);
  CMatrix q = orthonormalize(v);
  CHECK((q.adjoint() * q - CMatrix::identity(3)).frob() < 1e-13);
  // each original column must lie in the span of q
  CMatrix proj = q * q.adjoint();
  CHECK((proj * v - v).frob() < 1e-12 * (1.0 + v.frob()));
}

TEST_CASE("orthonormalize names the dependent column") {
  CMatrix v(3, 2);
  v.at(0, 0) = 1.0;
  v.at(0, 1) = 1.0;  // same direction as column 0
  try {
    orthonormalize(v);
    FAIL("expected DependentColumnError");
  } catch (const DependentColumnError& e) {
    CHECK(e.column == 1);
  }
}

TEST_CASE("unitary_residual distinguishes unitaries from the rest") {
  CHECK(unitary_residual(CMatrix::identity(3)) == 0.0);
  Xorshift64Star rng(9);
  CHECK(unitary_residual(random_unitary(rng, 4)) < 1e-13);
  CMatrix two = CMatrix::identity(2) * cplx(2.0, 0.0);
  CHECK(unitary_residual(two) > 1.0);
  CHECK_THROWS_AS(unitary_residual(CMatrix(2, 3)), InputError);
}

TEST_CASE("inverse and determinant on small matrices") {
  CMatrix a(2, 2);
  a.at(0, 0) = 1.0;
  a.at(0, 1) = 2.0;
  a.at(1, 0) = 3.0;
  a.at(1, 1) = 4.0;
  CHECK(std::abs(det_numeric(a) - cplx(-2.0, 0.0)) < 1e-14);
  CHECK((inverse(a) * a - CMatrix::identity(2)).frob() < 1e-13);
  CHECK(std::abs(det_numeric(CMatrix::diag({cplx(2.0, 0.0), cplx(3.0, 0.0)})) -
                 cplx(6.0, 0.0)) < 1e-14);

  CMatrix s(2, 2);  // rank one, exactly singular
  s.at(0, 0) = 1.0;
  s.at(0, 1) = 2.0;
  s.at(1, 0) = 2.0;
  s.at(1, 1) = 4.0;
  CHECK_THROWS_AS(det_numeric(s), NumericalError);
  CHECK_THROWS_AS(inverse(s), NumericalError);
}

TEST_CASE("lu_solve reproduces known solutions") {
  Xorshift64Star rng(21);
  CMatrix a = random_matrix(rng, 5, 5);
  CMatrix x = random_matrix(rng, 5, 2);
  CMatrix b = a * x;
  CMatrix got = lu_solve(lu_factor(a), b);
  CHECK((got - x).frob() < 1e-11 * (1.0 + x.frob()));
  CHECK_THROWS_AS(lu_solve(lu_factor(a), CMatrix(4, 1)), InputError);
}

TEST_CASE("hermitian_part symmetrizes and fixtures stay deterministic") {
  Xorshift64Star rng(3);
  CMatrix m = random_matrix(rng, 4, 4);
  CHECK(hermitian_deviation(hermitian_part(m)) < 1e-15);

  Xorshift64Star r1(123), r2(123);
  CMatrix a = random_projection(r1, 4, 2);
  CMatrix b = random_projection(r2, 4, 2);
  CHECK((a - b).frob() == 0.0);
  CHECK((a * a - a).frob() < 1e-13);
  CHECK(std::abs(a.trace() - cplx(2.0, 0.0)) < 1e-13);
  CHECK((random_projection(r1, 3, 0)).frob() == 0.0);
  CHECK((random_projection(r1, 3, 5) - CMatrix::identity(3)).frob() == 0.0);
}
