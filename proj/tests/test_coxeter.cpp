#include <catch2/catch_amalgamated.hpp>

#include "qpencil/coxeter.hpp"
#include "qpencil/fixtures.hpp"

using namespace qpencil;

namespace {

CoxeterMatrix make_cm(int n, std::vector<std::vector<int>> grid) {
  CoxeterMatrix cm;
  cm.n = n;
  cm.m = std::move(grid);
  return cm;
}

CoxeterMatrix dihedral(int m) { return make_cm(2, {{1, m}, {m, 1}}); }

const CoxeterMatrix kA2 = dihedral(3);
const CoxeterMatrix kA3 = make_cm(3, {{1, 3, 2}, {3, 1, 3}, {2, 3, 1}});
const CoxeterMatrix kB3 = make_cm(3, {{1, 4, 2}, {4, 1, 3}, {2, 3, 1}});
const CoxeterMatrix kH3 = make_cm(3, {{1, 5, 2}, {5, 1, 3}, {2, 3, 1}});
const CoxeterMatrix kWithInf =
    make_cm(3, {{1, kCoxeterInfinity, 2}, {kCoxeterInfinity, 1, 3}, {2, 3, 1}});

MultiPoly z(int nv, int i) { return MultiPoly::variable(nv, i); }

CMatrix bform_matrix(const TitsRep& rep) {
  CMatrix b(rep.n, rep.n);
  for (int i = 0; i < rep.n; ++i)
    for (int j = 0; j < rep.n; ++j) b.at(i, j) = rep.bform[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return b;
}

MatrixTuple conjugate_orthogonal(const MatrixTuple& t, uint64_t seed) {
  Xorshift64Star rng(seed);
  CMatrix u = random_real_orthogonal(rng, t.k);
  MatrixTuple out;
  out.k = t.k;
  for (const CMatrix& m : t.mats) out.mats.push_back(u * m * u.adjoint());
  return out;
}

}  // namespace

TEST_CASE("validate_coxeter rejects malformed grids") {
  CHECK_THROWS_AS(validate_coxeter(make_cm(2, {{1, 3}, {4, 1}})), InputError);  // asymmetric
  CHECK_THROWS_AS(validate_coxeter(make_cm(2, {{2, 3}, {3, 1}})), InputError);  // diagonal
  CHECK_THROWS_AS(validate_coxeter(make_cm(2, {{1, 1}, {1, 1}})), InputError);  // order 1
  CHECK_THROWS_AS(validate_coxeter(make_cm(2, {{1, 3}})), InputError);          // shape
  CHECK_THROWS_AS(validate_coxeter(make_cm(0, {})), InputError);
  CHECK_NOTHROW(validate_coxeter(kWithInf));
}

TEST_CASE("tits_representation matches hand-computed generators") {
  // all orders 2: commuting sign flips
  TitsRep flips = tits_representation(make_cm(2, {{1, 2}, {2, 1}}));
  CHECK((flips.gens[0] - CMatrix::diag({cplx(-1.0, 0.0), cplx(1.0, 0.0)})).frob() < 1e-15);
  CHECK((flips.gens[1] - CMatrix::diag({cplx(1.0, 0.0), cplx(-1.0, 0.0)})).frob() < 1e-15);

  TitsRep a2 = tits_representation(kA2);
  CMatrix g1(2, 2);
  g1.at(0, 0) = -1.0;
  g1.at(0, 1) = 1.0;
  g1.at(1, 1) = 1.0;
  CHECK((a2.gens[0] - g1).frob() < 1e-12);

  TitsRep inf = tits_representation(dihedral(kCoxeterInfinity));
  CMatrix gi(2, 2);
  gi.at(0, 0) = -1.0;
  gi.at(0, 1) = 2.0;
  gi.at(1, 1) = 1.0;
  CHECK((inf.gens[0] - gi).frob() < 1e-15);
}

TEST_CASE("generators satisfy the reflection relations and preserve the form") {
  for (const CoxeterMatrix& cm : {kA2, kA3, kB3, kH3, kWithInf, dihedral(7)}) {
    TitsRep rep = tits_representation(cm);
    CMatrix b = bform_matrix(rep);
    for (int i = 0; i < rep.n; ++i) {
      const CMatrix& g = rep.gens[static_cast<size_t>(i)];
      CHECK((g * g - CMatrix::identity(rep.n)).frob() < 1e-10);
      CHECK((g.adjoint() * b * g - b).frob() < 1e-10);  // real entries: adjoint == transpose
      for (int j = i + 1; j < rep.n; ++j) {
        int mij = cm.m[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (mij == kCoxeterInfinity) continue;
        CMatrix prod = g * rep.gens[static_cast<size_t>(j)];
        CMatrix pw = CMatrix::identity(rep.n);
        for (int r = 0; r < mij; ++r) pw = pw * prod;
        CHECK((pw - CMatrix::identity(rep.n)).frob() < 1e-8);
      }
    }
  }
}

TEST_CASE("coxeter_charpoly matches dihedral hand computations") {
  // order 3: z0^2 - z1^2 - z2^2 + z1 z2
  MultiPoly q3 = coxeter_charpoly(kA2);
  MultiPoly want3 = z(3, 0) * z(3, 0) - z(3, 1) * z(3, 1) - z(3, 2) * z(3, 2) +
                    z(3, 1) * z(3, 2);
  CHECK(canonical_equal(q3, want3, 1e-10));

  // order 2: z0^2 - (z1 - z2)^2
  MultiPoly q2 = coxeter_charpoly(dihedral(2));
  MultiPoly want2 = z(3, 0) * z(3, 0) - poly_pow(z(3, 1) - z(3, 2), 2);
  CHECK(canonical_equal(q2, want2, 1e-10));

  // infinite order: z0^2 - (z1 + z2)^2
  MultiPoly qi = coxeter_charpoly(dihedral(kCoxeterInfinity));
  MultiPoly wanti = z(3, 0) * z(3, 0) - poly_pow(z(3, 1) + z(3, 2), 2);
  CHECK(canonical_equal(qi, wanti, 1e-10));
}

TEST_CASE("coxeter_charpoly coefficient slices follow the rank") {
  // chain with m_{i,i+1} = 3: check z0^{n-2} z_i^2 and z0^{n-1} z_i coefficients
  for (int n = 2; n <= 6; ++n) {
    CoxeterMatrix cm;
    cm.n = n;
    cm.m.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), 2));
    for (int i = 0; i < n; ++i) cm.m[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
    for (int i = 0; i + 1 < n; ++i) {
      cm.m[static_cast<size_t>(i)][static_cast<size_t>(i + 1)] = 3;
      cm.m[static_cast<size_t>(i + 1)][static_cast<size_t>(i)] = 3;
    }
    MultiPoly q = coxeter_charpoly(cm);
    double want_sq = 0.5 * (n - 1) * (n - 4);
    for (int i = 1; i <= n; ++i) {
      std::vector<uint32_t> lin(static_cast<size_t>(n) + 1, 0);
      lin[0] = static_cast<uint32_t>(n - 1);
      lin[static_cast<size_t>(i)] = 1;
      CHECK(std::abs(q.coeff(lin) - cplx(n - 2, 0.0)) < 1e-9);
      std::vector<uint32_t> sq(static_cast<size_t>(n) + 1, 0);
      sq[0] = static_cast<uint32_t>(n - 2);
      sq[static_cast<size_t>(i)] = 2;
      CHECK(std::abs(q.coeff(sq) - cplx(want_sq, 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("recover_coxeter inverts the polynomial map") {
  for (const CoxeterMatrix& cm : {kA2, kB3, kWithInf, dihedral(6), dihedral(12)}) {
    CoxeterMatrix back = recover_coxeter(coxeter_charpoly(cm));
    CHECK(back.n == cm.n);
    CHECK(back.m == cm.m);
  }
}

TEST_CASE("recover_coxeter decodes dihedral cross coefficients") {
  auto dihedral_poly = [](double c) {
    return z(3, 0) * z(3, 0) - z(3, 1) * z(3, 1) - z(3, 2) * z(3, 2) +
           c * z(3, 1) * z(3, 2);
  };
  CHECK(recover_coxeter(dihedral_poly(1.0)).m[0][1] == 3);
  CHECK(recover_coxeter(dihedral_poly(2.0)).m[0][1] == 2);
  CHECK(recover_coxeter(dihedral_poly(-2.0)).m[0][1] == kCoxeterInfinity);
}

TEST_CASE("recover_coxeter rejects polynomials outside the image") {
  // wrong square slice
  CHECK_THROWS_AS(recover_coxeter(z(3, 0) * z(3, 0) + z(3, 1) * z(3, 2)), InputError);
  // not monic
  CHECK_THROWS_AS(recover_coxeter(2.0 * z(3, 0) * z(3, 0) - z(3, 1) * z(3, 1) -
                                  z(3, 2) * z(3, 2)),
                  InputError);
  // first-order slice off: (z0+z1+z2)^2 has coefficient 2, not 0
  CHECK_THROWS_AS(recover_coxeter(poly_pow(z(3, 0) + z(3, 1) + z(3, 2), 2)), InputError);
  // cross coefficient out of the admissible range on either side
  MultiPoly base = z(3, 0) * z(3, 0) - z(3, 1) * z(3, 1) - z(3, 2) * z(3, 2);
  CHECK_THROWS_AS(recover_coxeter(base + 3.0 * z(3, 1) * z(3, 2)), InputError);
  CHECK_THROWS_AS(recover_coxeter(base - 3.0 * z(3, 1) * z(3, 2)), InputError);
  // wrong degree
  CHECK_THROWS_AS(recover_coxeter(z(3, 0)), InputError);
  CHECK_THROWS_AS(recover_coxeter(MultiPoly(1)), InputError);
}

TEST_CASE("recover_coxeter refuses nearly-infinite orders honestly") {
  // order 1500 is beyond the reliable arccos window; the guard maps it to
  // infinity and the final re-validation then rejects the mismatch
  CHECK_THROWS_AS(recover_coxeter(coxeter_charpoly(dihedral(1500))), InputError);
}

TEST_CASE("hyperplane_projections are rank n-1 idempotents") {
  MatrixTuple t = hyperplane_projections(kA2);
  CMatrix p1(2, 2);
  p1.at(0, 1) = 0.5;
  p1.at(1, 1) = 1.0;
  CHECK((t.mats[0] - p1).frob() < 1e-12);
  for (const CMatrix& p : t.mats) {
    CHECK((p * p - p).frob() < 1e-12);
    CHECK(std::abs(p.trace() - cplx(t.k - 1, 0.0)) < 1e-12);
  }
}

TEST_CASE("hyperplane_equivalence certifies orthogonally conjugated tuples") {
  for (const CoxeterMatrix& cm : {kA2, kB3, kH3, kWithInf}) {
    MatrixTuple t1 = hyperplane_projections(cm);
    MatrixTuple t2 = conjugate_orthogonal(t1, 500 + static_cast<uint64_t>(cm.n));
    std::optional<CMatrix> u = hyperplane_equivalence(t1, t2);
    REQUIRE(u.has_value());
    CMatrix uinv = inverse(*u);
    for (int i = 0; i < t1.k; ++i)
      CHECK((*u * t1.mats[static_cast<size_t>(i)] * uinv - t2.mats[static_cast<size_t>(i)]).frob() <
            1e-7);
  }

  // identical tuples get the identity change of basis
  MatrixTuple t = hyperplane_projections(kB3);
  std::optional<CMatrix> u = hyperplane_equivalence(t, t);
  REQUIRE(u.has_value());
  CHECK((*u - CMatrix::identity(3)).frob() < 1e-9);
}

TEST_CASE("hyperplane_equivalence separates different reflection groups") {
  MatrixTuple a2 = hyperplane_projections(kA2);
  MatrixTuple b2 = hyperplane_projections(dihedral(4));
  CHECK_FALSE(hyperplane_equivalence(a2, b2).has_value());
  CHECK_THROWS_AS(hyperplane_equivalence(a2, hyperplane_projections(kB3)), InputError);
}

TEST_CASE("hyperplane_equivalence validates its inputs") {
  MatrixTuple wrong_rank;
  wrong_rank.k = 2;
  wrong_rank.mats = {CMatrix::identity(2), CMatrix::identity(2)};
  MatrixTuple a2 = hyperplane_projections(kA2);
  CHECK_THROWS_AS(hyperplane_equivalence(wrong_rank, a2), InputError);

  // two projections sharing one kernel direction: Gram matrix is singular
  MatrixTuple shared;
  shared.k = 2;
  shared.mats = {CMatrix::diag({cplx(0.0, 0.0), cplx(1.0, 0.0)}),
                 CMatrix::diag({cplx(0.0, 0.0), cplx(1.0, 0.0)})};
  CHECK_THROWS_AS(hyperplane_equivalence(shared, a2), InputError);
}

TEST_CASE("rank1_reduction complements and the polynomial substitution tracks it") {
  MatrixTuple ones;
  ones.k = 2;
  CMatrix half(2, 2);
  half.at(0, 0) = 0.5;
  half.at(0, 1) = 0.5;
  half.at(1, 0) = 0.5;
  half.at(1, 1) = 0.5;
  ones.mats = {CMatrix::diag({cplx(1.0, 0.0), cplx(0.0, 0.0)}), half};

  MatrixTuple comp = rank1_reduction(ones);
  for (const CMatrix& p : comp.mats) {
    CHECK((p * p - p).frob() < 1e-12);
    CHECK(std::abs(p.trace() - cplx(1.0, 0.0)) < 1e-12);
  }
  CHECK(canonical_equal(charpoly_det(comp), complement_substitution(charpoly_det(ones)), 1e-9));

  // the substitution is an involution
  MultiPoly q = charpoly_det(ones);
  CHECK(canonical_equal(complement_substitution(complement_substitution(q)), q, 1e-10));

  MatrixTuple bad;
  bad.k = 3;
  bad.mats = {CMatrix::diag({cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)}),
              CMatrix::diag({cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)}),
              CMatrix::diag({cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)})};
  CHECK_THROWS_AS(rank1_reduction(bad), InputError);  // first one has rank 2
}

TEST_CASE("rank1 equivalence transfers to the complement problem") {
  // three random real rank-one projections in dimension 3 and an orthogonal copy
  Xorshift64Star rng(640);
  MatrixTuple t;
  t.k = 3;
  for (int i = 0; i < 3; ++i) {
    CMatrix v = orthonormalize(random_real_matrix(rng, 3, 1));
    t.mats.push_back(v * v.adjoint());
  }
  MatrixTuple tc = conjugate_orthogonal(t, 641);

  MatrixTuple r1 = rank1_reduction(t);
  MatrixTuple r2 = rank1_reduction(tc);
  std::optional<CMatrix> u = hyperplane_equivalence(r1, r2);
  REQUIRE(u.has_value());
  CMatrix uinv = inverse(*u);
  // the same witness conjugates the original rank-one tuple
  for (int i = 0; i < 3; ++i)
    CHECK((*u * t.mats[static_cast<size_t>(i)] * uinv - tc.mats[static_cast<size_t>(i)]).frob() <
          1e-7);
}
