#pragma once

// The linear pencil A(z) = z0*I + z1*A1 + ... + zn*An of a matrix tuple, its
// characteristic polynomial by two independent algorithms, the coefficient
// polynomials q_m, the cofactor matrix, and root extraction at fixed z'.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qpencil/errors.hpp"
#include "qpencil/matrix.hpp"
#include "qpencil/multipoly.hpp"

namespace qpencil {

struct MatrixTuple {
  int k = 0;
  std::vector<CMatrix> mats;

  int n() const { return static_cast<int>(mats.size()); }
};

inline void validate_tuple(const MatrixTuple& t) {
  if (t.k < 1) throw InputError("MatrixTuple: k must be positive");
  if (t.mats.empty()) throw InputError("MatrixTuple: need at least one matrix");
  for (const CMatrix& m : t.mats)
    if (m.rows != t.k || m.cols != t.k)
      throw InputError("MatrixTuple: all matrices must be k x k");
}

struct PolyMatrix {
  int size = 0;
  int nvars = 0;
  std::vector<MultiPoly> entries;

  PolyMatrix(int size_, int nvars_)
      : size(size_), nvars(nvars_),
        entries(static_cast<size_t>(size_) * static_cast<size_t>(size_), MultiPoly(nvars_)) {}

  MultiPoly& at(int i, int j) { return entries[static_cast<size_t>(i) * size + j]; }
  const MultiPoly& at(int i, int j) const { return entries[static_cast<size_t>(i) * size + j]; }
};

inline PolyMatrix build_pencil(const MatrixTuple& t) {
  validate_tuple(t);
  int nv = t.n() + 1;
  PolyMatrix pm(t.k, nv);
  for (int i = 0; i < t.k; ++i) {
    for (int j = 0; j < t.k; ++j) {
      MultiPoly& e = pm.at(i, j);
      Monomial mono{std::vector<uint32_t>(static_cast<size_t>(nv), 0)};
      if (i == j) {
        mono.exps[0] = 1;
        e.add_term(mono, 1.0);
        mono.exps[0] = 0;
      }
      for (int m = 0; m < t.n(); ++m) {
        cplx c = t.mats[static_cast<size_t>(m)].at(i, j);
        if (c == cplx(0.0, 0.0)) continue;
        mono.exps[static_cast<size_t>(m) + 1] = 1;
        e.add_term(mono, c);
        mono.exps[static_cast<size_t>(m) + 1] = 0;
      }
      e.prune();
    }
  }
  return pm;
}

// A_*(z') = z1*A1 + ... + zn*An: the pencil with the z0 term left out.
// Entries keep the full n+1 arity so results mix freely with the pencil's.
inline PolyMatrix build_pencil_star(const MatrixTuple& t) {
  PolyMatrix pm = build_pencil(t);
  for (int i = 0; i < pm.size; ++i) {
    MultiPoly e(pm.nvars);
    for (const auto& [m, c] : pm.at(i, i).terms())
      if (m.exps[0] == 0) e.add_term(m, c);
    e.prune();
    pm.at(i, i) = e;
  }
  return pm;
}

// Determinant via memoized Laplace expansion: det over row prefix of size
// popcount(S) and column subset S, O(2^k * k) polynomial multiply-adds.
// Subsets are visited in increasing numeric order, so every proper subset is
// ready before it is needed and the summation order is fixed.
inline MultiPoly poly_det(const PolyMatrix& pm) {
  int k = pm.size;
  if (k > 14) throw CapabilityError("poly_det: size capped at 14");
  if (k == 0) return MultiPoly::constant(pm.nvars, 1.0);
  std::vector<MultiPoly> d(size_t{1} << k, MultiPoly(pm.nvars));
  d[0] = MultiPoly::constant(pm.nvars, 1.0);
  for (uint32_t s = 1; s < (uint32_t{1} << k); ++s) {
    int row = std::popcount(s) - 1;
    MultiPoly acc(pm.nvars);
    // expansion along the block's last row: sign (-1)^{row + position of j in s}
    double sign = (row % 2 == 0) ? 1.0 : -1.0;
    for (uint32_t rest = s; rest != 0; rest &= rest - 1) {
      int j = std::countr_zero(rest);
      MultiPoly::fma(acc, pm.at(row, j), d[s & ~(uint32_t{1} << j)], sign);
      sign = -sign;
    }
    acc.prune();
    // free subsets that can no longer be referenced is unnecessary at k<=14
    d[s] = std::move(acc);
  }
  return d[(size_t{1} << k) - 1];
}

inline MultiPoly charpoly_det(const MatrixTuple& t) {
  validate_tuple(t);
  if (t.k > 14) throw CapabilityError("charpoly_det: k capped at 14");
  return poly_det(build_pencil(t));
}

inline PolyMatrix polymat_mul(const PolyMatrix& x, const PolyMatrix& y) {
  if (x.size != y.size || x.nvars != y.nvars)
    throw InputError("polymat_mul: shape or arity mismatch");
  PolyMatrix r(x.size, x.nvars);
  for (int i = 0; i < x.size; ++i)
    for (int j = 0; j < x.size; ++j) {
      MultiPoly acc(x.nvars);
      for (int l = 0; l < x.size; ++l)
        MultiPoly::fma(acc, x.at(i, l), y.at(l, j), 1.0);
      acc.prune();
      r.at(i, j) = std::move(acc);
    }
  return r;
}

inline MultiPoly polymat_trace(const PolyMatrix& pm) {
  MultiPoly t(pm.nvars);
  for (int i = 0; i < pm.size; ++i)
    for (const auto& [m, c] : pm.at(i, i).terms()) t.add_term(m, c);
  t.prune();
  return t;
}

// Characteristic polynomial through power-sum traces p_j = tr(A_*(z')^j) and
// the Newton-identity recursion m*c_m = sum_{j=1..m} (-1)^{j-1} p_j c_{m-j};
// Q = sum_m z0^{k-m} c_m.  Fully independent of the determinant path.
inline MultiPoly charpoly_ps(const MatrixTuple& t) {
  validate_tuple(t);
  if (t.k > 10) throw CapabilityError("charpoly_ps: k capped at 10");
  int k = t.k;
  int nv = t.n() + 1;
  PolyMatrix star = build_pencil_star(t);

  std::vector<MultiPoly> p;  // p[j] = tr(A_*^{j+1})
  p.reserve(static_cast<size_t>(k));
  PolyMatrix cur = star;
  p.push_back(polymat_trace(cur));
  for (int j = 2; j <= k; ++j) {
    cur = polymat_mul(cur, star);
    p.push_back(polymat_trace(cur));
  }

  std::vector<MultiPoly> c(static_cast<size_t>(k) + 1, MultiPoly(nv));
  c[0] = MultiPoly::constant(nv, 1.0);
  for (int m = 1; m <= k; ++m) {
    MultiPoly acc(nv);
    double sign = 1.0;
    for (int j = 1; j <= m; ++j) {
      MultiPoly::fma(acc, p[static_cast<size_t>(j) - 1], c[static_cast<size_t>(m - j)], sign);
      sign = -sign;
    }
    acc.prune();
    c[static_cast<size_t>(m)] = acc * cplx(1.0 / m, 0.0);
  }

  MultiPoly q(nv);
  for (int m = 0; m <= k; ++m) {
    MultiPoly shifted = mul_var_power(c[static_cast<size_t>(m)], 0, static_cast<uint32_t>(k - m));
    for (const auto& [mono, coeff] : shifted.terms()) q.add_term(mono, coeff);
  }
  q.prune();
  return q;
}

// q_0..q_k collected from the z0-expansion of charpoly_det; q_1 and q_2 are
// recomputed from the trace closed forms and must agree within 1e-9.
inline std::vector<MultiPoly> q_coefficients(const MatrixTuple& t) {
  validate_tuple(t);
  int k = t.k;
  int nv = t.n() + 1;
  MultiPoly q = charpoly_det(t);
  std::vector<MultiPoly> out;
  out.reserve(static_cast<size_t>(k) + 1);
  for (int m = 0; m <= k; ++m)
    out.push_back(coeff_of_var(q, 0, static_cast<uint32_t>(k - m)));

  if (!canonical_equal(out[0], MultiPoly::constant(nv, 1.0), 1e-9))
    throw NumericalError("q_coefficients: q_0 is not 1");

  MultiPoly q1(nv);
  for (int j = 0; j < t.n(); ++j) {
    Monomial mono{std::vector<uint32_t>(static_cast<size_t>(nv), 0)};
    mono.exps[static_cast<size_t>(j) + 1] = 1;
    q1.add_term(mono, t.mats[static_cast<size_t>(j)].trace());
  }
  q1.prune();
  if (k >= 1 && !canonical_equal(out[1], q1, 1e-9))
    throw NumericalError("q_coefficients: q_1 disagrees with the trace closed form");

  if (k >= 2) {
    MultiPoly q2(nv);
    for (int i = 0; i < t.n(); ++i) {
      for (int j = 0; j < t.n(); ++j) {
        cplx w = t.mats[static_cast<size_t>(i)].trace() * t.mats[static_cast<size_t>(j)].trace() -
                 (t.mats[static_cast<size_t>(i)] * t.mats[static_cast<size_t>(j)]).trace();
        Monomial mono{std::vector<uint32_t>(static_cast<size_t>(nv), 0)};
        mono.exps[static_cast<size_t>(i) + 1] += 1;
        mono.exps[static_cast<size_t>(j) + 1] += 1;
        q2.add_term(mono, 0.5 * w);
      }
    }
    q2.prune();
    if (!canonical_equal(out[2], q2, 1e-9))
      throw NumericalError("q_coefficients: q_2 disagrees with the trace closed form");
  }
  return out;
}

// Signed minors of the pencil: C_ij = (-1)^{i+j} det(A(z) with row i and
// column j removed).  Satisfies dQ/dz0 = tr C.
inline PolyMatrix cofactor_matrix(const MatrixTuple& t) {
  validate_tuple(t);
  if (t.k > 10) throw CapabilityError("cofactor_matrix: k capped at 10");
  PolyMatrix pm = build_pencil(t);
  int k = t.k;
  PolyMatrix c(k, pm.nvars);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      PolyMatrix minor(k - 1, pm.nvars);
      for (int r = 0, rr = 0; r < k; ++r) {
        if (r == i) continue;
        for (int s = 0, ss = 0; s < k; ++s) {
          if (s == j) continue;
          minor.at(rr, ss) = pm.at(r, s);
          ++ss;
        }
        ++rr;
      }
      MultiPoly d = poly_det(minor);
      c.at(i, j) = ((i + j) % 2 == 0) ? d : -d;
    }
  }
  return c;
}

// q_{k-m}(z') = (1/m!) * (d^{m-1}/dz0^{m-1} tr C_A) at z0 = 0.
inline MultiPoly qkm_via_cofactor(const MatrixTuple& t, int m) {
  validate_tuple(t);
  if (m < 1 || m > t.k - 1)
    throw InputError("qkm_via_cofactor: need 1 <= m <= k-1");
  MultiPoly d = polymat_trace(cofactor_matrix(t));
  for (int i = 1; i < m; ++i) d = partial(d, 0);
  d = coeff_of_var(d, 0, 0);
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  return d * cplx(1.0 / fact, 0.0);
}

// Durand-Kerner on a monic polynomial given by ascending coefficients
// (coeffs[j] multiplies x^j, coeffs.back() == 1).  Deterministic start on the
// circle of radius 1 + max|coeff| with a fixed angular offset.  Stops when
// the largest update falls under 1e-10*(1+R); a stalled iteration is accepted
// when updates are already small and every residual is backward-stable, which
// is where multiple roots land (they cannot be resolved past ~sqrt(eps)).
inline std::vector<cplx> durand_kerner(const std::vector<cplx>& coeffs) {
  int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg < 1) throw InputError("durand_kerner: degree must be >= 1");
  double maxc = 0.0;
  for (const cplx& c : coeffs) maxc = std::max(maxc, std::abs(c));
  double radius = 1.0 + maxc;

  auto eval = [&coeffs, deg](cplx x) {
    cplx v = coeffs[static_cast<size_t>(deg)];
    for (int j = deg - 1; j >= 0; --j) v = v * x + coeffs[static_cast<size_t>(j)];
    return v;
  };
  auto backward_error = [&coeffs, deg, &eval](cplx x) {
    double denom = 0.0;
    double ax = std::max(1.0, std::abs(x));
    double p = 1.0;
    for (int j = 0; j <= deg; ++j) {
      denom += std::abs(coeffs[static_cast<size_t>(j)]) * p;
      p *= ax;
    }
    return std::abs(eval(x)) / denom;
  };

  std::vector<cplx> x(static_cast<size_t>(deg));
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < deg; ++i) {
    double ang = 2.0 * pi * i / deg + 0.5;
    x[static_cast<size_t>(i)] = radius * cplx(std::cos(ang), std::sin(ang));
  }

  double scale = 1.0 + radius;
  for (int iter = 0; iter < 500; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < deg; ++i) {
      cplx den(1.0, 0.0);
      for (int j = 0; j < deg; ++j)
        if (j != i) den *= x[static_cast<size_t>(i)] - x[static_cast<size_t>(j)];
      if (std::abs(den) < 1e-280) {
        // coincident iterates: nudge deterministically and keep going
        x[static_cast<size_t>(i)] += radius * 1e-9 * cplx(std::cos(i + 1.0), std::sin(i + 1.0));
        max_step = std::max(max_step, radius * 1e-9);
        continue;
      }
      cplx step = eval(x[static_cast<size_t>(i)]) / den;
      x[static_cast<size_t>(i)] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step <= 1e-10 * scale) break;
    if (max_step <= 1e-7 * scale) {
      bool stable = true;
      for (int i = 0; i < deg && stable; ++i)
        stable = backward_error(x[static_cast<size_t>(i)]) <= 1e-12;
      if (stable) break;
    }
    if (iter == 499)
      throw NumericalError("durand_kerner: no convergence in 500 iterations");
  }

  std::sort(x.begin(), x.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return x;
}

// The k roots in z0 of Q_A(z0, z') counted with multiplicity; their negatives
// are the eigenvalues of A_*(z').
inline std::vector<cplx> pencil_spectrum(const MatrixTuple& t,
                                         const std::vector<cplx>& zprime) {
  validate_tuple(t);
  if (zprime.size() != static_cast<size_t>(t.n()))
    throw InputError("pencil_spectrum: z' arity mismatch");
  MultiPoly q = charpoly_det(t);
  std::vector<cplx> coeffs(static_cast<size_t>(t.k) + 1, cplx(0.0, 0.0));
  for (const auto& [m, c] : q.terms()) {
    cplx v = c;
    for (size_t i = 1; i < m.exps.size(); ++i)
      if (m.exps[i] != 0) v *= pow_uint(zprime[i - 1], m.exps[i]);
    coeffs[m.exps[0]] += v;
  }
  cplx lead = coeffs[static_cast<size_t>(t.k)];
  if (std::abs(lead - cplx(1.0, 0.0)) > 1e-6)
    throw NumericalError("pencil_spectrum: restriction lost monicity");
  for (cplx& c : coeffs) c /= lead;
  return durand_kerner(coeffs);
}

}  // namespace qpencil
