#pragma once

// Coxeter matrices, the Tits reflection representation rho(g_i)e_j =
// e_j + 2 cos(pi/m_ij) e_i, the bilinear form B(e_i,e_j) = -cos(pi/m_ij),
// characteristic polynomials of the generator tuple, recovery of the Coxeter
// matrix from such a polynomial, and equivalence of hyperplane-projection
// tuples with an explicit basis-change witness.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "qpencil/errors.hpp"
#include "qpencil/matrix.hpp"
#include "qpencil/multipoly.hpp"
#include "qpencil/pencil.hpp"

namespace qpencil {

// Sentinel for m_ij = infinity; JSON carries the string "inf".
constexpr int kCoxeterInfinity = std::numeric_limits<int>::max();

struct CoxeterMatrix {
  int n = 0;
  std::vector<std::vector<int>> m;
};

inline void validate_coxeter(const CoxeterMatrix& cm) {
  if (cm.n < 1) throw InputError("CoxeterMatrix: rank must be positive");
  if (static_cast<int>(cm.m.size()) != cm.n)
    throw InputError("CoxeterMatrix: grid has wrong number of rows");
  for (const auto& row : cm.m)
    if (static_cast<int>(row.size()) != cm.n)
      throw InputError("CoxeterMatrix: grid has wrong number of columns");
  for (int i = 0; i < cm.n; ++i) {
    if (cm.m[static_cast<size_t>(i)][static_cast<size_t>(i)] != 1)
      throw InputError("CoxeterMatrix: diagonal entries must be 1");
    for (int j = 0; j < cm.n; ++j) {
      if (cm.m[static_cast<size_t>(i)][static_cast<size_t>(j)] !=
          cm.m[static_cast<size_t>(j)][static_cast<size_t>(i)])
        throw InputError("CoxeterMatrix: grid must be symmetric");
      if (i != j && cm.m[static_cast<size_t>(i)][static_cast<size_t>(j)] < 2)
        throw InputError("CoxeterMatrix: off-diagonal entries must be >= 2");
    }
  }
}

struct TitsRep {
  int n = 0;
  std::vector<std::vector<double>> alphas;  // alpha_ij, alpha_ii = -1
  std::vector<CMatrix> gens;                // rho(g_i), real entries
  std::vector<std::vector<double>> bform;   // B(e_i,e_j) = -alpha_ij
};

inline double coxeter_alpha(int m) {
  if (m == kCoxeterInfinity) return 1.0;
  return std::cos(3.14159265358979323846 / m);
}

inline TitsRep tits_representation(const CoxeterMatrix& cm) {
  validate_coxeter(cm);
  TitsRep rep;
  rep.n = cm.n;
  rep.alphas.assign(static_cast<size_t>(cm.n), std::vector<double>(static_cast<size_t>(cm.n)));
  rep.bform = rep.alphas;
  for (int i = 0; i < cm.n; ++i)
    for (int j = 0; j < cm.n; ++j) {
      double a = coxeter_alpha(cm.m[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      rep.alphas[static_cast<size_t>(i)][static_cast<size_t>(j)] = a;
      rep.bform[static_cast<size_t>(i)][static_cast<size_t>(j)] = -a;
    }
  for (int i = 0; i < cm.n; ++i) {
    CMatrix g = CMatrix::identity(cm.n);
    for (int j = 0; j < cm.n; ++j)
      g.at(i, j) += 2.0 * rep.alphas[static_cast<size_t>(i)][static_cast<size_t>(j)];
    if ((g * g - CMatrix::identity(cm.n)).frob() > 1e-10)
      throw NumericalError("tits_representation: generator is not an involution");
    rep.gens.push_back(std::move(g));
  }
  return rep;
}

inline MatrixTuple coxeter_tuple(const CoxeterMatrix& cm) {
  TitsRep rep = tits_representation(cm);
  MatrixTuple t;
  t.k = rep.n;
  t.mats = std::move(rep.gens);
  return t;
}

// det(z0 I + z1 rho(g_1) + ... + zn rho(g_n)); its degree-(n-1) slice in z0
// must come out as (n-2)(z1+...+zn), which is asserted.
inline MultiPoly coxeter_charpoly(const CoxeterMatrix& cm) {
  validate_coxeter(cm);
  if (cm.n > 10) throw CapabilityError("coxeter_charpoly: rank capped at 10");
  MultiPoly q = charpoly_det(coxeter_tuple(cm));
  int n = cm.n;
  for (int i = 1; i <= n; ++i) {
    std::vector<uint32_t> exps(static_cast<size_t>(n) + 1, 0);
    exps[0] = static_cast<uint32_t>(n - 1);
    exps[static_cast<size_t>(i)] = 1;
    if (std::abs(q.coeff(exps) - cplx(n - 2, 0.0)) > 1e-9)
      throw NumericalError("coxeter_charpoly: first-order coefficients are off");
  }
  return q;
}

// Inverts coxeter_charpoly.  The z_i z_j coefficient of the z0^{n-2} slice
// equals (n-2)^2 - (n-4) - 4 alpha_ij^2, so alpha_ij and then m_ij can be
// read off; every step is validated and the reconstructed matrix must
// reproduce the input polynomial.
inline CoxeterMatrix recover_coxeter(const MultiPoly& q) {
  int n = q.nvars() - 1;
  if (n < 1) throw InputError("recover_coxeter: polynomial must have at least two variables");
  if (n > 10) throw CapabilityError("recover_coxeter: rank capped at 10");
  auto reject = [](const std::string& why) {
    throw InputError("recover_coxeter: not the characteristic polynomial of a reflection tuple (" +
                     why + ")");
  };
  if (q.total_degree() != static_cast<uint32_t>(n)) reject("total degree must equal the rank");
  {
    std::vector<uint32_t> exps(static_cast<size_t>(n) + 1, 0);
    exps[0] = static_cast<uint32_t>(n);
    if (std::abs(q.coeff(exps) - cplx(1.0, 0.0)) > 1e-6) reject("not monic in z0");
  }
  for (int i = 1; i <= n; ++i) {
    std::vector<uint32_t> exps(static_cast<size_t>(n) + 1, 0);
    exps[0] = static_cast<uint32_t>(n - 1);
    exps[static_cast<size_t>(i)] = 1;
    if (std::abs(q.coeff(exps) - cplx(n - 2, 0.0)) > 1e-6)
      reject("first-order coefficients must all equal rank minus 2");
  }
  if (n >= 2) {
    double want = 0.5 * (n - 1) * (n - 4);
    for (int i = 1; i <= n; ++i) {
      std::vector<uint32_t> exps(static_cast<size_t>(n) + 1, 0);
      exps[0] = static_cast<uint32_t>(n - 2);
      exps[static_cast<size_t>(i)] = 2;
      if (std::abs(q.coeff(exps) - cplx(want, 0.0)) > 1e-6)
        reject("square coefficients must equal (n-1)(n-4)/2");
    }
  }

  CoxeterMatrix cm;
  cm.n = n;
  cm.m.assign(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), 1));
  double base = static_cast<double>(n) * n - 5.0 * n + 8.0;  // (n-2)^2 - (n-4)
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      std::vector<uint32_t> exps(static_cast<size_t>(n) + 1, 0);
      exps[0] = static_cast<uint32_t>(n - 2);
      exps[static_cast<size_t>(i)] = 1;
      exps[static_cast<size_t>(j)] = 1;
      cplx c = q.coeff(exps);
      if (std::abs(c.imag()) > 1e-6) reject("cross coefficients must be real");
      double a2 = (base - c.real()) / 4.0;
      if (a2 < -1e-6 || a2 > 1.0 + 1e-6) reject("cross coefficient outside the admissible range");
      double a = std::sqrt(std::min(1.0, std::max(0.0, a2)));
      int m;
      if (a >= 1.0 - 1e-9) {
        m = kCoxeterInfinity;
      } else {
        m = static_cast<int>(std::lround(3.14159265358979323846 / std::acos(a)));
        if (m > 1000) {
          m = kCoxeterInfinity;  // arccos near 1 is ill-conditioned
        } else {
          if (m < 2) reject("recovered order below 2");
          if (std::abs(std::cos(3.14159265358979323846 / m) - a) > 1e-6)
            reject("recovered order does not reproduce its cosine");
        }
      }
      cm.m[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] = m;
      cm.m[static_cast<size_t>(j - 1)][static_cast<size_t>(i - 1)] = m;
    }
  }
  validate_coxeter(cm);
  if (!canonical_equal(q, coxeter_charpoly(cm), 1e-7))
    reject("reconstructed matrix does not reproduce the polynomial");
  return cm;
}

// p_i = (I + rho(g_i))/2: idempotent, kernel spanned by e_i, self-adjoint
// for the B form though generally not for the Euclidean one.
inline MatrixTuple hyperplane_projections(const CoxeterMatrix& cm) {
  TitsRep rep = tits_representation(cm);
  MatrixTuple t;
  t.k = rep.n;
  for (const CMatrix& g : rep.gens)
    t.mats.push_back((g + CMatrix::identity(rep.n)) * cplx(0.5, 0.0));
  return t;
}

namespace detail {

inline void validate_hyperplane_tuple(const MatrixTuple& t) {
  validate_tuple(t);
  if (t.n() != t.k)
    throw InputError("hyperplane tuple: need exactly n projections in dimension n");
  for (const CMatrix& p : t.mats) {
    if ((p * p - p).frob() > 1e-8 * (1.0 + p.frob()))
      throw InputError("hyperplane tuple: matrix is not idempotent");
    if (std::abs(p.trace() - cplx(t.k - 1, 0.0)) > 1e-6)
      throw InputError("hyperplane tuple: projection rank must be n-1");
  }
}

// Unit kernel vector of a rank-(n-1) idempotent: I-p projects onto the
// kernel, so its largest column is already a multiple of it.
inline std::vector<cplx> kernel_vector(const CMatrix& p) {
  int k = p.rows;
  CMatrix comp = CMatrix::identity(k) - p;
  int best = 0;
  double best_norm = -1.0;
  for (int j = 0; j < k; ++j) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += std::norm(comp.at(i, j));
    if (s > best_norm) {
      best_norm = s;
      best = j;
    }
  }
  std::vector<cplx> v(static_cast<size_t>(k));
  double nrm = std::sqrt(best_norm);
  if (nrm < 1e-12) throw InputError("hyperplane tuple: projection has no kernel direction");
  for (int i = 0; i < k; ++i) v[static_cast<size_t>(i)] = comp.at(i, best) / nrm;
  return v;
}

// alpha_ij = <e_i, (p_i - I) e_j>; (p_i - I)e_j lies in the kernel of p_i,
// so this is an exact coefficient extraction, and alpha_ii = -1.
inline std::vector<std::vector<cplx>> alpha_from_kernels(const MatrixTuple& t,
                                                         const std::vector<std::vector<cplx>>& e) {
  int n = t.k;
  std::vector<std::vector<cplx>> alpha(static_cast<size_t>(n),
                                       std::vector<cplx>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i) {
    CMatrix pi_minus = t.mats[static_cast<size_t>(i)] - CMatrix::identity(n);
    for (int j = 0; j < n; ++j) {
      cplx acc(0.0, 0.0);
      for (int r = 0; r < n; ++r) {
        cplx img(0.0, 0.0);
        for (int s = 0; s < n; ++s) img += pi_minus.at(r, s) * e[static_cast<size_t>(j)][static_cast<size_t>(s)];
        acc += std::conj(e[static_cast<size_t>(i)][static_cast<size_t>(r)]) * img;
      }
      alpha[static_cast<size_t>(i)][static_cast<size_t>(j)] = acc;
    }
  }
  return alpha;
}

// Phase convention: rotate each kernel vector so its largest entry is real
// positive, then flip signs along a BFS spanning forest of the coupling graph
// (edges where |alpha| > 1e-7) so coupled alphas come out real non-negative.
// If a phase pattern achieving that does not exist the caller sees it as
// residual imaginary/negative entries.
inline void phase_kernels(std::vector<std::vector<cplx>>& e, const MatrixTuple& t) {
  int n = t.k;
  for (auto& v : e) {
    int best = 0;
    double mod = -1.0;
    for (int i = 0; i < n; ++i)
      if (std::abs(v[static_cast<size_t>(i)]) > mod) {
        mod = std::abs(v[static_cast<size_t>(i)]);
        best = i;
      }
    cplx ph = v[static_cast<size_t>(best)] / mod;
    for (cplx& c : v) c /= ph;
  }
  std::vector<std::vector<cplx>> alpha = alpha_from_kernels(t, e);
  std::vector<int> state(static_cast<size_t>(n), 0);  // 0 unseen, else +-1
  for (int root = 0; root < n; ++root) {
    if (state[static_cast<size_t>(root)] != 0) continue;
    state[static_cast<size_t>(root)] = 1;
    std::queue<int> bfs;
    bfs.push(root);
    while (!bfs.empty()) {
      int i = bfs.front();
      bfs.pop();
      for (int j = 0; j < n; ++j) {
        if (j == i || state[static_cast<size_t>(j)] != 0) continue;
        cplx a = alpha[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (std::abs(a) <= 1e-7) continue;
        // choose s_j with s_i * s_j * Re(alpha_ij) >= 0, i.e. s_j = sign(s_i Re alpha_ij)
        double signed_a = (state[static_cast<size_t>(i)] > 0 ? 1.0 : -1.0) * a.real();
        state[static_cast<size_t>(j)] = signed_a >= 0.0 ? 1 : -1;
        bfs.push(j);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (state[static_cast<size_t>(i)] < 0)
      for (cplx& c : e[static_cast<size_t>(i)]) c = -c;
}

}  // namespace detail

// Decides unitary/basis equivalence of two hyperplane-projection tuples via
// their characteristic polynomials; on a match returns the basis change U
// with U e_i = e_i' (so U p_i U^{-1} = p2_i), verified before returning.
// Unequal polynomials return an empty optional.
inline std::optional<CMatrix> hyperplane_equivalence(const MatrixTuple& t1,
                                                     const MatrixTuple& t2) {
  detail::validate_hyperplane_tuple(t1);
  detail::validate_hyperplane_tuple(t2);
  if (t1.k != t2.k) throw InputError("hyperplane_equivalence: dimensions differ");
  int n = t1.k;

  auto kernels = [n](const MatrixTuple& t) {
    std::vector<std::vector<cplx>> e;
    e.reserve(static_cast<size_t>(n));
    for (const CMatrix& p : t.mats) e.push_back(detail::kernel_vector(p));
    return e;
  };
  std::vector<std::vector<cplx>> e1 = kernels(t1);
  std::vector<std::vector<cplx>> e2 = kernels(t2);

  auto to_matrix = [n](const std::vector<std::vector<cplx>>& e) {
    CMatrix m(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) m.at(i, j) = e[static_cast<size_t>(j)][static_cast<size_t>(i)];
    return m;
  };
  auto gram_ok = [&to_matrix](const std::vector<std::vector<cplx>>& e) {
    CMatrix m = to_matrix(e);
    try {
      return std::abs(det_numeric(m.adjoint() * m)) >= 1e-8;
    } catch (const NumericalError&) {
      return false;  // exactly singular Gram
    }
  };
  if (!gram_ok(e1) || !gram_ok(e2))
    throw InputError("hyperplane_equivalence: kernel vectors are not linearly independent");

  if (!canonical_equal(charpoly_det(t1), charpoly_det(t2), 1e-7)) return std::nullopt;

  detail::phase_kernels(e1, t1);
  detail::phase_kernels(e2, t2);
  std::vector<std::vector<cplx>> a1 = detail::alpha_from_kernels(t1, e1);
  std::vector<std::vector<cplx>> a2 = detail::alpha_from_kernels(t2, e2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx x = a1[static_cast<size_t>(i)][static_cast<size_t>(j)];
      cplx y = a2[static_cast<size_t>(i)][static_cast<size_t>(j)];
      // sign flips cannot remove genuinely complex phases; report instead of guessing
      if (std::abs(x.imag()) > 1e-7 || std::abs(y.imag()) > 1e-7)
        throw NumericalError("hyperplane_equivalence: no admissible phase convention");
      if (std::abs(x - y) > 1e-7)
        throw NumericalError("hyperplane_equivalence: coupling grids disagree after phasing");
    }

  CMatrix u = to_matrix(e2) * inverse(to_matrix(e1));
  CMatrix uinv = inverse(u);
  for (int i = 0; i < n; ++i) {
    double res = (u * t1.mats[static_cast<size_t>(i)] * uinv - t2.mats[static_cast<size_t>(i)]).frob();
    if (res > 1e-7)
      throw NumericalError("hyperplane_equivalence: witness fails to conjugate the tuples");
  }
  return u;
}

// Complements a tuple of rank-1 projections; the equivalence problem for the
// complements is the hyperplane problem, with the polynomial related by
// Q_complement(z0, z') = Q(z0 + sum z_i, -z').
inline MatrixTuple rank1_reduction(const MatrixTuple& t) {
  validate_tuple(t);
  if (t.n() != t.k)
    throw InputError("rank1_reduction: need exactly n projections in dimension n");
  MatrixTuple out;
  out.k = t.k;
  for (const CMatrix& p : t.mats) {
    if ((p * p - p).frob() > 1e-8 * (1.0 + p.frob()))
      throw InputError("rank1_reduction: matrix is not idempotent");
    if (std::abs(p.trace() - cplx(1.0, 0.0)) > 1e-6)
      throw InputError("rank1_reduction: projection rank must be 1");
    out.mats.push_back(CMatrix::identity(t.k) - p);
  }
  return out;
}

// The substitution z0 -> z0 + z1 + ... + zn, z_i -> -z_i; maps the
// characteristic polynomial of a tuple onto that of its complement tuple.
inline MultiPoly complement_substitution(const MultiPoly& q) {
  int nv = q.nvars();
  std::vector<MultiPoly> subs;
  subs.reserve(static_cast<size_t>(nv));
  MultiPoly z0sub = MultiPoly::variable(nv, 0);
  for (int i = 1; i < nv; ++i) z0sub = z0sub + MultiPoly::variable(nv, i);
  subs.push_back(z0sub);
  for (int i = 1; i < nv; ++i) subs.push_back(-MultiPoly::variable(nv, i));
  return substitute(q, subs);
}

}  // namespace qpencil
