#pragma once

// Dense complex matrices (row-major), a cyclic Jacobi eigensolver for
// Hermitian input, modified Gram-Schmidt, and small LU helpers.  Everything
// here is deterministic: fixed sweep order, fixed pivot rule, no randomness.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "qpencil/errors.hpp"
#include "qpencil/multipoly.hpp"

namespace qpencil {

struct CMatrix {
  int rows = 0, cols = 0;
  std::vector<cplx> a;

  CMatrix() = default;
  CMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c)) {
    if (r < 0 || c < 0) throw InputError("CMatrix: negative dimension");
  }

  static CMatrix identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  static CMatrix diag(const std::vector<cplx>& d) {
    CMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
  }

  cplx& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const cplx& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  bool square() const { return rows == cols; }

  CMatrix adjoint() const {
    CMatrix m(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m.at(j, i) = std::conj(at(i, j));
    return m;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (int i = 0; i < std::min(rows, cols); ++i) t += at(i, i);
    return t;
  }

  double frob() const {
    double s = 0.0;
    for (const cplx& v : a) s += std::norm(v);
    return std::sqrt(s);
  }

  friend CMatrix operator+(const CMatrix& x, const CMatrix& y) {
    check_same_shape(x, y, "add");
    CMatrix r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    return r;
  }

  friend CMatrix operator-(const CMatrix& x, const CMatrix& y) {
    check_same_shape(x, y, "sub");
    CMatrix r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
  }

  friend CMatrix operator*(const CMatrix& x, cplx s) {
    CMatrix r = x;
    for (cplx& v : r.a) v *= s;
    return r;
  }

  friend CMatrix operator*(cplx s, const CMatrix& x) { return x * s; }

  friend CMatrix operator*(const CMatrix& x, const CMatrix& y) {
    if (x.cols != y.rows) throw InputError("CMatrix mul: shape mismatch");
    CMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int l = 0; l < x.cols; ++l) {
        cplx xv = x.at(i, l);
        if (xv == cplx(0.0, 0.0)) continue;
        for (int j = 0; j < y.cols; ++j) r.at(i, j) += xv * y.at(l, j);
      }
    return r;
  }

 private:
  static void check_same_shape(const CMatrix& x, const CMatrix& y, const char* op) {
    if (x.rows != y.rows || x.cols != y.cols)
      throw InputError(std::string("CMatrix ") + op + ": shape mismatch");
  }
};

inline double hermitian_deviation(const CMatrix& m) {
  return (m - m.adjoint()).frob();
}

// (m + m*)/2: used to shave roundoff off products that are Hermitian by
// construction before they reach the eigensolver.
inline CMatrix hermitian_part(const CMatrix& m) {
  return (m + m.adjoint()) * cplx(0.5, 0.0);
}

struct EigenResult {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are unit eigenvectors
};

inline double offdiag_frob(const CMatrix& m) {
  double s = 0.0;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (i != j) s += std::norm(m.at(i, j));
  return std::sqrt(s);
}

// Cyclic Jacobi for Hermitian matrices.  Each rotation first rephases the
// 2x2 block to make it real symmetric (D = diag(1, e^{-i phi}) with
// phi = arg(a_pq)), then applies the classical symmetric Jacobi rotation.
// Sweeps run in fixed row-major pivot order until the off-diagonal Frobenius
// norm falls under 1e-12 * (1 + ||A||_F), at most 100 sweeps.
inline EigenResult hermitian_eigen(const CMatrix& input) {
  if (!input.square()) throw InputError("hermitian_eigen: matrix not square");
  double scale = input.frob();
  if (hermitian_deviation(input) > 1e-8 * (1.0 + scale))
    throw InputError("hermitian_eigen: input is not Hermitian");

  int n = input.rows;
  CMatrix m = input;
  CMatrix v = CMatrix::identity(n);
  double stop = 1e-12 * (1.0 + scale);
  bool converged = false;
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (offdiag_frob(m) <= stop) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        cplx mpq = m.at(p, q);
        double r = std::abs(mpq);
        if (r < 1e-300) continue;
        cplx eiphi = mpq / r;  // e^{i phi}
        double app = m.at(p, p).real();
        double aqq = m.at(q, q).real();
        double tau = (aqq - app) / (2.0 * r);
        double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        // U(p,p)=c, U(p,q)=s, U(q,p)=-s*conj(eiphi), U(q,q)=c*conj(eiphi).
        // columns: M <- M U, V <- V U
        for (int i = 0; i < n; ++i) {
          cplx mip = m.at(i, p), miq = m.at(i, q);
          m.at(i, p) = c * mip - s * std::conj(eiphi) * miq;
          m.at(i, q) = s * mip + c * std::conj(eiphi) * miq;
          cplx vip = v.at(i, p), viq = v.at(i, q);
          v.at(i, p) = c * vip - s * std::conj(eiphi) * viq;
          v.at(i, q) = s * vip + c * std::conj(eiphi) * viq;
        }
        // rows: M <- U* M
        for (int j = 0; j < n; ++j) {
          cplx mpj = m.at(p, j), mqj = m.at(q, j);
          m.at(p, j) = c * mpj - s * eiphi * mqj;
          m.at(q, j) = s * mpj + c * eiphi * mqj;
        }
        m.at(p, q) = 0.0;
        m.at(q, p) = 0.0;
      }
    }
  }
  if (!converged && offdiag_frob(m) > stop)
    throw NumericalError("hermitian_eigen: Jacobi failed to converge in 100 sweeps");

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&m](int x, int y) {
    return m.at(x, x).real() < m.at(y, y).real();
  });

  EigenResult res;
  res.values.reserve(static_cast<size_t>(n));
  res.vectors = CMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    res.values.push_back(m.at(order[static_cast<size_t>(j)], order[static_cast<size_t>(j)]).real());
    for (int i = 0; i < n; ++i)
      res.vectors.at(i, j) = v.at(i, order[static_cast<size_t>(j)]);
  }

  // Eigenvalues within 1e-7 of each other form one cluster; re-orthonormalize
  // each cluster's columns so multiplicity decisions stay stable downstream.
  for (int lo = 0; lo < n;) {
    int hi = lo + 1;
    while (hi < n && res.values[static_cast<size_t>(hi)] - res.values[static_cast<size_t>(hi - 1)] < 1e-7) ++hi;
    if (hi - lo > 1) {
      for (int j = lo; j < hi; ++j) {
        for (int prev = lo; prev < j; ++prev) {
          cplx dot = 0.0;
          for (int i = 0; i < n; ++i)
            dot += std::conj(res.vectors.at(i, prev)) * res.vectors.at(i, j);
          for (int i = 0; i < n; ++i)
            res.vectors.at(i, j) -= dot * res.vectors.at(i, prev);
        }
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) nrm += std::norm(res.vectors.at(i, j));
        nrm = std::sqrt(nrm);
        if (nrm < 1e-8)
          throw NumericalError("hermitian_eigen: degenerate cluster collapsed");
        for (int i = 0; i < n; ++i) res.vectors.at(i, j) /= nrm;
      }
    }
    lo = hi;
  }
  return res;
}

// Modified Gram-Schmidt (two passes per column).  Dependence threshold 1e-8
// on the residual norm of each input column after normalization.
inline CMatrix orthonormalize(const CMatrix& vecs) {
  int n = vecs.rows, k = vecs.cols;
  CMatrix q(n, k);
  for (int j = 0; j < k; ++j) {
    std::vector<cplx> col(static_cast<size_t>(n));
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) {
      col[static_cast<size_t>(i)] = vecs.at(i, j);
      nrm += std::norm(col[static_cast<size_t>(i)]);
    }
    nrm = std::sqrt(nrm);
    if (nrm < 1e-300)
      throw DependentColumnError(j, "orthonormalize: zero column " + std::to_string(j));
    for (cplx& x : col) x /= nrm;
    for (int pass = 0; pass < 2; ++pass) {
      for (int prev = 0; prev < j; ++prev) {
        cplx dot = 0.0;
        for (int i = 0; i < n; ++i)
          dot += std::conj(q.at(i, prev)) * col[static_cast<size_t>(i)];
        for (int i = 0; i < n; ++i)
          col[static_cast<size_t>(i)] -= dot * q.at(i, prev);
      }
    }
    double rnrm = 0.0;
    for (const cplx& x : col) rnrm += std::norm(x);
    rnrm = std::sqrt(rnrm);
    if (rnrm < 1e-8)
      throw DependentColumnError(
          j, "orthonormalize: column " + std::to_string(j) + " is dependent on earlier columns");
    for (int i = 0; i < n; ++i) q.at(i, j) = col[static_cast<size_t>(i)] / rnrm;
  }
  return q;
}

inline double unitary_residual(const CMatrix& u) {
  if (!u.square()) throw InputError("unitary_residual: matrix not square");
  return (u.adjoint() * u - CMatrix::identity(u.rows)).frob();
}

// LU with partial pivoting; deterministic pivot choice (strictly larger
// modulus wins, first index on ties).
struct LuFactors {
  CMatrix lu;
  std::vector<int> perm;
  int sign = 1;
};

inline LuFactors lu_factor(const CMatrix& m) {
  if (!m.square()) throw InputError("lu_factor: matrix not square");
  int n = m.rows;
  LuFactors f{m, std::vector<int>(static_cast<size_t>(n)), 1};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = std::abs(f.lu.at(c, c));
    for (int r = c + 1; r < n; ++r) {
      double cand = std::abs(f.lu.at(r, c));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best < 1e-300) throw NumericalError("lu_factor: singular matrix");
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(f.lu.at(c, j), f.lu.at(piv, j));
      std::swap(f.perm[static_cast<size_t>(c)], f.perm[static_cast<size_t>(piv)]);
      f.sign = -f.sign;
    }
    for (int r = c + 1; r < n; ++r) {
      cplx factor = f.lu.at(r, c) / f.lu.at(c, c);
      f.lu.at(r, c) = factor;
      for (int j = c + 1; j < n; ++j) f.lu.at(r, j) -= factor * f.lu.at(c, j);
    }
  }
  return f;
}

inline CMatrix lu_solve(const LuFactors& f, const CMatrix& rhs) {
  int n = f.lu.rows;
  if (rhs.rows != n) throw InputError("lu_solve: shape mismatch");
  CMatrix x(n, rhs.cols);
  for (int col = 0; col < rhs.cols; ++col) {
    std::vector<cplx> y(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      cplx s = rhs.at(f.perm[static_cast<size_t>(i)], col);
      for (int j = 0; j < i; ++j) s -= f.lu.at(i, j) * y[static_cast<size_t>(j)];
      y[static_cast<size_t>(i)] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      cplx s = y[static_cast<size_t>(i)];
      for (int j = i + 1; j < n; ++j) s -= f.lu.at(i, j) * x.at(j, col);
      x.at(i, col) = s / f.lu.at(i, i);
    }
  }
  return x;
}

inline CMatrix inverse(const CMatrix& m) {
  return lu_solve(lu_factor(m), CMatrix::identity(m.rows));
}

inline cplx det_numeric(const CMatrix& m) {
  LuFactors f = lu_factor(m);
  cplx d = static_cast<double>(f.sign);
  for (int i = 0; i < m.rows; ++i) d *= f.lu.at(i, i);
  return d;
}

}  // namespace qpencil
