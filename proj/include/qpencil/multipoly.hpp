#pragma once

// Sparse polynomials in nvars complex variables z0..z_{nvars-1}.
//
// Terms live in a map ordered by decreasing graded-lex (z0 most significant),
// which doubles as the canonical serialization order.  Every public operation
// finishes with a prune pass that drops coefficients of modulus below
// 1e-12 * (1 + largest coefficient modulus in the result), so spurious terms
// from repeated products cannot accumulate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qpencil/errors.hpp"

namespace qpencil {

using cplx = std::complex<double>;

inline constexpr double kPruneRel = 1e-12;

struct Monomial {
  std::vector<uint32_t> exps;

  uint32_t total_degree() const {
    uint32_t d = 0;
    for (uint32_t e : exps) d += e;
    return d;
  }
  bool operator==(const Monomial& o) const { return exps == o.exps; }
};

// Decreasing graded-lex: higher total degree first, ties broken by the
// exponent vector compared from z0 on.  Map iteration is canonical order.
struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    uint32_t da = a.total_degree(), db = b.total_degree();
    if (da != db) return da > db;
    return a.exps > b.exps;
  }
};

class MultiPoly {
 public:
  using Terms = std::map<Monomial, cplx, GrlexGreater>;

  explicit MultiPoly(int nvars) : nvars_(nvars) {
    if (nvars < 1) throw InputError("MultiPoly: nvars must be >= 1");
  }

  static MultiPoly constant(int nvars, cplx c) {
    MultiPoly p(nvars);
    p.add_term(Monomial{std::vector<uint32_t>(static_cast<size_t>(nvars), 0)}, c);
    p.prune();
    return p;
  }

  static MultiPoly variable(int nvars, int index) {
    if (index < 0 || index >= nvars)
      throw InputError("MultiPoly::variable: index out of range");
    MultiPoly p(nvars);
    Monomial m{std::vector<uint32_t>(static_cast<size_t>(nvars), 0)};
    m.exps[static_cast<size_t>(index)] = 1;
    p.add_term(m, cplx(1.0, 0.0));
    return p;
  }

  static MultiPoly from_monomial(int nvars, std::vector<uint32_t> exps, cplx c) {
    MultiPoly p(nvars);
    if (exps.size() != static_cast<size_t>(nvars))
      throw InputError("MultiPoly::from_monomial: exponent arity mismatch");
    p.add_term(Monomial{std::move(exps)}, c);
    p.prune();
    return p;
  }

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Degree of the zero polynomial is reported as 0.
  uint32_t total_degree() const {
    return terms_.empty() ? 0 : terms_.begin()->first.total_degree();
  }

  double max_coeff_modulus() const {
    double m = 0.0;
    for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  cplx coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? cplx(0.0, 0.0) : it->second;
  }

  cplx coeff(std::vector<uint32_t> exps) const {
    return coeff(Monomial{std::move(exps)});
  }

  // Low-level accumulation; callers must finish with prune().
  void add_term(const Monomial& m, cplx c) {
    if (m.exps.size() != static_cast<size_t>(nvars_))
      throw InputError("MultiPoly::add_term: exponent arity mismatch");
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) it->second += c;
  }

  void prune() {
    double maxmod = max_coeff_modulus();
    double threshold = kPruneRel * (1.0 + maxmod);
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) < threshold)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    check_arity(a, b, "add");
    MultiPoly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    r.prune();
    return r;
  }

  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
    check_arity(a, b, "sub");
    MultiPoly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    r.prune();
    return r;
  }

  MultiPoly operator-() const {
    MultiPoly r(nvars_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    check_arity(a, b, "mul");
    MultiPoly r(a.nvars_);
    Monomial m{std::vector<uint32_t>(static_cast<size_t>(a.nvars_), 0)};
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        for (size_t i = 0; i < m.exps.size(); ++i)
          m.exps[i] = ma.exps[i] + mb.exps[i];
        r.add_term(m, ca * cb);
      }
    }
    r.prune();
    return r;
  }

  friend MultiPoly operator*(const MultiPoly& a, cplx s) {
    MultiPoly r(a.nvars_);
    for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, c * s);
    r.prune();
    return r;
  }

  friend MultiPoly operator*(cplx s, const MultiPoly& a) { return a * s; }

  // acc += sign * a * b without intermediate polynomials; prune afterwards.
  static void fma(MultiPoly& acc, const MultiPoly& a, const MultiPoly& b,
                  double sign) {
    check_arity(a, b, "fma");
    check_arity(acc, a, "fma");
    Monomial m{std::vector<uint32_t>(static_cast<size_t>(a.nvars_), 0)};
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        for (size_t i = 0; i < m.exps.size(); ++i)
          m.exps[i] = ma.exps[i] + mb.exps[i];
        acc.add_term(m, sign * (ca * cb));
      }
    }
  }

 private:
  static void check_arity(const MultiPoly& a, const MultiPoly& b,
                          const char* op) {
    if (a.nvars_ != b.nvars_)
      throw InputError(std::string("MultiPoly ") + op + ": arity mismatch");
  }

  int nvars_;
  Terms terms_;
};

inline MultiPoly partial(const MultiPoly& p, int var_index) {
  if (var_index < 0 || var_index >= p.nvars())
    throw InputError("partial: variable index out of range");
  MultiPoly r(p.nvars());
  size_t v = static_cast<size_t>(var_index);
  for (const auto& [m, c] : p.terms()) {
    if (m.exps[v] == 0) continue;
    Monomial d = m;
    d.exps[v] -= 1;
    r.add_term(d, c * static_cast<double>(m.exps[v]));
  }
  r.prune();
  return r;
}

inline cplx pow_uint(cplx base, uint32_t e) {
  cplx r(1.0, 0.0);
  for (uint32_t i = 0; i < e; ++i) r *= base;
  return r;
}

inline cplx evaluate(const MultiPoly& p, const std::vector<cplx>& point) {
  if (point.size() != static_cast<size_t>(p.nvars()))
    throw InputError("evaluate: point arity mismatch");
  cplx sum(0.0, 0.0);
  for (const auto& [m, c] : p.terms()) {
    cplx term = c;
    for (size_t i = 0; i < point.size(); ++i)
      if (m.exps[i] != 0) term *= pow_uint(point[i], m.exps[i]);
    sum += term;
  }
  return sum;
}

// Per-monomial comparison: |coeff_a - coeff_b| <= tol * (1 + max coefficient
// modulus over both polynomials), over the union of supports.
inline bool canonical_equal(const MultiPoly& a, const MultiPoly& b, double tol) {
  if (a.nvars() != b.nvars())
    throw InputError("canonical_equal: arity mismatch");
  if (tol <= 0.0) throw InputError("canonical_equal: tol must be positive");
  double scale =
      1.0 + std::max(a.max_coeff_modulus(), b.max_coeff_modulus());
  auto ita = a.terms().begin();
  auto itb = b.terms().begin();
  GrlexGreater before;
  while (ita != a.terms().end() || itb != b.terms().end()) {
    cplx ca(0.0, 0.0), cb(0.0, 0.0);
    if (itb == b.terms().end() ||
        (ita != a.terms().end() && before(ita->first, itb->first))) {
      ca = ita->second;
      ++ita;
    } else if (ita == a.terms().end() || before(itb->first, ita->first)) {
      cb = itb->second;
      ++itb;
    } else {
      ca = ita->second;
      cb = itb->second;
      ++ita;
      ++itb;
    }
    if (std::abs(ca - cb) > tol * scale) return false;
  }
  return true;
}

// Largest per-monomial coefficient difference over the union of supports.
inline double max_coeff_diff(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars() != b.nvars())
    throw InputError("max_coeff_diff: arity mismatch");
  double worst = 0.0;
  for (const auto& [m, c] : a.terms())
    worst = std::max(worst, std::abs(c - b.coeff(m)));
  for (const auto& [m, c] : b.terms())
    worst = std::max(worst, std::abs(a.coeff(m) - c));
  return worst;
}

// Terms whose exponent of `var` equals `power`, with that exponent zeroed.
// Extracts q_m from the z0-expansion without changing arity.
inline MultiPoly coeff_of_var(const MultiPoly& p, int var_index,
                              uint32_t power) {
  if (var_index < 0 || var_index >= p.nvars())
    throw InputError("coeff_of_var: variable index out of range");
  MultiPoly r(p.nvars());
  size_t v = static_cast<size_t>(var_index);
  for (const auto& [m, c] : p.terms()) {
    if (m.exps[v] != power) continue;
    Monomial d = m;
    d.exps[v] = 0;
    r.add_term(d, c);
  }
  r.prune();
  return r;
}

// Multiply by var^power (exponent shift; exact).
inline MultiPoly mul_var_power(const MultiPoly& p, int var_index,
                               uint32_t power) {
  if (var_index < 0 || var_index >= p.nvars())
    throw InputError("mul_var_power: variable index out of range");
  MultiPoly r(p.nvars());
  size_t v = static_cast<size_t>(var_index);
  for (const auto& [m, c] : p.terms()) {
    Monomial d = m;
    d.exps[v] += power;
    r.add_term(d, c);
  }
  r.prune();
  return r;
}

inline MultiPoly swap_vars(const MultiPoly& p, int i, int j) {
  if (i < 0 || i >= p.nvars() || j < 0 || j >= p.nvars())
    throw InputError("swap_vars: variable index out of range");
  MultiPoly r(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    Monomial d = m;
    std::swap(d.exps[static_cast<size_t>(i)], d.exps[static_cast<size_t>(j)]);
    r.add_term(d, c);
  }
  r.prune();
  return r;
}

inline MultiPoly poly_pow(const MultiPoly& p, uint32_t e) {
  MultiPoly r = MultiPoly::constant(p.nvars(), 1.0);
  for (uint32_t i = 0; i < e; ++i) r = r * p;
  return r;
}

// p composed with subs: variable i is replaced by subs[i].  All substituted
// polynomials must share an arity, which becomes the result's arity.
inline MultiPoly substitute(const MultiPoly& p,
                            const std::vector<MultiPoly>& subs) {
  if (subs.size() != static_cast<size_t>(p.nvars()))
    throw InputError("substitute: need one replacement per variable");
  int out_arity = subs.front().nvars();
  for (const auto& s : subs)
    if (s.nvars() != out_arity)
      throw InputError("substitute: replacement arity mismatch");

  // Memoize powers of each replacement up to its largest needed exponent.
  std::vector<uint32_t> max_exp(subs.size(), 0);
  for (const auto& [m, c] : p.terms())
    for (size_t i = 0; i < subs.size(); ++i)
      max_exp[i] = std::max(max_exp[i], m.exps[i]);
  std::vector<std::vector<MultiPoly>> powers(subs.size());
  for (size_t i = 0; i < subs.size(); ++i) {
    powers[i].push_back(MultiPoly::constant(out_arity, 1.0));
    for (uint32_t e = 1; e <= max_exp[i]; ++e)
      powers[i].push_back(powers[i].back() * subs[i]);
  }

  MultiPoly r(out_arity);
  for (const auto& [m, c] : p.terms()) {
    MultiPoly term = MultiPoly::constant(out_arity, c);
    for (size_t i = 0; i < subs.size(); ++i)
      if (m.exps[i] != 0) term = term * powers[i][m.exps[i]];
    r = r + term;
  }
  return r;
}

}  // namespace qpencil
