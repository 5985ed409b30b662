#pragma once

// JSON wire formats.  Writers emit canonical layouts (terms in decreasing
// graded-lex order, row-major entries, alphabetical keys via nlohmann), so
// identical data serializes byte-identically.  Readers accept any term order
// and canonicalize on load.  All format violations surface as InputError.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpencil/coxeter.hpp"
#include "qpencil/errors.hpp"
#include "qpencil/matrix.hpp"
#include "qpencil/multipoly.hpp"
#include "qpencil/pencil.hpp"
#include "qpencil/projpair.hpp"

namespace qpencil {

using json = nlohmann::json;

// canonical output never carries a negative-zero byte pattern
inline double unsign_zero(double x) { return x == 0.0 ? 0.0 : x; }

// {"nvars": N, "terms": [{"exps": [e0,...], "re": r, "im": i}, ...]}
inline json poly_to_json(const MultiPoly& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    json t;
    t["exps"] = m.exps;
    t["re"] = unsign_zero(c.real());
    t["im"] = unsign_zero(c.imag());
    terms.push_back(std::move(t));
  }
  return json{{"nvars", p.nvars()}, {"terms", std::move(terms)}};
}

inline MultiPoly poly_from_json(const json& j) {
  try {
    int nvars = j.at("nvars").get<int>();
    MultiPoly p(nvars);
    for (const json& t : j.at("terms")) {
      Monomial m;
      m.exps = t.at("exps").get<std::vector<uint32_t>>();
      p.add_term(m, cplx(t.at("re").get<double>(), t.at("im").get<double>()));
    }
    p.prune();
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("polynomial JSON: ") + e.what());
  }
}

// {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major
inline json matrix_to_json(const CMatrix& m) {
  json entries = json::array();
  for (const cplx& c : m.a)
    entries.push_back(json::array({unsign_zero(c.real()), unsign_zero(c.imag())}));
  return json{{"rows", m.rows}, {"cols", m.cols}, {"entries", std::move(entries)}};
}

inline CMatrix matrix_from_json(const json& j) {
  try {
    int rows = j.at("rows").get<int>();
    int cols = j.at("cols").get<int>();
    if (rows < 1 || cols < 1) throw InputError("matrix JSON: dimensions must be positive");
    const json& entries = j.at("entries");
    if (static_cast<int>(entries.size()) != rows * cols)
      throw InputError("matrix JSON: entry count does not match dimensions");
    CMatrix m(rows, cols);
    size_t idx = 0;
    for (const json& e : entries) {
      if (!e.is_array() || e.size() != 2)
        throw InputError("matrix JSON: each entry must be [re, im]");
      m.a[idx++] = cplx(e[0].get<double>(), e[1].get<double>());
    }
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("matrix JSON: ") + e.what());
  }
}

// {"k": k, "matrices": [matrix, ...]}
inline json tuple_to_json(const MatrixTuple& t) {
  json mats = json::array();
  for (const CMatrix& m : t.mats) mats.push_back(matrix_to_json(m));
  return json{{"k", t.k}, {"matrices", std::move(mats)}};
}

inline MatrixTuple tuple_from_json(const json& j) {
  try {
    MatrixTuple t;
    t.k = j.at("k").get<int>();
    for (const json& m : j.at("matrices")) t.mats.push_back(matrix_from_json(m));
    validate_tuple(t);
    return t;
  } catch (const json::exception& e) {
    throw InputError(std::string("tuple JSON: ") + e.what());
  }
}

// {"k": k, "p": matrix, "q": matrix}
inline json pair_to_json(const ProjectionPair& pp) {
  return json{{"k", pp.k}, {"p", matrix_to_json(pp.p)}, {"q", matrix_to_json(pp.q)}};
}

inline ProjectionPair pair_from_json(const json& j) {
  try {
    ProjectionPair pp;
    pp.k = j.at("k").get<int>();
    pp.p = matrix_from_json(j.at("p"));
    pp.q = matrix_from_json(j.at("q"));
    validate_pair(pp);
    return pp;
  } catch (const json::exception& e) {
    throw InputError(std::string("pair JSON: ") + e.what());
  }
}

// {"n": n, "m": [[1,3],[3,1]]} with "inf" as the infinite entry
inline json coxeter_to_json(const CoxeterMatrix& cm) {
  json grid = json::array();
  for (const auto& row : cm.m) {
    json r = json::array();
    for (int v : row) {
      if (v == kCoxeterInfinity)
        r.push_back("inf");
      else
        r.push_back(v);
    }
    grid.push_back(std::move(r));
  }
  return json{{"n", cm.n}, {"m", std::move(grid)}};
}

inline CoxeterMatrix coxeter_from_json(const json& j) {
  try {
    CoxeterMatrix cm;
    cm.n = j.at("n").get<int>();
    for (const json& row : j.at("m")) {
      std::vector<int> r;
      for (const json& v : row) {
        if (v.is_string()) {
          if (v.get<std::string>() != "inf")
            throw InputError("coxeter JSON: the only string entry allowed is \"inf\"");
          r.push_back(kCoxeterInfinity);
        } else {
          r.push_back(v.get<int>());
        }
      }
      cm.m.push_back(std::move(r));
    }
    validate_coxeter(cm);
    return cm;
  } catch (const json::exception& e) {
    throw InputError(std::string("coxeter JSON: ") + e.what());
  }
}

inline json invariants_to_json(const HalmosInvariants& inv) {
  return json{{"k1", inv.k1},
              {"k2", inv.k2},
              {"k3", inv.k3},
              {"k4", inv.k4},
              {"m0", inv.m0},
              {"h_spectrum", inv.h_spectrum},
              {"near_band_edge", inv.near_band_edge}};
}

inline json verdict_to_json(const EquivalenceVerdict& v) {
  json inv = invariants_to_json(v.inv_a);
  // the flag covers the whole decision, whichever side is close to a band edge
  inv["near_band_edge"] = v.inv_a.near_band_edge || v.inv_b.near_band_edge;
  json witness = v.witness ? matrix_to_json(*v.witness) : json(nullptr);
  json residual = v.witness_residual ? json(*v.witness_residual) : json(nullptr);
  return json{{"equivalent", v.equivalent},
              {"poly_equal", v.poly_equal},
              {"trace_words_equal", v.trace_words_equal},
              {"witness", std::move(witness)},
              {"witness_residual", std::move(residual)},
              {"invariants", std::move(inv)}};
}

inline json factors_to_json(const std::vector<Factor>& fs) {
  json arr = json::array();
  for (const Factor& f : fs) {
    json e{{"type", f.quadratic ? "quadratic" : "linear"},
           {"factor", poly_to_json(f.poly)},
           {"multiplicity", f.multiplicity}};
    if (f.quadratic) {
      e["x"] = f.x;
      e["irreducible"] = f.irreducible;
    }
    arr.push_back(std::move(e));
  }
  return arr;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("JSON parse failure in " + path + ": " + e.what());
  }
}

inline std::string json_text(const json& j) { return j.dump(2) + "\n"; }

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out << json_text(j);
  if (!out) throw InputError("write failure: " + path);
}

}  // namespace qpencil
