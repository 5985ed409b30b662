// Batch front end over the qpencil library.  Subcommands read and write the
// JSON formats documented in the README; outputs are deterministic, so the
// same inputs (or the same --seed) always produce byte-identical files.
//
// Exit codes: 0 success (or: pairs equivalent), 1 invalid input or bad
// arguments, 2 decided negative (pairs not equivalent), 3 numerical or
// internal failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qpencil/qpencil.hpp"

namespace {

using qpencil::json;

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << qpencil::json_text(j);
  else
    qpencil::write_json_file(out_path, j);
}

struct Args {
  std::string tuple_path;
  std::string pair_a, pair_b;
  std::string coxeter_path, poly_path;
  std::string in_path, out_path, witness_out;
  std::string method = "det";
  std::string gen_kind;
  double tol_charpoly = 1e-8;
  double tol_equiv = 1e-7;
  int k = 2;
  int n = 1;
  uint64_t seed = 0;
};

int cmd_charpoly(const Args& a) {
  qpencil::MatrixTuple t = qpencil::tuple_from_json(qpencil::read_json_file(a.tuple_path));
  json out;
  if (a.method == "det") {
    out = qpencil::poly_to_json(qpencil::charpoly_det(t));
  } else if (a.method == "ps") {
    out = qpencil::poly_to_json(qpencil::charpoly_ps(t));
  } else {
    qpencil::MultiPoly qdet = qpencil::charpoly_det(t);
    qpencil::MultiPoly qps = qpencil::charpoly_ps(t);
    if (!qpencil::canonical_equal(qdet, qps, a.tol_charpoly))
      throw qpencil::NumericalError("charpoly: determinant and power-sum results disagree");
    out = qpencil::poly_to_json(qdet);
    out["agreement"] = true;
  }
  emit(out, a.out_path);
  return 0;
}

int cmd_analyze(const Args& a) {
  qpencil::ProjectionPair pp = qpencil::pair_from_json(qpencil::read_json_file(a.pair_a));
  qpencil::HalmosInvariants inv = qpencil::halmos_invariants(pp);
  double residual =
      qpencil::max_coeff_diff(qpencil::cpp_polynomial(inv), qpencil::pair_charpoly(pp));
  json out{{"invariants", qpencil::invariants_to_json(inv)},
           {"factors", qpencil::factors_to_json(qpencil::factorization(inv))},
           {"generic", inv.k1 == 0 && inv.k2 == 0 && inv.k3 == 0 && inv.k4 == 0},
           {"reconstruction_residual", residual}};
  emit(out, a.out_path);
  return 0;
}

int cmd_equiv(const Args& a) {
  qpencil::ProjectionPair pa = qpencil::pair_from_json(qpencil::read_json_file(a.pair_a));
  qpencil::ProjectionPair pb = qpencil::pair_from_json(qpencil::read_json_file(a.pair_b));
  qpencil::EquivalenceVerdict v = qpencil::equivalent_pairs(pa, pb, a.tol_equiv);
  emit(qpencil::verdict_to_json(v), a.out_path);
  if (v.equivalent && !a.witness_out.empty())
    qpencil::write_json_file(a.witness_out, qpencil::matrix_to_json(*v.witness));
  return v.equivalent ? 0 : 2;
}

int cmd_coxeter(const std::string& sub, const Args& a) {
  if (sub == "recover") {
    qpencil::MultiPoly q = qpencil::poly_from_json(qpencil::read_json_file(a.poly_path));
    emit(qpencil::coxeter_to_json(qpencil::recover_coxeter(q)), a.out_path);
    return 0;
  }
  qpencil::CoxeterMatrix cm = qpencil::coxeter_from_json(qpencil::read_json_file(a.coxeter_path));
  if (sub == "tits")
    emit(qpencil::tuple_to_json(qpencil::coxeter_tuple(cm)), a.out_path);
  else if (sub == "charpoly")
    emit(qpencil::poly_to_json(qpencil::coxeter_charpoly(cm)), a.out_path);
  else
    emit(qpencil::tuple_to_json(qpencil::hyperplane_projections(cm)), a.out_path);
  return 0;
}

int cmd_gen(const Args& a) {
  if (a.out_path.empty()) throw qpencil::InputError("gen: --out is required");
  qpencil::Xorshift64Star rng(a.seed);
  if (a.gen_kind == "random-projection-pair") {
    if (a.k < 1) throw qpencil::InputError("gen: k must be >= 1");
    int rank_p = rng.next_int(0, a.k);
    int rank_q = rng.next_int(0, a.k);
    qpencil::ProjectionPair pp;
    pp.k = a.k;
    pp.p = qpencil::random_projection(rng, a.k, rank_p);
    pp.q = qpencil::random_projection(rng, a.k, rank_q);
    qpencil::write_json_file(a.out_path, qpencil::pair_to_json(pp));
    return 0;
  }
  if (a.gen_kind == "random-tuple") {
    if (a.k < 1 || a.n < 1) throw qpencil::InputError("gen: k and n must be >= 1");
    qpencil::MatrixTuple t;
    t.k = a.k;
    for (int i = 0; i < a.n; ++i) t.mats.push_back(qpencil::random_matrix(rng, a.k, a.k));
    qpencil::write_json_file(a.out_path, qpencil::tuple_to_json(t));
    return 0;
  }
  // conjugate: apply one random unitary to every matrix in a pair or tuple file
  if (a.in_path.empty()) throw qpencil::InputError("gen conjugate: --in is required");
  json j = qpencil::read_json_file(a.in_path);
  if (j.contains("p")) {
    qpencil::ProjectionPair pp = qpencil::pair_from_json(j);
    qpencil::CMatrix u = qpencil::random_unitary(rng, pp.k);
    pp.p = u * pp.p * u.adjoint();
    pp.q = u * pp.q * u.adjoint();
    qpencil::write_json_file(a.out_path, qpencil::pair_to_json(pp));
  } else {
    qpencil::MatrixTuple t = qpencil::tuple_from_json(j);
    qpencil::CMatrix u = qpencil::random_unitary(rng, t.k);
    for (qpencil::CMatrix& m : t.mats) m = u * m * u.adjoint();
    qpencil::write_json_file(a.out_path, qpencil::tuple_to_json(t));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Args args;
  CLI::App app{"characteristic polynomials of matrix pencils, projection pairs, and Coxeter tuples"};
  app.require_subcommand(1);

  CLI::App* charpoly = app.add_subcommand("charpoly", "characteristic polynomial of a tuple file");
  charpoly->add_option("tuple", args.tuple_path, "tuple JSON file")->required();
  charpoly->add_option("--method", args.method, "det, ps, or both (default det)")
      ->check(CLI::IsMember({"det", "ps", "both"}));
  charpoly->add_option("--tol", args.tol_charpoly,
                       "agreement tolerance for --method both (default 1e-8)")
      ->check(CLI::PositiveNumber);
  charpoly->add_option("--out", args.out_path, "write JSON here instead of stdout");

  CLI::App* projpair = app.add_subcommand("projpair", "projection-pair analysis and equivalence");
  projpair->require_subcommand(1);
  CLI::App* analyze = projpair->add_subcommand("analyze", "invariants, factors, generic flag");
  analyze->add_option("pair", args.pair_a, "pair JSON file")->required();
  analyze->add_option("--out", args.out_path, "write JSON here instead of stdout");
  CLI::App* equiv = projpair->add_subcommand("equiv", "decide unitary equivalence of two pairs");
  equiv->add_option("a", args.pair_a, "first pair JSON file")->required();
  equiv->add_option("b", args.pair_b, "second pair JSON file")->required();
  equiv->add_option("--tol", args.tol_equiv,
                    "polynomial equality tolerance (default 1e-7); witness gates are fixed")
      ->check(CLI::PositiveNumber);
  equiv->add_option("--witness-out", args.witness_out, "write the witness matrix here");
  equiv->add_option("--out", args.out_path, "write verdict JSON here instead of stdout");

  CLI::App* coxeter = app.add_subcommand("coxeter", "Coxeter matrices and reflection tuples");
  coxeter->require_subcommand(1);
  CLI::App* tits = coxeter->add_subcommand("tits", "reflection-representation generators");
  tits->add_option("coxeter", args.coxeter_path, "coxeter JSON file")->required();
  tits->add_option("--out", args.out_path, "write JSON here instead of stdout");
  CLI::App* cxcp = coxeter->add_subcommand("charpoly", "characteristic polynomial of the tuple");
  cxcp->add_option("coxeter", args.coxeter_path, "coxeter JSON file")->required();
  cxcp->add_option("--out", args.out_path, "write JSON here instead of stdout");
  CLI::App* recover = coxeter->add_subcommand("recover", "Coxeter matrix back from a polynomial");
  recover->add_option("poly", args.poly_path, "polynomial JSON file")->required();
  recover->add_option("--out", args.out_path, "write JSON here instead of stdout");
  CLI::App* hyper = coxeter->add_subcommand("hyperplanes", "hyperplane projection tuple");
  hyper->add_option("coxeter", args.coxeter_path, "coxeter JSON file")->required();
  hyper->add_option("--out", args.out_path, "write JSON here instead of stdout");

  CLI::App* gen = app.add_subcommand("gen", "seeded pseudo-random fixtures");
  gen->add_option("kind", args.gen_kind, "random-projection-pair, random-tuple, or conjugate")
      ->required()
      ->check(CLI::IsMember({"random-projection-pair", "random-tuple", "conjugate"}));
  gen->add_option("--k", args.k, "matrix size (default 2)");
  gen->add_option("--n", args.n, "tuple length for random-tuple (default 1)");
  gen->add_option("--seed", args.seed, "64-bit seed (default 0); same seed, same bytes");
  gen->add_option("--in", args.in_path, "input file for conjugate");
  gen->add_option("--out", args.out_path, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit clean, everything else is bad input
  }

  try {
    if (charpoly->parsed()) return cmd_charpoly(args);
    if (projpair->parsed()) return analyze->parsed() ? cmd_analyze(args) : cmd_equiv(args);
    if (coxeter->parsed()) {
      std::string sub = tits->parsed()     ? "tits"
                        : cxcp->parsed()   ? "charpoly"
                        : recover->parsed() ? "recover"
                                            : "hyperplanes";
      return cmd_coxeter(sub, args);
    }
    return cmd_gen(args);
  } catch (const qpencil::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const qpencil::CapabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const qpencil::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
