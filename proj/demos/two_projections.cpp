// Walks one pair of projections end to end: characteristic polynomial,
// invariants, closed-form reconstruction, canonical form, and an equivalence
// check against a conjugated copy of the same pair.

#include <iostream>

#include "qpencil/qpencil.hpp"

using namespace qpencil;

int main() {
  ProjectionPair pp;
  pp.k = 2;
  pp.p = CMatrix::diag({1.0, 0.0});
  pp.q = CMatrix(2, 2);
  pp.q.at(0, 0) = 0.5;
  pp.q.at(0, 1) = 0.5;
  pp.q.at(1, 0) = 0.5;
  pp.q.at(1, 1) = 0.5;

  std::cout << "pair charpoly:\n" << json_text(poly_to_json(pair_charpoly(pp)));

  HalmosInvariants inv = halmos_invariants(pp);
  std::cout << "invariants:\n" << json_text(invariants_to_json(inv));
  std::cout << "closed-form reconstruction residual: "
            << max_coeff_diff(cpp_polynomial(inv), pair_charpoly(pp)) << "\n";

  CanonicalForm cf = canonical_form(pp);
  std::cout << "canonical residual: " << cf.residual << "\n";

  Xorshift64Star rng(2024);
  CMatrix u = random_unitary(rng, 2);
  ProjectionPair conj{2, u * pp.p * u.adjoint(), u * pp.q * u.adjoint()};
  EquivalenceVerdict v = equivalent_pairs(pp, conj);
  std::cout << "conjugated copy equivalent: " << (v.equivalent ? "yes" : "no")
            << ", witness residual " << *v.witness_residual << "\n";
  return 0;
}
