// Computes the characteristic polynomial of a reflection tuple and recovers
// the Coxeter matrix back from it, for a rank-2 and a rank-3 system.

#include <iostream>

#include "qpencil/qpencil.hpp"

using namespace qpencil;

static void roundtrip(const CoxeterMatrix& cm, const char* name) {
  MultiPoly q = coxeter_charpoly(cm);
  CoxeterMatrix back = recover_coxeter(q);
  std::cout << name << " charpoly:\n" << json_text(poly_to_json(q));
  std::cout << name << " recovered: " << json_text(coxeter_to_json(back));
}

int main() {
  CoxeterMatrix a2{2, {{1, 3}, {3, 1}}};
  roundtrip(a2, "A2");

  CoxeterMatrix b3{3, {{1, 4, 2}, {4, 1, 3}, {2, 3, 1}}};
  roundtrip(b3, "B3");
  return 0;
}
