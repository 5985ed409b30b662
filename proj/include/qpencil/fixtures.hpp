#pragma once

// Deterministic, portable fixture generation.
//
// PRNG: xorshift64* seeded through one splitmix64 scramble.
//   state ^= state >> 12; state ^= state << 25; state ^= state >> 27;
//   output = state * 0x2545F4914F6CDD1D
// Doubles take the top 53 bits: (output >> 11) * 2^-53, uniform in [0,1).
// The same seed produces the same stream on every platform; acceptance
// fixtures and the CLI `gen` command rely on that.

#include <cstdint>
#include <vector>

#include "qpencil/matrix.hpp"

namespace qpencil {

class Xorshift64Star {
 public:
  explicit Xorshift64Star(uint64_t seed) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    state_ = z ? z : 0x9E3779B97F4A7C15ull;  // state must never be zero
  }

  uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  double next_double() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double next_symmetric() {  // [-1, 1)
    return 2.0 * next_double() - 1.0;
  }

  // Uniform on the closed unit disc via rejection from the square.
  cplx next_unit_disc() {
    for (;;) {
      double re = next_symmetric(), im = next_symmetric();
      if (re * re + im * im <= 1.0) return {re, im};
    }
  }

  // Uniform integer in [lo, hi]; fixture-grade (modulo bias is irrelevant here).
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
  }

 private:
  uint64_t state_;
};

inline CMatrix random_matrix(Xorshift64Star& rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (cplx& v : m.a) v = rng.next_unit_disc();
  return m;
}

inline CMatrix random_real_matrix(Xorshift64Star& rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (cplx& v : m.a) v = rng.next_symmetric();
  return m;
}

inline CMatrix random_hermitian(Xorshift64Star& rng, int k) {
  return hermitian_part(random_matrix(rng, k, k));
}

inline CMatrix random_unitary(Xorshift64Star& rng, int k) {
  for (;;) {
    try {
      return orthonormalize(random_matrix(rng, k, k));
    } catch (const DependentColumnError&) {
      // vanishing probability; redraw
    }
  }
}

inline CMatrix random_real_orthogonal(Xorshift64Star& rng, int n) {
  for (;;) {
    try {
      return orthonormalize(random_real_matrix(rng, n, n));
    } catch (const DependentColumnError&) {
    }
  }
}

// V V* for an orthonormalized random k x r block; rank 0 gives the zero matrix.
inline CMatrix random_projection(Xorshift64Star& rng, int k, int rank) {
  if (rank <= 0) return CMatrix(k, k);
  if (rank >= k) return CMatrix::identity(k);
  CMatrix v = orthonormalize(random_matrix(rng, k, rank));
  return v * v.adjoint();
}

}  // namespace qpencil
