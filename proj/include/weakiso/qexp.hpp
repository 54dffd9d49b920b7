#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "weakiso/matrix.hpp"

namespace weakiso {

// symmetric positive semidefinite Q with integer diagonal and half-integer off-diagonal
// entries, stored as the integer matrix 2Q; these index the Fourier terms of a degree-g
// expansion. Positive semidefiniteness is certified by all principal minors of 2Q.
class HalfIntegralMatrix {
 public:
  explicit HalfIntegralMatrix(IntMatrix twice);
  static std::optional<HalfIntegralMatrix> try_make(IntMatrix twice);

  std::size_t g() const { return twice_.rows(); }
  const IntMatrix& twice() const { return twice_; }
  Int trace() const;                                  // tr(Q), integral by the diagonal constraint
  Int pair_trace(const SymPosDefIntMatrix& A) const;  // tr(A Q), integral for symmetric integer A

  bool operator==(const HalfIntegralMatrix& o) const { return twice_ == o.twice_; }
  bool operator<(const HalfIntegralMatrix& o) const;
  std::string str() const { return twice_.str(); }

 private:
  HalfIntegralMatrix() = default;
  IntMatrix twice_;
};

// finite formal sum of terms c(Q) q^Q with exact rational coefficients, or with
// coefficients in a prime field when constructed with a positive characteristic
class FormalQExpansion {
 public:
  explicit FormalQExpansion(const Int& characteristic = Int(0));

  const Int& characteristic() const { return char_; }
  // accumulate c onto the Q term; reduces modulo the characteristic, drops exact zeros
  void add_term(const HalfIntegralMatrix& Q, const Rat& c);
  const std::map<HalfIntegralMatrix, Rat>& coeffs() const { return coeffs_; }
  std::vector<HalfIntegralMatrix> support() const;
  bool is_zero() const { return coeffs_.empty(); }

  FormalQExpansion plus(const FormalQExpansion& o) const;

 private:
  Int char_;
  std::map<HalfIntegralMatrix, Rat> coeffs_;
};

// one-variable series obtained by restricting an expansion along A; absent keys are zero
struct PullbackSeries {
  Int characteristic;
  std::map<Int, Rat> terms;

  Rat at(const Int& n) const;
};

// exactly the positive semidefinite half-integral Q with tr(Q) <= t, canonically ordered.
// A negative bound yields the empty list.
std::vector<HalfIntegralMatrix> enumerate_bounded_trace(long g, const Int& t);

// restriction along A: the Q term lands on n = tr(A Q); colliding traces are summed
PullbackSeries pullback(const FormalQExpansion& f, const SymPosDefIntMatrix& A);

// rational symmetric positive definite E with pairwise distinct values tr(E Q) over S, and,
// when the plain traces over S are not all equal, tr(E Q) < t1 - t0 for every Q in S where
// t0 < t1 are the two smallest plain traces. All three conditions verified exactly.
RatMatrix minimizer_cone_sample(const std::vector<HalfIntegralMatrix>& S, std::uint64_t seed,
                                long budget = 64);

// matrix over Z[1/ell] within rounding distance of H, which must be close to determinant 1:
// H is factored into elementary transvections and each parameter is rounded to denominator
// ell^k. The result has determinant exactly 1 and only ell-power denominators.
RatMatrix approx_in_sl(const std::vector<std::vector<double>>& H, const Int& ell, long k);

// symmetric positive definite integer matrix of ell-power determinant whose pairing traces
// over S attain their minimum at a unique element; built by approximating the unit-determinant
// square root of I + minimizer_cone_sample(S), escalating precision until the uniqueness
// check passes in exact arithmetic
SymPosDefIntMatrix find_witness_matrix(const std::vector<HalfIntegralMatrix>& S, const Int& ell,
                                       std::uint64_t seed = 1);

struct NonvanishingWitness {
  SymPosDefIntMatrix A;
  Int n;   // smallest pairing trace over the support
  Rat c0;  // the coefficient surviving at n, never zero
};

// witness that the restriction of a nonzero expansion along a well-chosen A is nonzero: the
// unique trace minimizer contributes its coefficient unchanged to the pullback term at n
NonvanishingWitness nonvanishing_witness(const FormalQExpansion& f, const Int& ell,
                                         std::uint64_t seed = 1);

}  // namespace weakiso
