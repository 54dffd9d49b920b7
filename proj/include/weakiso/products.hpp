#pragma once

#include <string>
#include <vector>

#include "weakiso/cm_curves.hpp"

namespace weakiso {

// product of CM elliptic curves, up to isomorphism as an unpolarized abelian variety
struct ProductVariety {
  std::vector<CMCurve> factors;

  explicit ProductVariety(std::vector<CMCurve> f);
  std::size_t g() const { return factors.size(); }
  std::string str() const;
};

struct FastPathRecord {
  bool applicable = false;
  bool verdict = false;  // meaningful only when applicable
  std::vector<Int> primes;
  std::string note;
};

struct OraclePathRecord {
  bool verdict = false;
};

// both decision routes plus a digest binding the certificate to its inputs;
// when the fast path applies its verdict must equal the oracle's (hard-checked)
struct WeakIsoCertificate {
  bool verdict = false;
  FastPathRecord fast_path;
  OraclePathRecord oracle_path;
  std::string inputs_digest;
};

// torsor congruence: embed(prod alpha_i) = embed(prod beta_i) in G̃_q.
// Requires trivial units (d not in {-3, -4}) and every entry prime to q.
bool criterion_fast(const std::vector<QuadInteger>& alphas, const std::vector<QuadInteger>& betas,
                    const TorsorGroup& G);

// product of proper ideal classes, the module-theoretic invariant of O^(g-1) ⊕ I
IdealClass product_steinitz(const std::vector<IdealClass>& classes);

// module-theoretic route, fully independent of the torsor: group factors by multiplier
// ring, compare counts and per-ring Steinitz classes. Mismatched ring multisets are a
// definitive false; equal multisets with equal classes a definitive true; a per-ring class
// mismatch across several rings is refused (unsupported_case) rather than guessed.
bool oracle_slow(const ProductVariety& P1, const ProductVariety& P2);

// run both routes and certify; disagreement between an applicable fast path and the
// oracle raises integrity_error with the inputs dumped
WeakIsoCertificate weak_iso_products(const ProductVariety& P1, const ProductVariety& P2);

// deterministic textual form of the pair of products, the preimage of inputs_digest
std::string canonical_dump(const ProductVariety& P1, const ProductVariety& P2);

}  // namespace weakiso
