#pragma once

#include <utility>
#include <vector>

#include "weakiso/lattice.hpp"
#include "weakiso/torsor.hpp"

namespace weakiso {

// A CM elliptic curve, held as a lattice up to homothety; the multiplier ring and the
// proper ideal class determine it as an unpolarized abelian variety. The provenance
// records the torsor coordinate of each tracked quotient step.
struct CMCurve {
  QuadOrder order;
  IdealClass cls;
  Lattice lattice;
  std::vector<std::pair<Int, TorsorElement>> provenance;

  static CMCurve principal(const Discriminant& d);
  static CMCurve from_lattice(const Lattice& L, std::vector<std::pair<Int, TorsorElement>> prov = {});

  const Discriminant& disc() const { return lattice.disc(); }
  // exact representative equality (not the homothety relation; see weak_iso_curves)
  bool operator==(const CMCurve& o) const { return lattice == o.lattice; }
  std::string str() const;
};

// A finite subgroup of parent, described two ways at once: a lattice witness
// b with a = parent.lattice, a ⊆ b, [b : a] = modulus, and (when the parent has
// maximal order and the modulus is squarefree inert) torsor coordinates per prime.
struct MarkedSubgroup {
  CMCurve parent;
  Int modulus;
  std::vector<std::pair<Int, TorsorElement>> coords;
  Lattice witness;
};

MarkedSubgroup trivial_subgroup(const CMCurve& E);

// the q+1 order-q subgroups, canonically ordered by witness; q inert, prime to the conductor.
// For maximal-order parents each subgroup carries its torsor coordinate relative to the
// canonical basepoint (the lexicographically smallest witness); the assignment doubles as
// an exhaustive check that the torsor action is free and transitive.
std::vector<MarkedSubgroup> subgroups_of_order(const CMCurve& E, const Int& q);

// image subgroup alpha(C): witness alpha*b + a, coordinates multiplied by the class of alpha
MarkedSubgroup apply_endo(const QuadInteger& alpha, const MarkedSubgroup& C);

// combined subgroup C1 + C2 for coprime moduli on the same parent
MarkedSubgroup combine(const MarkedSubgroup& C1, const MarkedSubgroup& C2);

// the p-primary component of C, p a prime factor of the modulus
MarkedSubgroup component(const MarkedSubgroup& C, const Int& p);

// image of C under multiplication by m >= 1; order drops to modulus / gcd(m, modulus),
// coordinates survive at the primes that remain (rational scalars act trivially on lines)
MarkedSubgroup scale_subgroup(const MarkedSubgroup& C, const Int& m);

// E/C in the lattice model: the curve of the witness lattice, multiplier ring recomputed;
// provenance extended by the coordinates of C when tracked
CMCurve quotient(const CMCurve& E, const MarkedSubgroup& C);

// isomorphism as unpolarized abelian varieties: same multiplier ring, same proper class
bool weak_iso_curves(const CMCurve& E1, const CMCurve& E2);

// E_0 -> E_1 -> ... -> E_n with End(E_i) of conductor ell^i; at each step the subgroup
// avoids the kernel of the dual isogeny (the unique choice that would ascend), picking the
// canonically smallest admissible witness
std::vector<CMCurve> descending_chain(const CMCurve& E0, const Int& ell, long n);

// the cyclic-ell^n-isogeny point (E/C, ker) obtained by composing
// E/C -> E/alpha(C) -> ... -> E/alpha^n(C); ell = N(alpha) must be split
std::pair<CMCurve, MarkedSubgroup> alpha_chain(const CMCurve& E, const MarkedSubgroup& C,
                                               const QuadInteger& alpha, long n);

}  // namespace weakiso
