#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "weakiso/products.hpp"
#include "weakiso/psi_map.hpp"

namespace weakiso {

struct GenConfig {
  long g = 2;             // factor count, at least 2
  std::optional<Int> p;   // positive-characteristic constraint: p must split in the field
  std::optional<Int> ell; // pin the chain prime instead of taking the smallest split one
  long depth = 1;         // largest point index i
  Int field_bound = Int(200);
  Int prime_bound = Int(5000);
  std::uint64_t seed = 1;  // recorded for replay; every choice below is canonical
};

// one constructed companion point: the twisted kernel downstairs, the chain marker
// on the quotient (whose parent is the point's curve), and the two-route certificate
// tying its image to the anchor's image
struct PartnerPoint {
  MarkedSubgroup kernel;
  MarkedSubgroup point;
  WeakIsoCertificate certificate;
};

struct PairFamily {
  GenConfig cfg;
  Discriminant field;
  Int ell;
  QuadInteger alpha;
  std::vector<Int> qs;
  CMCurve base;
  std::vector<MarkedSubgroup> xs;                 // xs[i] is the point of index i
  std::map<long, std::vector<PartnerPoint>> partners;
};

// search stage: field with trivial units (p split when requested), then the smallest
// split prime realized by a principal element, then the inert prime sequence; search
// failures carry the stage name
PairFamily setup(const GenConfig& cfg);

// canonical kernel of index i: the sum of the first subgroup of each order q_1 .. q_i,
// "first" meaning the lexicographically smallest witness, whose coordinate is the
// torsor identity
MarkedSubgroup canonical_kernel(const PairFamily& fam, long i);

// the index-i point: quotient by the canonical kernel, marked with the norm-ell chain
// of length matching det A; index 0 gives the base curve itself
MarkedSubgroup build_x(const PairFamily& fam, long i, const SymPosDefIntMatrix& A);

// all points y whose A'-image is weakly isomorphic to the A-image of the point with
// the given kernel: one per solution tuple of the g-th root equation, exactly g^i of
// them; every certificate is verified before return and any failure is an integrity
// error, as is any collision between the returned points
std::vector<PartnerPoint> partners(const PairFamily& fam, const MarkedSubgroup& kernel,
                                   const SymPosDefIntMatrix& A, const SymPosDefIntMatrix& Aprime);
std::vector<PartnerPoint> partners(const PairFamily& fam, long i, const SymPosDefIntMatrix& A,
                                   const SymPosDefIntMatrix& Aprime);

// end to end: setup, then points and partner lists for every index up to depth
PairFamily generate_family(const GenConfig& cfg, const SymPosDefIntMatrix& A,
                           const SymPosDefIntMatrix& Aprime);

}  // namespace weakiso
