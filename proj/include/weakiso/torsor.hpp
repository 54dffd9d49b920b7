#pragma once

#include <vector>

#include "weakiso/quad.hpp"

namespace weakiso {

// Element of (O_K/qO_K)^x / (Z/qZ)^x, held as the canonical representative:
// (x, 1) with 0 <= x < q when the omega-coordinate is a unit, else (1, 0).
struct TorsorElement {
  Int x, y;
  Int q;
  Int d;  // field discriminant, for group-mismatch detection

  bool operator==(const TorsorElement& o) const { return x == o.x && y == o.y && q == o.q && d == o.d; }
  bool operator<(const TorsorElement& o) const {
    if (y != o.y) return y < o.y;
    return x < o.x;
  }
  std::string str() const;
};

// The quotient group (O_K/qO_K)^x / (Z/qZ)^x for q inert in K: cyclic of order q+1.
// F_{q^2} is realized as residues mod (q, minimal polynomial of omega).
class TorsorGroup {
 public:
  TorsorGroup(const Discriminant& d, const Int& q);

  const Discriminant& disc() const { return d_; }
  const Int& modulus() const { return q_; }
  Int order() const { return q_ + 1; }

  TorsorElement identity() const;
  TorsorElement embed(const QuadInteger& alpha) const;
  TorsorElement mul(const TorsorElement& a, const TorsorElement& b) const;
  TorsorElement inv(const TorsorElement& a) const;
  TorsorElement pow(const TorsorElement& a, const Int& e) const;
  // all solutions of beta^g = t, sorted canonically; empty when t is not a g-th power
  std::vector<TorsorElement> gth_roots(const TorsorElement& t, const Int& g) const;
  // the q+1 elements in canonical order
  std::vector<TorsorElement> elements() const;

 private:
  TorsorElement normalize(const Int& x, const Int& y) const;
  void check_member(const TorsorElement& a) const;

  Discriminant d_;
  Int q_;
};

// Smallest `count` primes q <= bound with q inert in K, q = -1 mod g, and the class of
// alpha a g-th power in the order-(q+1) group; direct search, increasing order.
std::vector<Int> find_q(const Discriminant& d, const Int& g, const QuadInteger& alpha, const Int& count,
                        const Int& bound);

}  // namespace weakiso
