#pragma once

#include "weakiso/forms.hpp"
#include "weakiso/quad.hpp"

namespace weakiso {

// rank-2 lattice in K = Q(sqrt(d)), spanned by a/den and (b + c*omega)/den
// canonical form: den, a, c > 0, 0 <= b < a, gcd(den, a, b, c) = 1
class Lattice {
 public:
  // canonicalize the span of rows (x_i + y_i*omega)/den
  Lattice(const Discriminant& d, const Int& den, std::vector<std::pair<Int, Int>> rows);

  static Lattice order_lattice(const Discriminant& d, const Int& conductor);
  static Lattice maximal(const Discriminant& d) { return order_lattice(d, 1); }

  const Discriminant& disc() const { return d_; }
  const Int& den() const { return den_; }
  const Int& a() const { return a_; }
  const Int& b() const { return b_; }
  const Int& c() const { return c_; }

  // generators as (x, y) pairs over den
  std::pair<Int, Int> gen1() const { return {a_, Int(0)}; }
  std::pair<Int, Int> gen2() const { return {b_, c_}; }

  Lattice scale(const QuadInteger& alpha) const;
  Lattice scale_rat(const Rat& s) const;
  Lattice sum(const Lattice& o) const;
  Lattice mul(const Lattice& o) const;

  bool contains(const Rat& x, const Rat& y) const;  // x + y*omega in the lattice?
  bool contains_lattice(const Lattice& o) const;

  // [super : this] for this contained in super, via determinant ratio
  Int index_in(const Lattice& super) const;

  // exact multiplier ring {lambda in K : lambda * L in L}
  QuadOrder multiplier_ring() const;

  // proper ideal class of the homothety class; discriminant cross-checked against the multiplier ring
  IdealClass ideal_class() const;

  bool operator==(const Lattice& o) const {
    return d_ == o.d_ && den_ == o.den_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_;
  }
  bool operator!=(const Lattice& o) const { return !(*this == o); }
  bool operator<(const Lattice& o) const {  // canonical ordering for deterministic choices
    if (den_ != o.den_) return den_ < o.den_;
    if (a_ != o.a_) return a_ < o.a_;
    if (b_ != o.b_) return b_ < o.b_;
    return c_ < o.c_;
  }

  std::string str() const;

 private:
  Discriminant d_;
  Int den_, a_, b_, c_;
};

// standard lattice of the proper ideal attached to a form of disc f^2*d_K
Lattice ideal_of_form(const QuadraticForm& f, const QuadOrder& order);

}  // namespace weakiso
