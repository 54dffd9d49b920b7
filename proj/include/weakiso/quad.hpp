#pragma once

#include <optional>
#include <set>
#include <string>

#include "weakiso/util.hpp"

namespace weakiso {

// negative fundamental discriminant of an imaginary quadratic field
class Discriminant {
 public:
  explicit Discriminant(const Int& d);

  const Int& value() const { return d_; }

  // norm of omega = (d + sqrt(d))/2, i.e. (d^2 - d)/4
  Int omega_norm() const { return (d_ * d_ - d_) / 4; }

  // fields with unit group larger than {1, -1}
  bool has_extra_units() const { return d_ == -3 || d_ == -4; }

  bool operator==(const Discriminant& o) const { return d_ == o.d_; }
  bool operator!=(const Discriminant& o) const { return d_ != o.d_; }

 private:
  Int d_;
};

bool is_fundamental_discriminant(const Int& d);

// order Z + f*O_K of discriminant f^2 * d_K
struct QuadOrder {
  Discriminant disc;
  Int conductor;

  QuadOrder(const Discriminant& d, const Int& f) : disc(d), conductor(f) {
    if (f <= 0) throw std::invalid_argument("conductor must be positive");
  }

  Int order_disc() const { return conductor * conductor * disc.value(); }

  bool operator==(const QuadOrder& o) const { return disc == o.disc && conductor == o.conductor; }
  bool operator!=(const QuadOrder& o) const { return !(*this == o); }
  bool operator<(const QuadOrder& o) const {
    if (disc.value() != o.disc.value()) return disc.value() < o.disc.value();
    return conductor < o.conductor;
  }
};

// x + y*omega with omega = (d + sqrt(d))/2, an element of O_K
struct QuadInteger {
  Int x, y;
  Discriminant disc;

  QuadInteger(const Int& xx, const Int& yy, const Discriminant& d) : x(xx), y(yy), disc(d) {}

  static QuadInteger one(const Discriminant& d) { return QuadInteger(1, 0, d); }
  static QuadInteger omega(const Discriminant& d) { return QuadInteger(0, 1, d); }

  QuadInteger operator+(const QuadInteger& o) const;
  QuadInteger operator-(const QuadInteger& o) const;
  QuadInteger operator*(const QuadInteger& o) const;
  QuadInteger operator-() const { return QuadInteger(-x, -y, disc); }
  bool operator==(const QuadInteger& o) const { return disc == o.disc && x == o.x && y == o.y; }
  bool operator!=(const QuadInteger& o) const { return !(*this == o); }

  QuadInteger conj() const { return QuadInteger(x + disc.value() * y, -y, disc); }
  Int norm() const;
  Int trace() const { return 2 * x + disc.value() * y; }
  QuadInteger pow(unsigned long n) const;

  std::string str() const;
};

// prime splitting: +1 split, -1 inert, 0 ramified
int kronecker_symbol(const Int& d, const Int& p);

// smallest-|d| fundamental discriminant with trivial units, p split (if given), ell inert (if given)
Discriminant find_field(const std::optional<Int>& p, const std::optional<Int>& ell, const Int& search_bound);

// smallest split prime ell = N(alpha) realized by an element of O_K, with its witness alpha
std::pair<Int, QuadInteger> find_split_principal(const Discriminant& d, const Int& bound,
                                                 const std::set<Int>& exclude = {});

// all alpha in O_K with N(alpha) = n, sorted by (y, x); empty when n is not represented
std::vector<QuadInteger> elements_of_norm(const Discriminant& d, const Int& n);

}  // namespace weakiso
