#include "weakiso/quad.hpp"

#include <algorithm>

namespace weakiso {

namespace {

bool is_squarefree(Int n) {
  if (n < 0) n = -n;
  if (n == 0) return false;
  for (Int p = 2; p * p <= n; p = (p == 2 ? Int(3) : p + 2)) {
    if (n % (p * p) == 0) return false;
    while (n % p == 0) n /= p;
  }
  return true;
}

}  // namespace

bool is_fundamental_discriminant(const Int& d) {
  if (d >= 0) return false;
  Int m = mod_floor(d, 4);
  if (m == 1) return is_squarefree(d);
  if (m == 0) {
    Int q = d / 4;
    Int qm = mod_floor(q, 4);
    return (qm == 2 || qm == 3) && is_squarefree(q);
  }
  return false;
}

Discriminant::Discriminant(const Int& d) : d_(d) {
  if (!is_fundamental_discriminant(d))
    throw std::invalid_argument("not a negative fundamental discriminant: " + d.get_str());
}

QuadInteger QuadInteger::operator+(const QuadInteger& o) const {
  if (disc != o.disc) throw std::invalid_argument("mixed fields");
  return QuadInteger(x + o.x, y + o.y, disc);
}

QuadInteger QuadInteger::operator-(const QuadInteger& o) const {
  if (disc != o.disc) throw std::invalid_argument("mixed fields");
  return QuadInteger(x - o.x, y - o.y, disc);
}

QuadInteger QuadInteger::operator*(const QuadInteger& o) const {
  if (disc != o.disc) throw std::invalid_argument("mixed fields");
  // omega^2 = d*omega - N(omega)
  const Int& d = disc.value();
  Int n0 = disc.omega_norm();
  Int yy = y * o.y;
  return QuadInteger(x * o.x - n0 * yy, x * o.y + y * o.x + d * yy, disc);
}

Int QuadInteger::norm() const {
  Int n = x * x + disc.value() * x * y + disc.omega_norm() * y * y;
  if (n < 0) throw integrity_error("negative norm in imaginary quadratic field");
  return n;
}

QuadInteger QuadInteger::pow(unsigned long n) const {
  QuadInteger r = one(disc), b = *this;
  while (n > 0) {
    if (n & 1) r = r * b;
    b = b * b;
    n >>= 1;
  }
  return r;
}

std::string QuadInteger::str() const { return x.get_str() + (y >= 0 ? "+" : "") + y.get_str() + "w"; }

int kronecker_symbol(const Int& d, const Int& p) {
  if (!is_prime(p)) throw std::invalid_argument("kronecker_symbol expects a prime");
  return mpz_kronecker(d.get_mpz_t(), p.get_mpz_t());
}

Discriminant find_field(const std::optional<Int>& p, const std::optional<Int>& ell, const Int& search_bound) {
  if (p && ell && *p == *ell) throw std::invalid_argument("split and inert prime constraints coincide");
  if (p && !is_prime(*p)) throw std::invalid_argument("split constraint must be prime");
  if (ell && !is_prime(*ell)) throw std::invalid_argument("inert constraint must be prime");
  for (Int a = 3; a <= search_bound; ++a) {
    Int d = -a;
    if (!is_fundamental_discriminant(d)) continue;
    if (d == -3 || d == -4) continue;  // extra units
    if (p && kronecker_symbol(d, *p) != 1) continue;
    if (ell && kronecker_symbol(d, *ell) != -1) continue;
    return Discriminant(d);
  }
  throw search_error("no admissible field with |d| <= " + search_bound.get_str());
}

std::vector<QuadInteger> elements_of_norm(const Discriminant& d, const Int& n) {
  // N(x + y*omega) = (2x + dy)^2/4 + |d| y^2 / 4, so |y| <= sqrt(4n/|d|)
  std::vector<QuadInteger> out;
  if (n < 0) return out;
  Int dd = d.value();
  Int ymax = isqrt(4 * n / (-dd));
  for (Int y = -ymax; y <= ymax; ++y) {
    // x^2 + d*x*y + (n0*y^2 - n) = 0 with discriminant d*y^2 + 4n
    Int inner = dd * y * y + 4 * n;
    if (inner < 0 || !is_square(inner)) continue;
    Int r = isqrt(inner);
    for (int sign : {-1, 1}) {
      Int num = -dd * y + sign * r;
      if (mod_floor(num, 2) != 0) continue;
      QuadInteger v(num / 2, y, d);
      if (v.norm() != n) throw integrity_error("norm equation solver produced a wrong witness");
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end(), [](const QuadInteger& a, const QuadInteger& b) {
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  return out;
}

std::pair<Int, QuadInteger> find_split_principal(const Discriminant& d, const Int& bound,
                                                 const std::set<Int>& exclude) {
  if (d.has_extra_units()) throw units_error("field has extra units");
  for (Int n = 2; n <= bound; ++n) {
    if (!is_prime(n) || exclude.count(n)) continue;
    if (kronecker_symbol(d.value(), n) != 1) continue;
    // the canonical witness is the norm solution with smallest (y, x), y > 0
    for (const auto& v : elements_of_norm(d, n)) {
      if (v.y > 0) return {n, v};
    }
  }
  throw search_error("no principal split prime up to " + bound.get_str());
}

}  // namespace weakiso
