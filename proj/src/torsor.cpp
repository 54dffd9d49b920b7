#include "weakiso/torsor.hpp"

#include <algorithm>

namespace weakiso {

std::string TorsorElement::str() const {
  return "(" + x.get_str() + ":" + y.get_str() + ") mod " + q.get_str();
}

TorsorGroup::TorsorGroup(const Discriminant& d, const Int& q) : d_(d), q_(q) {
  if (!is_prime(q)) throw std::invalid_argument("torsor modulus must be prime");
  if (kronecker_symbol(d.value(), q) != -1) throw std::invalid_argument("torsor modulus must be inert");
}

TorsorElement TorsorGroup::normalize(const Int& x, const Int& y) const {
  Int xr = mod_floor(x, q_), yr = mod_floor(y, q_);
  if (xr == 0 && yr == 0) throw integrity_error("zero residue has no class in the torsor group");
  if (yr != 0) return TorsorElement{mod_floor(xr * invmod(yr, q_), q_), 1, q_, d_.value()};
  return TorsorElement{1, 0, q_, d_.value()};
}

void TorsorGroup::check_member(const TorsorElement& a) const {
  if (a.q != q_ || a.d != d_.value()) throw std::invalid_argument("torsor element from a different group");
}

TorsorElement TorsorGroup::identity() const { return TorsorElement{1, 0, q_, d_.value()}; }

TorsorElement TorsorGroup::embed(const QuadInteger& alpha) const {
  if (alpha.disc.value() != d_.value()) throw std::invalid_argument("element from a different field");
  if (mod_floor(alpha.norm(), q_) == 0) throw std::invalid_argument("element not prime to the modulus");
  return normalize(alpha.x, alpha.y);
}

TorsorElement TorsorGroup::mul(const TorsorElement& a, const TorsorElement& b) const {
  check_member(a);
  check_member(b);
  // multiply as x + y*omega with omega^2 = d*omega - N(omega)
  const Int d = d_.value(), n0 = d_.omega_norm();
  Int yy = a.y * b.y;
  return normalize(a.x * b.x - n0 * yy, a.x * b.y + a.y * b.x + d * yy);
}

TorsorElement TorsorGroup::inv(const TorsorElement& a) const {
  check_member(a);
  // a * conj(a) = N(a) is a rational scalar, trivial in the quotient
  return normalize(a.x + d_.value() * a.y, -a.y);
}

TorsorElement TorsorGroup::pow(const TorsorElement& a, const Int& e) const {
  check_member(a);
  if (e < 0) return pow(inv(a), -e);
  TorsorElement r = identity(), b = a;
  Int k = e;
  while (k > 0) {
    if (mod_floor(k, 2) == 1) r = mul(r, b);
    b = mul(b, b);
    k /= 2;
  }
  return r;
}

std::vector<TorsorElement> TorsorGroup::elements() const {
  std::vector<TorsorElement> out;
  out.push_back(identity());
  for (Int x = 0; x < q_; ++x) out.push_back(TorsorElement{x, 1, q_, d_.value()});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TorsorElement> TorsorGroup::gth_roots(const TorsorElement& t, const Int& g) const {
  check_member(t);
  if (g < 1) throw std::invalid_argument("root degree must be positive");
  std::vector<TorsorElement> out;
  for (const auto& e : elements())
    if (pow(e, g) == t) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Int> find_q(const Discriminant& d, const Int& g, const QuadInteger& alpha, const Int& count,
                        const Int& bound) {
  if (g < 1) throw std::invalid_argument("degree must be positive");
  if (alpha.disc.value() != d.value()) throw std::invalid_argument("element from a different field");
  Int ell = alpha.norm();
  if (!is_prime(ell) || kronecker_symbol(d.value(), ell) != 1)
    throw std::invalid_argument("norm of the generator must be a split prime");

  std::vector<Int> out;
  for (Int q = 2; q <= bound && Int(out.size()) < count; q = next_prime(q)) {
    if (kronecker_symbol(d.value(), q) != -1) continue;
    if (mod_floor(q + 1, g) != 0) continue;
    TorsorGroup G(d, q);
    // the class of alpha is a g-th power iff it dies under the (q+1)/g power map
    if (G.pow(G.embed(alpha), (q + 1) / g) == G.identity()) out.push_back(q);
  }
  if (Int(out.size()) < count)
    throw search_error("found " + std::to_string(out.size()) + " of " + count.get_str() +
                       " admissible primes up to " + bound.get_str());
  return out;
}

}  // namespace weakiso
