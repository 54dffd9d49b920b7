#include "weakiso/lattice.hpp"

namespace weakiso {

Lattice::Lattice(const Discriminant& d, const Int& den, std::vector<std::pair<Int, Int>> rows) : d_(d), den_(den) {
  if (den_ == 0) throw std::invalid_argument("zero denominator");
  if (den_ < 0) {
    den_ = -den_;
    for (auto& r : rows) {
      r.first = -r.first;
      r.second = -r.second;
    }
  }
  // row HNF: combine rows until the omega-part lives in a single row (b, c)
  Int wx = 0, wy = 0;
  for (auto& r : rows) {
    if (r.second == 0) continue;
    if (wy == 0) {
      wx = r.first;
      wy = r.second;
      r.first = 0;
      r.second = 0;
      continue;
    }
    Xgcd e = xgcd(wy, r.second);
    Int nwx = e.u * wx + e.v * r.first;
    // replace the pair by (combination, remainder); the remainder row has omega-part 0
    Int k1 = wy / e.g, k2 = r.second / e.g;
    Int rem = k2 * wx - k1 * r.first;
    wx = nwx;
    wy = e.g;
    r.first = rem;
    r.second = 0;
  }
  if (wy < 0) {
    wx = -wx;
    wy = -wy;
  }
  Int a = 0;
  for (const auto& r : rows) a = gcd_int(a, r.first);
  if (a == 0 || wy == 0) throw std::invalid_argument("lattice generators do not have rank 2");
  a_ = a;
  c_ = wy;
  b_ = mod_floor(wx, a_);
  Int g = gcd_int(gcd_int(den_, a_), gcd_int(b_, c_));
  den_ /= g;
  a_ /= g;
  b_ /= g;
  c_ /= g;
}

Lattice Lattice::order_lattice(const Discriminant& d, const Int& conductor) {
  if (conductor <= 0) throw std::invalid_argument("conductor must be positive");
  return Lattice(d, 1, {{1, 0}, {0, conductor}});
}

Lattice Lattice::scale(const QuadInteger& alpha) const {
  if (alpha.disc != d_) throw std::invalid_argument("mixed fields");
  QuadInteger g1(a_, 0, d_), g2(b_, c_, d_);
  QuadInteger p1 = g1 * alpha, p2 = g2 * alpha;
  return Lattice(d_, den_, {{p1.x, p1.y}, {p2.x, p2.y}});
}

Lattice Lattice::scale_rat(const Rat& s) const {
  if (s == 0) throw std::invalid_argument("scaling by zero");
  Int num = s.get_num(), den = s.get_den();
  return Lattice(d_, den_ * den, {{a_ * num, 0}, {b_ * num, c_ * num}});
}

Lattice Lattice::sum(const Lattice& o) const {
  if (d_ != o.d_) throw std::invalid_argument("mixed fields");
  Int l = lcm_int(den_, o.den_);
  Int s1 = l / den_, s2 = l / o.den_;
  return Lattice(d_, l,
                 {{a_ * s1, 0}, {b_ * s1, c_ * s1}, {o.a_ * s2, 0}, {o.b_ * s2, o.c_ * s2}});
}

Lattice Lattice::mul(const Lattice& o) const {
  if (d_ != o.d_) throw std::invalid_argument("mixed fields");
  QuadInteger g1(a_, 0, d_), g2(b_, c_, d_), h1(o.a_, 0, d_), h2(o.b_, o.c_, d_);
  std::vector<std::pair<Int, Int>> rows;
  for (const auto& p : {g1 * h1, g1 * h2, g2 * h1, g2 * h2}) rows.push_back({p.x, p.y});
  return Lattice(d_, den_ * o.den_, rows);
}

bool Lattice::contains(const Rat& x, const Rat& y) const {
  // x + y*omega = (u*a + v*(b + c*omega)) / den
  Rat v = y * den_ / c_;
  if (v.get_den() != 1) return false;
  Rat u = (x * den_ - v * b_) / a_;
  return u.get_den() == 1;
}

bool Lattice::contains_lattice(const Lattice& o) const {
  return contains(Rat(o.a_) / o.den_, Rat(0)) && contains(Rat(o.b_) / o.den_, Rat(o.c_) / o.den_);
}

Int Lattice::index_in(const Lattice& super) const {
  if (!super.contains_lattice(*this)) throw std::invalid_argument("not a sublattice");
  Rat ratio = (Rat(a_ * c_) / (den_ * den_)) / (Rat(super.a_ * super.c_) / (super.den_ * super.den_));
  if (ratio.get_den() != 1) throw integrity_error("index is not an integer");
  return ratio.get_num();
}

QuadOrder Lattice::multiplier_ring() const {
  // conductor f = least f with f*omega stabilizing the lattice; read off the
  // denominators of H * R_omega * H^{-1} for the basis matrix H (den cancels)
  const Int d = d_.value(), n0 = d_.omega_norm();
  // basis rows (a, 0), (b, c); (x, y) * R_omega = (-n0*y, x + d*y)
  // P = H R H^{-1}, H = [[a, 0], [b, c]], H^{-1} = [[c, 0], [-b, a]] / (a*c)
  Int det = a_ * c_;
  // row1 of H*R: (0, a); row2: (-n0*c, b + d*c)
  // multiply by adj(H) = [[c, 0], [-b, a]]
  Rat p11 = Rat(-a_ * b_) / det;
  Rat p12 = Rat(a_ * a_) / det;
  Rat p21 = Rat(-n0 * c_ * c_ - b_ * (b_ + d * c_)) / det;
  Rat p22 = Rat(a_ * (b_ + d * c_)) / det;
  Int f = 1;
  for (const Rat& p : {p11, p12, p21, p22}) {
    Rat q = p;
    q.canonicalize();
    f = lcm_int(f, q.get_den());
  }
  return QuadOrder(d_, f);
}

IdealClass Lattice::ideal_class() const {
  // ratio of generators tau = (b + c*omega) / a has positive imaginary part;
  // its minimal polynomial over Q gives the form of the homothety class
  const Int d = d_.value(), n0 = d_.omega_norm();
  Int A = a_ * a_;
  Int B = -a_ * (2 * b_ + c_ * d);
  Int C = b_ * b_ + d * b_ * c_ + n0 * c_ * c_;
  Int g = gcd_int(gcd_int(A, B), C);
  QuadraticForm form(A / g, B / g, C / g);
  QuadOrder order = multiplier_ring();
  if (form.disc() != order.order_disc())
    throw integrity_error("form discriminant disagrees with multiplier ring");
  return IdealClass(form, order);
}

std::string Lattice::str() const {
  return "[" + a_.get_str() + ", " + b_.get_str() + "+" + c_.get_str() + "w]/" + den_.get_str();
}

Lattice ideal_of_form(const QuadraticForm& f, const QuadOrder& order) {
  if (f.disc() != order.order_disc()) throw std::invalid_argument("form does not belong to the order");
  const Int d = order.disc.value(), cf = order.conductor;
  // ideal a*Z + ((-b + sqrt(D))/2)*Z rewritten over the basis (1, omega)
  Int x = (-f.b - cf * d) / 2;
  return Lattice(order.disc, 1, {{f.a, 0}, {x, cf}});
}

}  // namespace weakiso
