#include "weakiso/forms.hpp"

#include <algorithm>

namespace weakiso {

bool QuadraticForm::is_reduced() const {
  Int ab = abs(b);
  if (!(ab <= a && a <= c)) return false;
  if (b < 0 && (ab == a || a == c)) return false;
  return true;
}

QuadraticForm reduce(QuadraticForm f) {
  const Int D = f.disc();
  for (int guard = 0; guard < 100000; ++guard) {
    // normalize b into (-a, a]
    Int b = f.a - mod_floor(f.a - f.b, 2 * f.a);
    Int c = (b * b - D) / (4 * f.a);
    f = QuadraticForm(f.a, b, c);
    if (f.a > f.c) {
      f = QuadraticForm(f.c, -f.b, f.a);
      continue;
    }
    if (f.a == f.c && f.b < 0) f = QuadraticForm(f.a, -f.b, f.c);
    if (!f.is_reduced()) throw integrity_error("reduction loop produced a non-reduced form");
    return f;
  }
  throw integrity_error("form reduction did not terminate");
}

QuadraticForm principal_form(const Int& order_disc) {
  if (order_disc >= 0) throw std::invalid_argument("discriminant must be negative");
  Int b0 = mod_floor(order_disc, 2);
  return QuadraticForm(1, b0, (b0 * b0 - order_disc) / 4);
}

QuadraticForm inverse(const QuadraticForm& f) { return reduce(QuadraticForm(f.a, -f.b, f.c)); }

QuadraticForm compose(const QuadraticForm& f1, const QuadraticForm& f2) {
  const Int D = f1.disc();
  if (D != f2.disc()) throw std::invalid_argument("composition needs equal discriminants");
  if (!f1.is_primitive() || !f2.is_primitive()) throw std::invalid_argument("composition needs primitive forms");

  // move f2 to an equivalent form whose leading coefficient is prime to a1:
  // search a primitively represented value f2(u, v) with gcd(f2(u,v), a1) = 1
  Int u = 0, v = 0;
  bool found = false;
  auto try_point = [&](const Int& uu, const Int& vv) {
    if (uu == 0 && vv == 0) return;
    if (gcd_int(uu, vv) != 1) return;
    if (gcd_int(f2.eval(uu, vv), f1.a) == 1) {
      u = uu;
      v = vv;
      found = true;
    }
  };
  for (Int s = 0; s <= 10000 && !found; ++s) {
    // walk the boundary of the square [-s, s]^2
    for (Int uu = -s; uu <= s && !found; ++uu) {
      if (abs(uu) == s) {
        for (Int vv = -s; vv <= s && !found; ++vv) try_point(uu, vv);
      } else {
        try_point(uu, s);
        if (!found) try_point(uu, -s);
      }
    }
  }
  if (!found) throw integrity_error("no coprime represented value found; form not primitive?");

  // complete (u, v) to an SL2 matrix [[u, r],[v, t]] and transform f2 by it
  Xgcd e = xgcd(u, v);
  Int t = e.u, r = -e.v;  // u*t - r*v = 1
  Int a2 = f2.eval(u, v);
  Int b2 = 2 * (f2.a * u * r + f2.c * v * t) + f2.b * (u * t + v * r);
  // united forms: B = b1 mod 2a1, B = b2 mod 2a2, gcd(a1, a2) = 1
  Int B = crt(f1.b, 2 * f1.a, b2, 2 * a2);
  Int A = f1.a * a2;
  Int C = (B * B - D) / (4 * A);
  return reduce(QuadraticForm(A, B, C));
}

QuadraticForm compose_pow(const QuadraticForm& f, const Int& n) {
  if (n < 0) throw std::invalid_argument("negative power; compose with inverse instead");
  QuadraticForm r = principal_form(f.disc()), b = reduce(f);
  Int e = n;
  while (e > 0) {
    if (mod_floor(e, 2) == 1) r = compose(r, b);
    b = compose(b, b);
    e /= 2;
  }
  return r;
}

std::vector<IdealClass> class_group(const QuadOrder& order) {
  const Int D = order.order_disc();
  std::vector<QuadraticForm> forms;
  Int amax = isqrt(-D / 3);
  for (Int a = 1; a <= amax; ++a) {
    for (Int b = -a + 1; b <= a; ++b) {
      if (mod_floor(b - D, 2) != 0) continue;
      Int num = b * b - D;
      if (mod_floor(num, 4 * a) != 0) continue;
      Int c = num / (4 * a);
      if (c < a) continue;
      QuadraticForm f(a, b, c);
      if (!f.is_reduced() || !f.is_primitive()) continue;
      forms.push_back(f);
    }
  }
  std::sort(forms.begin(), forms.end());
  QuadraticForm id = principal_form(D);
  std::vector<IdealClass> out;
  out.emplace_back(id, order);
  for (const auto& f : forms)
    if (f != id) out.emplace_back(f, order);
  return out;
}

Int class_number_by_formula(const QuadOrder& order) {
  if (order.disc.has_extra_units()) throw units_error("conductor formula assumes trivial units");
  Int hk(class_group(QuadOrder(order.disc, 1)).size());
  Int f = order.conductor;
  if (f == 1) return hk;
  // h(O) = f * h_K * prod over p | f of (1 - (d|p)/p)
  Int num = hk * f, den = 1;
  Int m = f;
  for (Int p = 2; p * p <= m; p = (p == 2 ? Int(3) : p + 2)) {
    if (m % p != 0) continue;
    num *= p - kronecker_symbol(order.disc.value(), p);
    den *= p;
    while (m % p == 0) m /= p;
  }
  if (m > 1) {
    num *= m - kronecker_symbol(order.disc.value(), m);
    den *= m;
  }
  if (num % den != 0) throw integrity_error("conductor formula gave a non-integer");
  return num / den;
}

}  // namespace weakiso
