#include "weakiso/cm_curves.hpp"

#include <algorithm>
#include <map>

namespace weakiso {

namespace {

QuadInteger lift(const TorsorElement& t, const Discriminant& d) { return QuadInteger(t.x, t.y, d); }

// the q+1 superlattices b with a ⊆ b, [b : a] = q, one per line of a/qa
std::vector<Lattice> index_q_superlattices(const Lattice& a, const Int& q) {
  const auto g1 = a.gen1();
  const auto g2 = a.gen2();
  std::vector<std::pair<Int, Int>> base = {{q * g1.first, q * g1.second}, {q * g2.first, q * g2.second}};
  std::vector<Lattice> out;
  auto add_line = [&](const Int& x, const Int& y) {
    std::vector<std::pair<Int, Int>> rows = base;
    rows.emplace_back(x * g1.first + y * g2.first, x * g1.second + y * g2.second);
    out.emplace_back(a.disc(), a.den() * q, std::move(rows));
  };
  add_line(1, 0);
  for (Int j = 0; j < q; ++j) add_line(j, 1);
  std::sort(out.begin(), out.end());
  for (std::size_t i = 0; i + 1 < out.size(); ++i)
    if (out[i] == out[i + 1]) throw integrity_error("superlattice lines collided");
  return out;
}

MarkedSubgroup make_subgroup(const CMCurve& E, const Int& modulus,
                             std::vector<std::pair<Int, TorsorElement>> coords, const Lattice& witness) {
  if (!witness.contains_lattice(E.lattice) || E.lattice.index_in(witness) != modulus)
    throw integrity_error("subgroup witness does not match the declared modulus");
  return MarkedSubgroup{E, modulus, std::move(coords), witness};
}

}  // namespace

CMCurve CMCurve::principal(const Discriminant& d) { return from_lattice(Lattice::maximal(d)); }

CMCurve CMCurve::from_lattice(const Lattice& L, std::vector<std::pair<Int, TorsorElement>> prov) {
  QuadOrder o = L.multiplier_ring();
  return CMCurve{o, L.ideal_class(), L, std::move(prov)};
}

std::string CMCurve::str() const {
  return "curve[f=" + order.conductor.get_str() + ", " + cls.form.str() + "]";
}

MarkedSubgroup trivial_subgroup(const CMCurve& E) { return MarkedSubgroup{E, 1, {}, E.lattice}; }

std::vector<MarkedSubgroup> subgroups_of_order(const CMCurve& E, const Int& q) {
  const Discriminant& d = E.disc();
  if (!is_prime(q)) throw std::invalid_argument("subgroup order must be prime");
  if (kronecker_symbol(d.value(), q) != -1) throw std::invalid_argument("subgroup order must be inert");
  if (mod_floor(E.order.conductor, q) == 0) throw std::invalid_argument("subgroup order divides the conductor");

  std::vector<Lattice> supers = index_q_superlattices(E.lattice, q);

  std::map<Lattice, TorsorElement> coord_of;
  if (E.order.conductor == 1) {
    // basepoint = smallest witness; acting through lifts assigns each subgroup its coordinate
    // and simultaneously proves the action free (no collision) and transitive (all hit)
    TorsorGroup G(d, q);
    const Lattice& b0 = supers.front();
    for (const auto& t : G.elements()) {
      Lattice w = b0.scale(lift(t, d)).sum(E.lattice);
      if (!coord_of.emplace(w, t).second) throw integrity_error("torsor action is not free");
    }
    for (const auto& b : supers)
      if (coord_of.find(b) == coord_of.end()) throw integrity_error("torsor action is not transitive");
  }

  std::vector<MarkedSubgroup> out;
  for (const auto& b : supers) {
    std::vector<std::pair<Int, TorsorElement>> coords;
    if (!coord_of.empty()) coords.emplace_back(q, coord_of.at(b));
    out.push_back(make_subgroup(E, q, std::move(coords), b));
  }
  return out;
}

MarkedSubgroup apply_endo(const QuadInteger& alpha, const MarkedSubgroup& C) {
  const CMCurve& E = C.parent;
  if (alpha.disc.value() != E.disc().value()) throw std::invalid_argument("element from a different field");
  if (gcd_int(alpha.norm(), C.modulus) != 1) throw std::invalid_argument("element not prime to the modulus");
  if (mod_floor(alpha.y, E.order.conductor) != 0)
    throw std::invalid_argument("element is not an endomorphism of the parent");

  Lattice w = C.witness.scale(alpha).sum(E.lattice);
  std::vector<std::pair<Int, TorsorElement>> coords;
  coords.reserve(C.coords.size());
  for (const auto& [p, t] : C.coords) {
    TorsorGroup G(E.disc(), p);
    coords.emplace_back(p, G.mul(t, G.embed(alpha)));
  }
  return make_subgroup(E, C.modulus, std::move(coords), w);
}

MarkedSubgroup combine(const MarkedSubgroup& C1, const MarkedSubgroup& C2) {
  if (!(C1.parent == C2.parent)) throw std::invalid_argument("subgroups of different curves");
  if (gcd_int(C1.modulus, C2.modulus) != 1) throw std::invalid_argument("moduli must be coprime");
  auto coords = C1.coords;
  coords.insert(coords.end(), C2.coords.begin(), C2.coords.end());
  std::sort(coords.begin(), coords.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return make_subgroup(C1.parent, C1.modulus * C2.modulus, std::move(coords), C1.witness.sum(C2.witness));
}

MarkedSubgroup component(const MarkedSubgroup& C, const Int& p) {
  if (mod_floor(C.modulus, p) != 0 || !is_prime(p)) throw std::invalid_argument("not a prime factor of the modulus");
  Int m = C.modulus / p;
  if (mod_floor(m, p) == 0) throw std::invalid_argument("modulus is not squarefree at this prime");
  Lattice w = C.parent.lattice.sum(C.witness.scale(QuadInteger(m, 0, C.parent.disc())));
  std::vector<std::pair<Int, TorsorElement>> coords;
  for (const auto& [q, t] : C.coords)
    if (q == p) coords.emplace_back(q, t);
  return make_subgroup(C.parent, p, std::move(coords), w);
}

MarkedSubgroup scale_subgroup(const MarkedSubgroup& C, const Int& m) {
  if (m < 1) throw std::invalid_argument("scale factor must be positive");
  Lattice w = C.parent.lattice.sum(C.witness.scale(QuadInteger(m, 0, C.parent.disc())));
  Int mod = C.parent.lattice.index_in(w);
  std::vector<std::pair<Int, TorsorElement>> coords;
  for (const auto& [q, t] : C.coords)
    if (mod_floor(mod, q) == 0) coords.emplace_back(q, t);
  return make_subgroup(C.parent, mod, std::move(coords), w);
}

CMCurve quotient(const CMCurve& E, const MarkedSubgroup& C) {
  if (!(C.parent == E)) throw std::invalid_argument("subgroup of a different curve");
  if (!C.witness.contains_lattice(E.lattice) || E.lattice.index_in(C.witness) != C.modulus)
    throw integrity_error("subgroup witness does not match the declared modulus");
  auto prov = E.provenance;
  prov.insert(prov.end(), C.coords.begin(), C.coords.end());
  return CMCurve::from_lattice(C.witness, std::move(prov));
}

bool weak_iso_curves(const CMCurve& E1, const CMCurve& E2) {
  return E1.order == E2.order && E1.cls == E2.cls;
}

std::vector<CMCurve> descending_chain(const CMCurve& E0, const Int& ell, long n) {
  if (n < 0) throw std::invalid_argument("chain length must be nonnegative");
  if (kronecker_symbol(E0.disc().value(), ell) != -1) throw std::invalid_argument("chain prime must be inert");
  if (E0.order.conductor != 1) throw std::invalid_argument("chain must start at a maximal-order curve");

  std::vector<CMCurve> out = {E0};
  Int target = 1;
  for (long i = 0; i < n; ++i) {
    target *= ell;
    // of the ell+1 lines exactly one ascends (the kernel of the dual isogeny); take the
    // smallest witness among those descending to conductor ell^(i+1)
    bool advanced = false;
    for (const auto& b : index_q_superlattices(out.back().lattice, ell)) {
      if (b.multiplier_ring() == QuadOrder(E0.disc(), target)) {
        out.push_back(CMCurve::from_lattice(b));
        advanced = true;
        break;
      }
    }
    if (!advanced) throw integrity_error("no descending subgroup found");
  }
  return out;
}

std::pair<CMCurve, MarkedSubgroup> alpha_chain(const CMCurve& E, const MarkedSubgroup& C,
                                               const QuadInteger& alpha, long n) {
  if (n < 0) throw std::invalid_argument("chain length must be nonnegative");
  const Discriminant& d = E.disc();
  Int ell = alpha.norm();
  if (!is_prime(ell) || kronecker_symbol(d.value(), ell) != 1)
    throw std::invalid_argument("norm of the chain generator must be a split prime");
  if (gcd_int(C.modulus, ell) != 1) throw std::invalid_argument("subgroup order must be prime to the chain prime");

  CMCurve Eq = quotient(E, C);
  if (n == 0) return {Eq, trivial_subgroup(Eq)};

  // kernel of the composed map E/C -> E/alpha^n(C): the image of alpha^{-n}·a in C/b
  Int ln = int_pow(ell, static_cast<unsigned long>(n));
  Lattice c = Eq.lattice.sum(E.lattice.scale(alpha.conj().pow(static_cast<unsigned long>(n))).scale_rat(Rat(1) / Rat(ln)));
  if (Eq.lattice.index_in(c) != ln) throw integrity_error("chain kernel has the wrong order");
  if (c.contains_lattice(Eq.lattice.scale_rat(Rat(1) / Rat(ell)))) throw integrity_error("chain kernel is not cyclic");
  return {Eq, make_subgroup(Eq, ln, {}, c)};
}

}  // namespace weakiso
