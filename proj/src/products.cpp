#include "weakiso/products.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace weakiso {

ProductVariety::ProductVariety(std::vector<CMCurve> f) : factors(std::move(f)) {
  if (factors.empty()) throw std::invalid_argument("a product needs at least one factor");
}

std::string ProductVariety::str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) s += ", ";
    s += factors[i].lattice.str();
    s += " prov{";
    for (std::size_t k = 0; k < factors[i].provenance.size(); ++k) {
      if (k) s += ", ";
      s += factors[i].provenance[k].first.get_str() + ":" + factors[i].provenance[k].second.str();
    }
    s += "}";
  }
  return s + "]";
}

std::string canonical_dump(const ProductVariety& P1, const ProductVariety& P2) {
  return "v1|" + P1.str() + "|" + P2.str();
}

bool criterion_fast(const std::vector<QuadInteger>& alphas, const std::vector<QuadInteger>& betas,
                    const TorsorGroup& G) {
  if (G.disc().has_extra_units()) throw units_error("criterion requires trivial units (d not in {-3, -4})");
  if (alphas.size() != betas.size()) throw std::invalid_argument("sides must have the same length");
  if (alphas.empty()) throw std::invalid_argument("sides must be nonempty");
  TorsorElement pa = G.identity(), pb = G.identity();
  for (const auto& a : alphas) pa = G.mul(pa, G.embed(a));
  for (const auto& b : betas) pb = G.mul(pb, G.embed(b));
  return pa == pb;
}

IdealClass product_steinitz(const std::vector<IdealClass>& classes) {
  if (classes.empty()) throw std::invalid_argument("empty class list");
  QuadraticForm acc = principal_form(classes.front().order.order_disc());
  for (const auto& c : classes) {
    if (!(c.order == classes.front().order)) throw std::invalid_argument("classes from different orders");
    acc = compose(acc, c.form);
  }
  return IdealClass(acc, classes.front().order);
}

bool oracle_slow(const ProductVariety& P1, const ProductVariety& P2) {
  std::map<QuadOrder, std::vector<IdealClass>> g1, g2;
  for (const auto& E : P1.factors) g1[E.order].push_back(E.cls);
  for (const auto& E : P2.factors) g2[E.order].push_back(E.cls);

  if (g1.size() != g2.size()) return false;
  for (const auto& [o, cs] : g1) {
    auto it = g2.find(o);
    if (it == g2.end() || it->second.size() != cs.size()) return false;
  }

  bool all_equal = true;
  for (const auto& [o, cs] : g1)
    if (!(product_steinitz(cs) == product_steinitz(g2.at(o)))) all_equal = false;

  if (all_equal) return true;
  if (g1.size() == 1) return false;  // single common ring: Steinitz class decides
  throw unsupported_case("per-ring classes differ across several rings; module classification not established");
}

namespace {

// Decide whether every factor is rebuildable over the principal curve from its recorded
// coordinates; if so the torsor congruence per prime decides weak isomorphism.
struct FastPlan {
  bool ok = false;
  std::string note;
  std::vector<Int> primes;
};

FastPlan plan_fast_path(const ProductVariety& P1, const ProductVariety& P2) {
  FastPlan plan;
  if (P1.g() != P2.g()) {
    plan.note = "sides have different lengths";
    return plan;
  }
  std::vector<const CMCurve*> all;
  for (const auto& E : P1.factors) all.push_back(&E);
  for (const auto& E : P2.factors) all.push_back(&E);

  const Discriminant& d = all.front()->disc();
  if (d.has_extra_units()) {
    plan.note = "fast path requires trivial units";
    return plan;
  }
  std::set<Int> prime_set;
  for (const auto& [p, t] : all.front()->provenance) prime_set.insert(p);
  if (prime_set.empty()) {
    plan.note = "factor without recorded quotient coordinates";
    return plan;
  }

  for (const CMCurve* E : all) {
    if (E->disc().value() != d.value()) {
      plan.note = "factors from different fields";
      return plan;
    }
    std::set<Int> ps;
    for (const auto& [p, t] : E->provenance) ps.insert(p);
    if (ps.size() != E->provenance.size() || ps != prime_set) {
      plan.note = "factors quotiented at different prime sets";
      return plan;
    }
  }

  // rebuild each factor over the principal curve; a mismatch means the coordinates do
  // not describe the factor relative to the canonical basepoints, so the congruence
  // criterion cannot be trusted for it
  CMCurve E0 = CMCurve::principal(d);
  std::map<Int, MarkedSubgroup> basepoint;
  for (const Int& p : prime_set) basepoint.emplace(p, subgroups_of_order(E0, p).front());
  for (const CMCurve* E : all) {
    bool first = true;
    MarkedSubgroup C = trivial_subgroup(E0);
    for (const auto& [p, t] : E->provenance) {
      MarkedSubgroup Cp = apply_endo(QuadInteger(t.x, t.y, d), basepoint.at(p));
      C = first ? Cp : combine(C, Cp);
      first = false;
    }
    if (!weak_iso_curves(quotient(E0, C), *E)) {
      plan.note = "factor is not the quotient its coordinates describe";
      return plan;
    }
  }

  plan.ok = true;
  plan.note = "ok";
  plan.primes.assign(prime_set.begin(), prime_set.end());
  return plan;
}

}  // namespace

WeakIsoCertificate weak_iso_products(const ProductVariety& P1, const ProductVariety& P2) {
  WeakIsoCertificate cert;
  cert.oracle_path.verdict = oracle_slow(P1, P2);

  FastPlan plan = plan_fast_path(P1, P2);
  cert.fast_path.applicable = plan.ok;
  cert.fast_path.note = plan.note;
  cert.fast_path.primes = plan.primes;
  if (plan.ok) {
    const Discriminant& d = P1.factors.front().disc();
    bool agree = true;
    for (const Int& p : plan.primes) {
      TorsorGroup G(d, p);
      TorsorElement t1 = G.identity(), t2 = G.identity();
      for (const auto& E : P1.factors)
        for (const auto& [q, t] : E.provenance)
          if (q == p) t1 = G.mul(t1, t);
      for (const auto& E : P2.factors)
        for (const auto& [q, t] : E.provenance)
          if (q == p) t2 = G.mul(t2, t);
      if (!(t1 == t2)) agree = false;
    }
    cert.fast_path.verdict = agree;
    if (cert.fast_path.verdict != cert.oracle_path.verdict)
      throw integrity_error("decision routes disagree on " + canonical_dump(P1, P2));
  }

  cert.verdict = cert.oracle_path.verdict;
  cert.inputs_digest = sha256_hex(canonical_dump(P1, P2));
  return cert;
}

}  // namespace weakiso
