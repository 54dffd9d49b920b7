#include "weakiso/pair_generator.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "weakiso/util.hpp"

namespace weakiso {

namespace {

// exact valuation: det must be a pure power of ell
long ell_valuation(const Int& det, const Int& ell) {
  Int d = det;
  long v = 0;
  while (mod_floor(d, ell) == 0) {
    d /= ell;
    ++v;
  }
  if (d != 1) throw std::invalid_argument("determinant is not a power of the chain prime");
  return v;
}

void validate_cfg(const GenConfig& cfg) {
  if (cfg.g < 2) throw std::invalid_argument("factor count must be at least 2");
  if (cfg.depth < 0) throw std::invalid_argument("depth must be nonnegative");
  if (cfg.p && !is_prime(*cfg.p)) throw std::invalid_argument("characteristic must be prime");
  if (cfg.ell && !is_prime(*cfg.ell)) throw std::invalid_argument("chain prime must be prime");
  if (cfg.ell && cfg.p && *cfg.ell == *cfg.p)
    throw std::invalid_argument("chain prime must differ from the characteristic");
}

// a pinned chain prime still needs a principal witness; its absence is a search failure
std::pair<Int, QuadInteger> pinned_split(const Discriminant& field, const Int& ell) {
  if (kronecker_symbol(field.value(), ell) != 1)
    throw search_error("split prime stage: requested prime does not split in " +
                       field.value().get_str());
  for (const auto& v : elements_of_norm(field, ell))
    if (v.y > 0) return {ell, v};
  throw search_error("split prime stage: requested prime is not a principal norm in " +
                     field.value().get_str());
}

void require_rank(const PairFamily& fam, const SymPosDefIntMatrix& A) {
  if (static_cast<long>(A.g()) != fam.cfg.g)
    throw std::invalid_argument("matrix rank must match the configured factor count");
}

// one algebraic integer congruent to each chosen class representative mod its prime;
// scalar factors do not move subgroups, so any lift of the classes serves
QuadInteger crt_representative(const std::vector<TorsorElement>& parts, const Discriminant& d) {
  Int mod = 1;
  for (const auto& t : parts) mod *= t.q;
  Int x = 0, y = 0;
  for (const auto& t : parts) {
    Int rest = mod / t.q;
    Int w = rest * invmod(mod_floor(rest, t.q), t.q);
    x += t.x * w;
    y += t.y * w;
  }
  return QuadInteger(mod_floor(x, mod), mod_floor(y, mod), d);
}

}  // namespace

PairFamily setup(const GenConfig& cfg) {
  validate_cfg(cfg);

  Discriminant field = [&] {
    try {
      return find_field(cfg.p, std::nullopt, cfg.field_bound);
    } catch (const search_error& e) {
      throw search_error(std::string("field stage: ") + e.what());
    }
  }();

  std::set<Int> exclude;
  if (cfg.p) exclude.insert(*cfg.p);
  auto [ell, alpha] = [&] {
    if (cfg.ell) return pinned_split(field, *cfg.ell);
    try {
      return find_split_principal(field, cfg.prime_bound, exclude);
    } catch (const search_error& e) {
      throw search_error(std::string("split prime stage: ") + e.what());
    }
  }();

  std::vector<Int> qs = [&] {
    try {
      return find_q(field, Int(cfg.g), alpha, Int(cfg.depth), cfg.prime_bound);
    } catch (const search_error& e) {
      throw search_error(std::string("inert prime stage: ") + e.what());
    }
  }();
  for (const Int& q : qs)
    if (q == ell || (cfg.p && q == *cfg.p))
      throw integrity_error("inert prime collided with a split one");

  return PairFamily{cfg,   field, ell, alpha, std::move(qs), CMCurve::principal(field),
                    {},    {}};
}

MarkedSubgroup canonical_kernel(const PairFamily& fam, long i) {
  if (i < 0 || i > static_cast<long>(fam.qs.size()))
    throw std::invalid_argument("index exceeds the configured depth");
  MarkedSubgroup C = trivial_subgroup(fam.base);
  for (long j = 0; j < i; ++j)
    C = combine(C, subgroups_of_order(fam.base, fam.qs[static_cast<std::size_t>(j)]).front());
  return C;
}

MarkedSubgroup build_x(const PairFamily& fam, long i, const SymPosDefIntMatrix& A) {
  require_rank(fam, A);
  long n = ell_valuation(A.det(), fam.ell);
  return alpha_chain(fam.base, canonical_kernel(fam, i), fam.alpha, n).second;
}

std::vector<PartnerPoint> partners(const PairFamily& fam, const MarkedSubgroup& kernel,
                                   const SymPosDefIntMatrix& A,
                                   const SymPosDefIntMatrix& Aprime) {
  require_rank(fam, A);
  require_rank(fam, Aprime);
  long n = ell_valuation(A.det(), fam.ell);
  long m = ell_valuation(Aprime.det(), fam.ell);

  auto [Ex, Dx] = alpha_chain(fam.base, kernel, fam.alpha, n);
  (void)Ex;
  ProductVariety image = psi_general(Dx.parent, Dx, A);

  // the kernel order must factor over the family primes
  std::vector<Int> primes;
  Int rest = kernel.modulus;
  for (const Int& q : fam.qs)
    if (mod_floor(rest, q) == 0) {
      primes.push_back(q);
      rest /= q;
    }
  if (rest != 1) throw std::invalid_argument("kernel order is not built from the family primes");

  // per prime, the g solutions of beta^g = alpha^(n - m); the search stage guaranteed
  // both that g divides the group order and that alpha is a g-th power
  std::vector<std::vector<TorsorElement>> roots;
  for (const Int& q : primes) {
    TorsorGroup G(fam.field, q);
    auto r = G.gth_roots(G.pow(G.embed(fam.alpha), Int(n - m)), Int(fam.cfg.g));
    if (static_cast<long>(r.size()) != fam.cfg.g)
      throw integrity_error("root count off, the partner count claim breaks");
    roots.push_back(std::move(r));
  }

  std::vector<PartnerPoint> out;
  std::vector<std::size_t> idx(roots.size(), 0);
  while (true) {
    std::vector<TorsorElement> parts;
    for (std::size_t k = 0; k < idx.size(); ++k) parts.push_back(roots[k][idx[k]]);
    QuadInteger beta = parts.empty() ? QuadInteger::one(fam.field)
                                     : crt_representative(parts, fam.field);

    MarkedSubgroup twisted = apply_endo(beta, kernel);
    auto [Ey, Dy] = alpha_chain(fam.base, twisted, fam.alpha, m);
    (void)Ey;
    WeakIsoCertificate cert = weak_iso_products(image, psi_general(Dy.parent, Dy, Aprime));
    if (!cert.verdict)
      throw integrity_error("partner certificate failed; the construction is falsified");
    out.push_back(PartnerPoint{std::move(twisted), std::move(Dy), std::move(cert)});

    std::size_t k = idx.size();
    while (k > 0) {
      if (++idx[k - 1] < roots[k - 1].size()) break;
      idx[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }

  // distinct solution tuples must give distinct subgroups and distinct curves
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b) {
      if (out[a].kernel.witness == out[b].kernel.witness)
        throw integrity_error("twisted kernels collided");
      if (weak_iso_curves(out[a].point.parent, out[b].point.parent))
        throw integrity_error("partner curves collided");
    }
  return out;
}

std::vector<PartnerPoint> partners(const PairFamily& fam, long i, const SymPosDefIntMatrix& A,
                                   const SymPosDefIntMatrix& Aprime) {
  return partners(fam, canonical_kernel(fam, i), A, Aprime);
}

PairFamily generate_family(const GenConfig& cfg, const SymPosDefIntMatrix& A,
                           const SymPosDefIntMatrix& Aprime) {
  PairFamily fam = setup(cfg);
  for (long i = 0; i <= cfg.depth; ++i) fam.xs.push_back(build_x(fam, i, A));
  for (long i = 1; i <= cfg.depth; ++i) fam.partners[i] = partners(fam, i, A, Aprime);
  return fam;
}

}  // namespace weakiso
