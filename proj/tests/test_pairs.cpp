#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "weakiso/pair_generator.hpp"
#include "weakiso/util.hpp"

using namespace weakiso;

namespace {

SymPosDefIntMatrix diag(const std::vector<long>& entries) {
  IntMatrix a(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) a.at(i, i) = Int(entries[i]);
  return SymPosDefIntMatrix(a);
}

GenConfig config(long g, long depth) {
  GenConfig cfg;
  cfg.g = g;
  cfg.depth = depth;
  return cfg;
}

}  // namespace

TEST_CASE("setup assembles the documented search results") {
  PairFamily fam = setup(config(2, 2));
  CHECK(fam.field.value() == -7);
  CHECK(fam.ell == 2);
  CHECK(fam.alpha == QuadInteger(3, 1, fam.field));
  CHECK(fam.qs == find_q(fam.field, Int(2), fam.alpha, Int(2), fam.cfg.prime_bound));
  CHECK(fam.qs.size() == 2);
  CHECK(fam.qs[0] == 17);
  CHECK(fam.qs[1] == 31);
  CHECK(fam.base.order.conductor == 1);
  for (const Int& q : fam.qs) {
    CHECK(q != fam.ell);
    CHECK(kronecker_symbol(fam.field.value(), q) == -1);
  }

  GenConfig with_p = config(2, 1);
  with_p.p = Int(2);
  PairFamily famp = setup(with_p);
  CHECK(famp.field.value() == -7);  // 2 splits there already
  CHECK(famp.ell == 11);            // excluded from taking ell = p = 2
  CHECK(famp.alpha.norm() == 11);

  GenConfig with_7 = config(2, 1);
  with_7.p = Int(7);
  CHECK(setup(with_7).field.value() == -19);  // first trivial-unit field with 7 split

  CHECK_THROWS_AS(setup(config(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(setup(config(2, -1)), std::invalid_argument);
  GenConfig bad_p = config(2, 1);
  bad_p.p = Int(6);
  CHECK_THROWS_AS(setup(bad_p), std::invalid_argument);

  GenConfig starved = config(2, 1);
  starved.field_bound = Int(3);
  try {
    setup(starved);
    CHECK(false);
  } catch (const search_error& e) {
    CHECK(std::string(e.what()).rfind("field stage:", 0) == 0);
  }
  GenConfig starved2 = config(2, 5);
  starved2.prime_bound = Int(40);
  try {
    setup(starved2);
    CHECK(false);
  } catch (const search_error& e) {
    CHECK(std::string(e.what()).rfind("inert prime stage:", 0) == 0);
  }
}

TEST_CASE("points climb the conductor ladder") {
  PairFamily fam = setup(config(2, 2));
  auto A = diag({1, 2});

  MarkedSubgroup x0 = build_x(fam, 0, A);
  CHECK(x0.parent == fam.base);
  CHECK(x0.modulus == 2);

  MarkedSubgroup x1 = build_x(fam, 1, A);
  CHECK(x1.parent.order.conductor == 17);
  CHECK(x1.modulus == 2);

  MarkedSubgroup x2 = build_x(fam, 2, A);
  CHECK(x2.parent.order.conductor == 17 * 31);

  CHECK(!weak_iso_curves(x0.parent, x1.parent));
  CHECK(!weak_iso_curves(x0.parent, x2.parent));
  CHECK(!weak_iso_curves(x1.parent, x2.parent));

  CHECK(build_x(fam, 1, diag({2, 4})).modulus == 8);
  CHECK(build_x(fam, 1, diag({1, 1})).modulus == 1);

  CHECK_THROWS_AS(build_x(fam, 3, A), std::invalid_argument);
  CHECK_THROWS_AS(build_x(fam, -1, A), std::invalid_argument);
  CHECK_THROWS_AS(build_x(fam, 1, diag({2, 3})), std::invalid_argument);  // det 6
  CHECK_THROWS_AS(build_x(fam, 1, diag({2})), std::invalid_argument);     // rank 1

  // canonical kernels carry identity coordinates at each prime
  MarkedSubgroup C2 = canonical_kernel(fam, 2);
  CHECK(C2.modulus == 17 * 31);
  REQUIRE(C2.coords.size() == 2);
  for (const auto& [q, t] : C2.coords) CHECK(t == TorsorGroup(fam.field, q).identity());
}

TEST_CASE("partner lists have the advertised size and certificates") {
  PairFamily fam = setup(config(2, 2));
  auto A = diag({1, 2});
  auto Ap = diag({1, 4});

  for (long i = 0; i <= 2; ++i) {
    auto list = partners(fam, i, A, Ap);
    long expected = 1;
    for (long k = 0; k < i; ++k) expected *= 2;
    CHECK(static_cast<long>(list.size()) == expected);

    std::set<std::string> kernels;
    for (const auto& pt : list) {
      CHECK(pt.certificate.verdict);
      CHECK(pt.certificate.oracle_path.verdict);
      CHECK(!pt.certificate.inputs_digest.empty());
      CHECK(pt.point.modulus == 4);  // det A' fixes the chain length of partners
      if (i > 0) CHECK(pt.kernel.modulus == canonical_kernel(fam, i).modulus);
      CHECK(kernels.insert(pt.kernel.witness.str()).second);
    }
    for (std::size_t a = 0; a < list.size(); ++a)
      for (std::size_t b = a + 1; b < list.size(); ++b)
        CHECK(!weak_iso_curves(list[a].point.parent, list[b].point.parent));
  }

  // equal matrices make the anchor one of its own partners
  auto self = partners(fam, 1, A, A);
  CHECK(self.size() == 2);
  bool anchor_found = false;
  for (const auto& pt : self)
    if (pt.kernel.witness == canonical_kernel(fam, 1).witness) anchor_found = true;
  CHECK(anchor_found);

  CHECK_THROWS_AS(partners(fam, 1, A, diag({1, 5})), std::invalid_argument);
  CHECK_THROWS_AS(partners(fam, 1, diag({2}), Ap), std::invalid_argument);
}

TEST_CASE("reverse direction recovers the anchor") {
  PairFamily fam = setup(config(2, 1));
  auto A = diag({1, 2});
  auto Ap = diag({1, 4});
  MarkedSubgroup C1 = canonical_kernel(fam, 1);

  auto forward = partners(fam, 1, A, Ap);
  REQUIRE(forward.size() == 2);
  for (const auto& pt : forward) {
    auto back = partners(fam, pt.kernel, Ap, A);
    CHECK(back.size() == 2);
    bool recovered = false;
    for (const auto& rp : back) {
      CHECK(rp.certificate.verdict);
      if (rp.kernel.witness == C1.witness) recovered = true;
    }
    CHECK(recovered);
  }
}

TEST_CASE("family bundle is deterministic and complete") {
  auto A = diag({1, 2});
  auto Ap = diag({1, 4});
  PairFamily fam = generate_family(config(2, 2), A, Ap);

  REQUIRE(fam.xs.size() == 3);
  CHECK(fam.partners.at(1).size() == 2);
  CHECK(fam.partners.at(2).size() == 4);
  CHECK(fam.partners.count(0) == 0);
  for (const auto& [i, list] : fam.partners)
    for (const auto& pt : list) CHECK(pt.certificate.verdict);

  PairFamily again = generate_family(config(2, 2), A, Ap);
  for (std::size_t i = 0; i < fam.xs.size(); ++i) {
    CHECK(fam.xs[i].witness == again.xs[i].witness);
    CHECK(fam.xs[i].parent == again.xs[i].parent);
  }
  for (const auto& [i, list] : fam.partners)
    for (std::size_t k = 0; k < list.size(); ++k) {
      CHECK(list[k].kernel.witness == again.partners.at(i)[k].kernel.witness);
      CHECK(list[k].certificate.inputs_digest == again.partners.at(i)[k].certificate.inputs_digest);
    }

  // three factors: partner counts jump to powers of three
  PairFamily fam3 = setup(config(3, 1));
  CHECK(fam3.qs == find_q(fam3.field, Int(3), fam3.alpha, Int(1), fam3.cfg.prime_bound));
  auto A3 = diag({1, 1, 3});   // uses ell = 2: invalid on purpose below
  CHECK_THROWS_AS(partners(fam3, 1, A3, A3), std::invalid_argument);
  auto B = diag({1, 1, 2});
  auto Bp = diag({1, 2, 2});
  auto list3 = partners(fam3, 1, B, Bp);
  CHECK(list3.size() == 3);
  for (const auto& pt : list3) {
    CHECK(pt.certificate.verdict);
    CHECK(pt.point.parent.order.conductor == fam3.qs[0]);
  }
}
