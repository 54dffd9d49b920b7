#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "weakiso/matrix.hpp"

using namespace weakiso;

namespace {

IntMatrix from_rows(const std::vector<std::vector<long>>& rows) {
  IntMatrix a(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) a.at(i, j) = Int(rows[i][j]);
  return a;
}

SymPosDefIntMatrix spd(const std::vector<std::vector<long>>& rows) {
  return SymPosDefIntMatrix(from_rows(rows));
}

// determinant by cofactor expansion, independent of the elimination-based IntMatrix::det
Int cofactor_det(const IntMatrix& a, std::vector<std::size_t> cols) {
  std::size_t i = a.rows() - cols.size();
  if (cols.empty()) return Int(1);
  Int acc = 0;
  int sign = 1;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    std::vector<std::size_t> rest;
    for (std::size_t l = 0; l < cols.size(); ++l)
      if (l != k) rest.push_back(cols[l]);
    acc += sign * a.at(i, cols[k]) * cofactor_det(a, rest);
    sign = -sign;
  }
  return acc;
}

Int cofactor_det(const IntMatrix& a) {
  std::vector<std::size_t> cols(a.cols());
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  return cofactor_det(a, cols);
}

// elementary divisors via determinantal divisors: d_i = D_i / D_{i-1} where D_i is the
// gcd of all i x i minors; characterizes the Smith form without performing any elimination
std::vector<Int> divisors_by_minor_gcds(const IntMatrix& a) {
  std::size_t g = a.rows();
  std::vector<Int> dd(g + 1);
  dd[0] = 1;
  for (std::size_t k = 1; k <= g; ++k) {
    Int gk = 0;
    std::vector<std::size_t> ri(k), ci(k);
    std::function<void(std::size_t, std::size_t)> pick_cols = [&](std::size_t pos, std::size_t lo) {
      if (pos == k) {
        IntMatrix sub(k, k);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub.at(i, j) = a.at(ri[i], ci[j]);
        gk = gcd_int(gk, cofactor_det(sub));
        return;
      }
      for (std::size_t c = lo; c < g; ++c) { ci[pos] = c; pick_cols(pos + 1, c + 1); }
    };
    std::function<void(std::size_t, std::size_t)> pick_rows = [&](std::size_t pos, std::size_t lo) {
      if (pos == k) { pick_cols(0, 0); return; }
      for (std::size_t r = lo; r < g; ++r) { ri[pos] = r; pick_rows(pos + 1, r + 1); }
    };
    pick_rows(0, 0);
    dd[k] = gk;
  }
  std::vector<Int> out;
  for (std::size_t k = 1; k <= g; ++k) out.push_back(dd[k] / dd[k - 1]);
  return out;
}

// exhaustive count of v in (Z/N)^g with A v = 0 mod N; long arithmetic is safe for the
// small instances exercised here
long count_kernel_vectors(const SymPosDefIntMatrix& A, long N) {
  std::size_t g = A.g();
  std::vector<long> a(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) a[i * g + j] = to_long(A.at(i, j));
  std::vector<long> v(g, 0);
  long count = 0;
  while (true) {
    bool in_kernel = true;
    for (std::size_t i = 0; i < g && in_kernel; ++i) {
      long s = 0;
      for (std::size_t j = 0; j < g; ++j) s = (s + a[i * g + j] * v[j]) % N;
      if (s % N != 0) in_kernel = false;
    }
    if (in_kernel) ++count;
    std::size_t pos = 0;
    while (pos < g && ++v[pos] == N) v[pos++] = 0;
    if (pos == g) break;
  }
  return count;
}

std::vector<Int> snf_divisors(const SymPosDefIntMatrix& A) { return smith_normal_form(A).divisors(); }

void check_factorization(const SymPosDefIntMatrix& A, const SNFResult& r) {
  CHECK(r.U.mul(r.D).mul(r.V) == A.entries());
  CHECK(abs(cofactor_det(r.U)) == 1);
  CHECK(abs(cofactor_det(r.V)) == 1);
  auto d = r.divisors();
  Int prod = 1;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d[i] > 0);
    if (i + 1 < d.size()) CHECK(mod_floor(d[i + 1], d[i]) == 0);
    prod *= d[i];
  }
  CHECK(prod == A.det());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      CHECK(r.D.at(i, j) == (i == j ? d[i] : Int(0)));
}

}  // namespace

TEST_CASE("integer matrix determinant handles pivot degeneracies") {
  CHECK(from_rows({{0, 1}, {1, 0}}).det() == -1);
  CHECK(from_rows({{1, 2}, {3, 4}}).det() == -2);
  CHECK(from_rows({{1, 2}, {2, 4}}).det() == 0);
  CHECK(from_rows({{0, 2, 1}, {1, 0, 3}, {2, 1, 0}}).det() == 13);
  CHECK(IntMatrix::identity(4).det() == 1);
  Rng rng(0x5eedu);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t g = 1 + static_cast<std::size_t>(rng.below(4));
    IntMatrix a(g, g);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j) a.at(i, j) = rng.range(-6, 6);
    CHECK(a.det() == cofactor_det(a));
  }
}

TEST_CASE("positive definite construction rejects invalid input") {
  CHECK(!SymPosDefIntMatrix::try_make(IntMatrix(2, 3)).has_value());
  CHECK(!SymPosDefIntMatrix::try_make(from_rows({{1, 2}, {3, 4}})).has_value());
  CHECK(!SymPosDefIntMatrix::try_make(from_rows({{1, 2}, {2, 1}})).has_value());
  CHECK(!SymPosDefIntMatrix::try_make(from_rows({{1, 1}, {1, 1}})).has_value());
  CHECK(!SymPosDefIntMatrix::try_make(from_rows({{-1, 0}, {0, -1}})).has_value());
  CHECK(!SymPosDefIntMatrix::try_make(from_rows({{2, 3}, {3, 2}})).has_value());
  CHECK_THROWS_AS(spd({{1, 2}, {3, 4}}), std::invalid_argument);
  CHECK_THROWS_AS(spd({{0, 0}, {0, 0}}), std::invalid_argument);
  auto ok = SymPosDefIntMatrix::try_make(from_rows({{2, 1}, {1, 2}}));
  REQUIRE(ok.has_value());
  CHECK(ok->det() == 3);
  CHECK(!ok->is_diagonal());
  CHECK(spd({{5, 0}, {0, 7}}).is_diagonal());
}

TEST_CASE("smith normal form on pinned matrices") {
  CHECK(snf_divisors(spd({{2, 1}, {1, 2}})) == std::vector<Int>{Int(1), Int(3)});
  CHECK(snf_divisors(spd({{4, 2}, {2, 4}})) == std::vector<Int>{Int(2), Int(6)});
  CHECK(snf_divisors(spd({{6, 3}, {3, 6}})) == std::vector<Int>{Int(3), Int(9)});
  for (std::size_t g = 1; g <= 5; ++g) {
    auto d = snf_divisors(SymPosDefIntMatrix(IntMatrix::identity(g)));
    CHECK(d == std::vector<Int>(g, Int(1)));
  }
  CHECK(snf_divisors(spd({{1, 0, 0}, {0, 3, 0}, {0, 0, 9}})) ==
        std::vector<Int>{Int(1), Int(3), Int(9)});
  CHECK(snf_divisors(spd({{9, 0, 0}, {0, 3, 0}, {0, 0, 1}})) ==
        std::vector<Int>{Int(1), Int(3), Int(9)});
  // diagonal without the divisibility chain must be rebuilt, not merely sorted
  CHECK(snf_divisors(spd({{2, 0}, {0, 3}})) == std::vector<Int>{Int(1), Int(6)});
  CHECK(snf_divisors(spd({{6, 0, 0}, {0, 10, 0}, {0, 0, 15}})) ==
        std::vector<Int>{Int(1), Int(30), Int(30)});
  CHECK(snf_divisors(spd({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}})) ==
        std::vector<Int>{Int(1), Int(1), Int(4)});
  for (const auto& A : {spd({{2, 1}, {1, 2}}), spd({{4, 2}, {2, 4}}),
                        spd({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}}),
                        spd({{6, 0, 0}, {0, 10, 0}, {0, 0, 15}})}) {
    auto r = smith_normal_form(A);
    check_factorization(A, r);
    CHECK(r.divisors() == divisors_by_minor_gcds(A.entries()));
  }
}

TEST_CASE("smith normal form round trip on random positive definite matrices") {
  Rng rng(0x9a7f11c2u);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t g = 1 + static_cast<std::size_t>(rng.below(5));
    IntMatrix b(g, g);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j) b.at(i, j) = rng.range(-4, 4);
    IntMatrix a = b.mul(b.transpose());
    for (std::size_t i = 0; i < g; ++i) a.at(i, i) += 1;
    auto A = SymPosDefIntMatrix::try_make(a);
    REQUIRE(A.has_value());
    auto r = smith_normal_form(*A);
    check_factorization(*A, r);
    if (g <= 4) CHECK(r.divisors() == divisors_by_minor_gcds(a));
  }
}

TEST_CASE("kernel order matches exhaustive count") {
  auto A0 = spd({{2, 1}, {1, 2}});
  CHECK(kernel_order(A0, Int(3)) == 3);
  CHECK(count_kernel_vectors(A0, 3) == 3);
  CHECK(kernel_order(SymPosDefIntMatrix(IntMatrix::identity(1)), Int(1)) == 1);
  CHECK(kernel_order(spd({{2, 0}, {0, 4}}), Int(8)) == 8);
  CHECK(count_kernel_vectors(spd({{2, 0}, {0, 4}}), 8) == 8);
  CHECK(kernel_order(spd({{1, 0, 0}, {0, 3, 0}, {0, 0, 9}}), Int(27)) == 27);
  CHECK(count_kernel_vectors(spd({{1, 0, 0}, {0, 3, 0}, {0, 0, 9}}), 27) == 27);
  CHECK_THROWS_AS(kernel_order(A0, Int(4)), std::invalid_argument);
  CHECK_THROWS_AS(kernel_order(A0, Int(1)), std::invalid_argument);

  for (const auto& A : enumerate_detl(2, Int(3), 2)) {
    long n = to_long(A.det());
    CHECK(kernel_order(A, A.det()) == n);
    CHECK(count_kernel_vectors(A, n) == n);
  }
  for (const auto& A : enumerate_detl(3, Int(3), 1)) {
    long n = to_long(A.det());
    CHECK(kernel_order(A, A.det()) == n);
    CHECK(count_kernel_vectors(A, n) == n);
  }
  for (const auto& A : enumerate_detl(2, Int(2), 4)) {
    long n = to_long(A.det());
    CHECK(kernel_order(A, A.det()) == n);
    CHECK(count_kernel_vectors(A, n) == n);
  }
}

TEST_CASE("bounded determinant enumeration") {
  auto g1 = enumerate_detl(1, Int(5), 3);
  REQUIRE(g1.size() == 4);
  CHECK(g1[0].at(0, 0) == 1);
  CHECK(g1[1].at(0, 0) == 5);
  CHECK(g1[2].at(0, 0) == 25);
  CHECK(g1[3].at(0, 0) == 125);
  auto g1b = enumerate_detl(1, Int(2), 0);
  REQUIRE(g1b.size() == 1);
  CHECK(g1b[0].at(0, 0) == 1);

  auto out = enumerate_detl(2, Int(3), 2);
  auto contains = [&](const std::vector<std::vector<long>>& rows) {
    auto target = spd(rows);
    return std::any_of(out.begin(), out.end(),
                       [&](const SymPosDefIntMatrix& a) { return a == target; });
  };
  CHECK(contains({{1, 0}, {0, 3}}));
  CHECK(contains({{3, 0}, {0, 1}}));
  CHECK(contains({{2, 1}, {1, 2}}));
  CHECK(contains({{2, -1}, {-1, 2}}));
  CHECK(contains({{1, 0}, {0, 1}}));
  CHECK(contains({{2, 1}, {1, 5}}));

  std::set<std::string> seen;
  Int bound = int_pow(Int(3), 2);
  for (const auto& a : out) {
    CHECK(seen.insert(a.str()).second);
    Int d = a.det();
    while (mod_floor(d, 3) == 0) d /= 3;
    CHECK(d == 1);
    CHECK(a.det() <= bound);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(a.at(i, j) == a.at(j, i));
        CHECK(abs(a.at(i, j)) <= bound);
      }
  }
  CHECK(enumerate_detl(2, Int(3), 2) == out);

  CHECK_THROWS_AS(enumerate_detl(2, Int(4), 1), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_detl(0, Int(3), 1), std::invalid_argument);
}

TEST_CASE("enumeration agrees with a direct scan") {
  auto is_power_of = [](Int d, const Int& ell, const Int& bound) {
    if (d > bound) return false;
    while (mod_floor(d, ell) == 0) d /= ell;
    return d == 1;
  };

  std::set<std::string> direct2;
  for (long a = 1; a <= 9; ++a)
    for (long c = 1; c <= 9; ++c)
      for (long b = -9; b <= 9; ++b) {
        auto m = SymPosDefIntMatrix::try_make(from_rows({{a, b}, {b, c}}));
        if (m && is_power_of(m->det(), Int(3), Int(9))) direct2.insert(m->str());
      }
  std::set<std::string> enum2;
  for (const auto& a : enumerate_detl(2, Int(3), 2)) enum2.insert(a.str());
  CHECK(enum2 == direct2);

  std::set<std::string> direct3;
  for (long d1 = 1; d1 <= 3; ++d1)
    for (long d2 = 1; d2 <= 3; ++d2)
      for (long d3 = 1; d3 <= 3; ++d3)
        for (long u = -3; u <= 3; ++u)
          for (long v = -3; v <= 3; ++v)
            for (long w = -3; w <= 3; ++w) {
              auto m = SymPosDefIntMatrix::try_make(
                  from_rows({{d1, u, v}, {u, d2, w}, {v, w, d3}}));
              if (m && is_power_of(m->det(), Int(3), Int(3))) direct3.insert(m->str());
            }
  std::set<std::string> enum3;
  for (const auto& a : enumerate_detl(3, Int(3), 1)) enum3.insert(a.str());
  CHECK(enum3 == direct3);
}
