#include "weakiso/qexp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace weakiso {

namespace {

bool is_symmetric(const IntMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (m.at(i, j) != m.at(j, i)) return false;
  return true;
}

// semidefiniteness needs every principal minor, not only the leading ones
bool all_principal_minors_nonneg(const IntMatrix& m) {
  std::size_t g = m.rows();
  for (unsigned long mask = 1; mask < (1ul << g); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g; ++i)
      if ((mask >> i) & 1) idx.push_back(i);
    IntMatrix sub(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) sub.at(i, j) = m.at(idx[i], idx[j]);
    if (sub.det() < 0) return false;
  }
  return true;
}

Rat reduce_coeff(const Rat& c, const Int& p) {
  if (p == 0) return c;
  Int den = mod_floor(c.get_den(), p);
  if (den == 0) throw std::invalid_argument("coefficient denominator vanishes in the prime field");
  return Rat(mod_floor(c.get_num() * invmod(den, p), p));
}

// nearest integer, ties rounded up
Int round_rat(const Rat& x) {
  Int q;
  Int num = 2 * x.get_num() + x.get_den();
  Int den = 2 * x.get_den();
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

double double_det(std::vector<std::vector<double>> a) {
  std::size_t n = a.size();
  double out = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t p = j;
    for (std::size_t i = j + 1; i < n; ++i)
      if (std::abs(a[i][j]) > std::abs(a[p][j])) p = i;
    if (a[p][j] == 0.0) return 0.0;
    if (p != j) {
      std::swap(a[p], a[j]);
      out = -out;
    }
    out *= a[j][j];
    for (std::size_t i = j + 1; i < n; ++i) {
      double f = a[i][j] / a[j][j];
      for (std::size_t c = j; c < n; ++c) a[i][c] -= f * a[j][c];
    }
  }
  return out;
}

// exact tr(E Q) = tr(E (2Q)) / 2 over the rationals
Rat rational_pair_trace(const RatMatrix& E, const HalfIntegralMatrix& Q) {
  Rat s(0);
  for (std::size_t i = 0; i < E.rows(); ++i)
    for (std::size_t j = 0; j < E.cols(); ++j) s += E.at(i, j) * Rat(Q.twice().at(j, i));
  return s / 2;
}

std::size_t common_g(const std::vector<HalfIntegralMatrix>& S) {
  if (S.empty()) throw std::invalid_argument("empty support");
  std::size_t g = S[0].g();
  for (const auto& Q : S)
    if (Q.g() != g) throw std::invalid_argument("mixed matrix sizes in one support");
  return g;
}

}  // namespace

HalfIntegralMatrix::HalfIntegralMatrix(IntMatrix twice) {
  auto ok = try_make(std::move(twice));
  if (!ok) throw std::invalid_argument("not a positive semidefinite half-integral matrix");
  *this = *ok;
}

std::optional<HalfIntegralMatrix> HalfIntegralMatrix::try_make(IntMatrix twice) {
  if (!is_symmetric(twice)) return std::nullopt;
  for (std::size_t i = 0; i < twice.rows(); ++i)
    if (mod_floor(twice.at(i, i), 2) != 0) return std::nullopt;
  if (!all_principal_minors_nonneg(twice)) return std::nullopt;
  HalfIntegralMatrix q;
  q.twice_ = std::move(twice);
  return q;
}

Int HalfIntegralMatrix::trace() const {
  Int s = 0;
  for (std::size_t i = 0; i < g(); ++i) s += twice_.at(i, i);
  return s / 2;
}

Int HalfIntegralMatrix::pair_trace(const SymPosDefIntMatrix& A) const {
  if (A.g() != g()) throw std::invalid_argument("matrix size mismatch");
  Int s = 0;
  for (std::size_t i = 0; i < g(); ++i)
    for (std::size_t j = 0; j < g(); ++j) s += A.at(i, j) * twice_.at(j, i);
  if (mod_floor(s, 2) != 0) throw integrity_error("pairing trace is not integral");
  return s / 2;
}

bool HalfIntegralMatrix::operator<(const HalfIntegralMatrix& o) const {
  if (g() != o.g()) return g() < o.g();
  return twice_.m < o.twice_.m;
}

FormalQExpansion::FormalQExpansion(const Int& characteristic) : char_(characteristic) {
  if (char_ != 0 && !is_prime(char_))
    throw std::invalid_argument("characteristic must be zero or a prime");
}

void FormalQExpansion::add_term(const HalfIntegralMatrix& Q, const Rat& c) {
  if (!coeffs_.empty() && coeffs_.begin()->first.g() != Q.g())
    throw std::invalid_argument("mixed matrix sizes in one expansion");
  auto it = coeffs_.find(Q);
  Rat v = reduce_coeff((it == coeffs_.end() ? Rat(0) : it->second) + c, char_);
  if (v == 0) {
    if (it != coeffs_.end()) coeffs_.erase(it);
  } else {
    coeffs_[Q] = v;
  }
}

std::vector<HalfIntegralMatrix> FormalQExpansion::support() const {
  std::vector<HalfIntegralMatrix> out;
  out.reserve(coeffs_.size());
  for (const auto& [q, c] : coeffs_) out.push_back(q);
  return out;
}

FormalQExpansion FormalQExpansion::plus(const FormalQExpansion& o) const {
  if (char_ != o.char_) throw std::invalid_argument("mixed characteristics");
  FormalQExpansion out = *this;
  for (const auto& [q, c] : o.coeffs_) out.add_term(q, c);
  return out;
}

Rat PullbackSeries::at(const Int& n) const {
  auto it = terms.find(n);
  return it == terms.end() ? Rat(0) : it->second;
}

std::vector<HalfIntegralMatrix> enumerate_bounded_trace(long g, const Int& t) {
  if (g < 1) throw std::invalid_argument("size must be at least 1");
  std::vector<HalfIntegralMatrix> out;
  if (t < 0) return out;
  std::size_t n = static_cast<std::size_t>(g);
  IntMatrix q(n, n);

  // off-diagonal pairs in lexicographic order; each entry is confined to the exact
  // two-by-two minor range, which sits inside the trace ball |Q_ij| <= tr(Q)
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  std::function<void(std::size_t)> fill_off = [&](std::size_t k) {
    if (k == pairs.size()) {
      auto cand = HalfIntegralMatrix::try_make(q);
      if (cand) out.push_back(std::move(*cand));
      return;
    }
    auto [i, j] = pairs[k];
    Int bound = isqrt(q.at(i, i) * q.at(j, j));
    for (Int v = -bound; v <= bound; ++v) {
      q.at(i, j) = v;
      q.at(j, i) = v;
      fill_off(k + 1);
    }
    q.at(i, j) = 0;
    q.at(j, i) = 0;
  };

  std::function<void(std::size_t, Int)> fill_diag = [&](std::size_t i, Int left) {
    if (i == n) {
      fill_off(0);
      return;
    }
    for (Int v = 0; v <= left; v += 2) {
      q.at(i, i) = v;
      fill_diag(i + 1, left - v);
    }
    q.at(i, i) = 0;
  };

  fill_diag(0, 2 * t);
  std::sort(out.begin(), out.end());
  return out;
}

PullbackSeries pullback(const FormalQExpansion& f, const SymPosDefIntMatrix& A) {
  PullbackSeries out{f.characteristic(), {}};
  for (const auto& [q, c] : f.coeffs()) {
    Int n = q.pair_trace(A);
    if (n < 0) throw integrity_error("restriction produced a negative exponent");
    out.terms[n] += c;
  }
  for (auto it = out.terms.begin(); it != out.terms.end();) {
    it->second = reduce_coeff(it->second, out.characteristic);
    it = it->second == 0 ? out.terms.erase(it) : std::next(it);
  }
  return out;
}

RatMatrix minimizer_cone_sample(const std::vector<HalfIntegralMatrix>& S, std::uint64_t seed,
                                long budget) {
  std::size_t g = common_g(S);

  // the two smallest plain-trace values control how small the sample must be
  std::vector<Int> traces;
  for (const auto& Q : S) traces.push_back(Q.trace());
  Int t0 = *std::min_element(traces.begin(), traces.end());
  Int t1 = 0;
  bool has_t1 = false;
  for (const Int& t : traces)
    if (t > t0 && (!has_t1 || t < t1)) {
      t1 = t;
      has_t1 = true;
    }

  Rng rng(seed);
  for (long attempt = 0; attempt < budget; ++attempt) {
    RatMatrix E(g, g);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = i; j < g; ++j) {
        // the grid is fine enough that up to ~20 support members separate pairwise with
        // good odds per attempt; entries stay below 1/2 so the dominance shift works
        Rat v = Rat(rng.range(-2048, 2048)) / Rat(4096);
        E.at(i, j) = v;
        E.at(j, i) = v;
      }
    // diagonal dominance makes the sample positive definite before scaling
    Rat lam(1);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j) lam += abs(E.at(i, j));
    for (std::size_t i = 0; i < g; ++i) E.at(i, i) += lam;

    std::vector<Rat> vals;
    for (const auto& Q : S) vals.push_back(rational_pair_trace(E, Q));
    std::vector<Rat> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;

    if (has_t1) {
      Rat m3 = *std::max_element(vals.begin(), vals.end());
      Rat eps = Rat(t1 - t0) / (2 * (m3 + 1));
      for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) E.at(i, j) *= eps;
      for (auto& v : vals) v *= eps;
    }

    // verify the three conditions exactly on the returned sample
    bool ok = true;
    for (std::size_t k = 1; k <= g && ok; ++k) {
      RatMatrix sub(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) sub.at(i, j) = E.at(i, j);
      if (sub.det() <= 0) ok = false;
    }
    sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ok = false;
    if (has_t1)
      for (const Rat& v : vals)
        if (!(v < Rat(t1 - t0))) ok = false;
    if (ok) return E;
  }
  throw search_error("minimizer sample search exhausted its retry budget");
}

RatMatrix approx_in_sl(const std::vector<std::vector<double>>& H, const Int& ell, long k) {
  std::size_t g = H.size();
  if (g == 0) throw std::invalid_argument("empty matrix");
  for (const auto& row : H)
    if (row.size() != g) throw std::invalid_argument("matrix is not square");
  if (!is_prime(ell)) throw std::invalid_argument("denominator base must be prime");
  if (k < 1) throw std::invalid_argument("precision exponent must be positive");
  if (std::abs(double_det(H) - 1.0) > 1e-6)
    throw std::invalid_argument("determinant is not 1 within tolerance");

  struct Op {
    std::size_t i, j;
    double c;
  };
  std::vector<Op> ops;
  auto M = H;
  auto rowop = [&](std::size_t i, std::size_t j, double c) {
    if (c == 0.0) return;
    for (std::size_t col = 0; col < g; ++col) M[i][col] += c * M[j][col];
    ops.push_back({i, j, c});
  };

  for (std::size_t j = 0; j < g; ++j) {
    if (std::abs(M[j][j] - 1.0) > 1e-14) {
      // steer the pivot to 1 with rows below; rows above are already unit rows and
      // touching them would reopen cleared columns
      std::size_t r = 0;
      double best = 1e-9;
      for (std::size_t i = j + 1; i < g; ++i)
        if (std::abs(M[i][j]) > best) {
          best = std::abs(M[i][j]);
          r = i;
        }
      if (best > 1e-9) {
        rowop(j, r, (1.0 - M[j][j]) / M[r][j]);
      } else if (j + 1 < g && std::abs(M[j][j]) > 1e-9) {
        rowop(j + 1, j, 1.0);
        rowop(j, j + 1, (1.0 - M[j][j]) / M[j + 1][j]);
      } else if (j + 1 < g) {
        throw search_error("factorization pivot vanished in column " + std::to_string(j) +
                           "; matrix is ill-conditioned");
      } else if (std::abs(M[j][j] - 1.0) > 0.5) {
        throw search_error("factorization lost the unit determinant; final pivot " +
                           std::to_string(M[j][j]));
      }
      // a last-pivot discrepancy below 0.5 is rounding residue and folds into the
      // approximation error
    }
    for (std::size_t i = 0; i < g; ++i)
      if (i != j) rowop(i, j, -M[i][j] / M[j][j]);
  }

  // the ops turn H into (nearly) the identity from the left, so H is the product of the
  // inverse transvections in reverse application order; round each parameter to Z[1/ell]
  Int lk = int_pow(ell, static_cast<unsigned long>(k));
  RatMatrix G = RatMatrix::identity(g);
  for (const Op& op : ops) {
    Rat c = Rat(round_rat(Rat(-op.c) * Rat(lk))) / Rat(lk);
    if (c == 0) continue;
    for (std::size_t r = 0; r < g; ++r) G.at(r, op.j) += c * G.at(r, op.i);
  }

  if (G.det() != 1) throw integrity_error("approximation left the special linear group");
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      Int den = G.at(i, j).get_den();
      while (mod_floor(den, ell) == 0) den /= ell;
      if (den != 1) throw integrity_error("approximation denominator is not a power of ell");
    }
  return G;
}

SymPosDefIntMatrix find_witness_matrix(const std::vector<HalfIntegralMatrix>& S, const Int& ell,
                                       std::uint64_t seed) {
  std::size_t g = common_g(S);
  if (!is_prime(ell)) throw std::invalid_argument("determinant base must be prime");
  if (S.size() == 1) return enumerate_detl(static_cast<long>(g), ell, 0).front();

  RatMatrix E = minimizer_cone_sample(S, seed);
  RatMatrix T = E;
  for (std::size_t i = 0; i < g; ++i) T.at(i, i) += 1;

  // scale the target to unit determinant, then split off a numeric square root; the
  // scaling does not move the ordering of the pairing traces
  std::vector<std::vector<double>> td(g, std::vector<double>(g));
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) td[i][j] = T.at(i, j).get_d();
  double s = std::pow(double_det(td), -1.0 / static_cast<double>(g));
  for (auto& row : td)
    for (double& v : row) v *= s;

  std::vector<std::vector<double>> L(g, std::vector<double>(g, 0.0));
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = td[i][j];
      for (std::size_t r = 0; r < j; ++r) acc -= L[i][r] * L[j][r];
      if (i == j) {
        if (acc <= 0) throw integrity_error("cone sample lost positive definiteness numerically");
        L[i][i] = std::sqrt(acc);
      } else {
        L[i][j] = acc / L[j][j];
      }
    }

  long k = 12;
  for (int attempt = 0; attempt < 10; ++attempt, k += 8) {
    RatMatrix G = approx_in_sl(L, ell, k);
    unsigned long e = 0;
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j)
        if (G.at(i, j).get_den() != 1) e = std::max(e, valuation(G.at(i, j).get_den(), ell));
    Int le = int_pow(ell, e);
    IntMatrix gi(g, g);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j) {
        Rat v = G.at(i, j) * Rat(le);
        if (v.get_den() != 1) throw integrity_error("denominators survived clearing");
        gi.at(i, j) = v.get_num();
      }
    auto A = SymPosDefIntMatrix::try_make(gi.mul(gi.transpose()));
    if (!A) continue;

    bool unique = true;
    bool first = true;
    Int best = 0;
    int winners = 0;
    for (const auto& Q : S) {
      Int t = Q.pair_trace(*A);
      if (first || t < best) {
        best = t;
        winners = 1;
        first = false;
      } else if (t == best) {
        ++winners;
      }
    }
    unique = winners == 1;
    if (unique) return *A;
  }
  throw search_error("witness matrix precision escalation exhausted its budget");
}

NonvanishingWitness nonvanishing_witness(const FormalQExpansion& f, const Int& ell,
                                         std::uint64_t seed) {
  if (f.is_zero()) throw std::invalid_argument("expansion is zero");
  std::vector<HalfIntegralMatrix> S = f.support();
  SymPosDefIntMatrix A = find_witness_matrix(S, ell, seed);

  const HalfIntegralMatrix* q0 = nullptr;
  Int n = 0;
  bool tie = false;
  for (const auto& Q : S) {
    Int t = Q.pair_trace(A);
    if (!q0 || t < n) {
      n = t;
      q0 = &Q;
      tie = false;
    } else if (t == n) {
      tie = true;
    }
  }
  if (tie) throw integrity_error("witness matrix failed to isolate a unique minimizer");

  Rat c0 = f.coeffs().at(*q0);
  if (c0 == 0) throw integrity_error("stored coefficient is zero");
  if (pullback(f, A).at(n) != c0)
    throw integrity_error("pullback leading coefficient does not match the minimizer");
  return {A, n, c0};
}

}  // namespace weakiso
