#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weakiso {

// all integer arithmetic is arbitrary precision; fixed-width overflow is never relied on
using Int = mpz_class;
using Rat = mpq_class;

// a bounded search ran out of candidates; callers map this to exit code 2
class search_error : public std::runtime_error {
 public:
  explicit search_error(const std::string& msg) : std::runtime_error(msg) {}
};

// internal cross-check failed or certified data is inconsistent; exit code 3
class integrity_error : public std::runtime_error {
 public:
  explicit integrity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// input is outside the regime the implementation can decide; never guessed around
class unsupported_case : public std::runtime_error {
 public:
  explicit unsupported_case(const std::string& msg) : std::runtime_error(msg) {}
};

// the base field has extra units, which breaks the subgroup/quotient correspondence
class units_error : public std::invalid_argument {
 public:
  explicit units_error(const std::string& msg) : std::invalid_argument(msg) {}
};

inline Int gcd_int(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int lcm_int(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// (g, u, v) with g = gcd(a, b) = u*a + v*b
struct Xgcd {
  Int g, u, v;
};

inline Xgcd xgcd(const Int& a, const Int& b) {
  Xgcd r;
  mpz_gcdext(r.g.get_mpz_t(), r.u.get_mpz_t(), r.v.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int int_pow(const Int& b, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

// floor square root of a nonnegative integer
inline Int isqrt(const Int& n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative number");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline bool is_square(const Int& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

inline bool is_prime(const Int& n) {
  // 40 Miller-Rabin rounds: deterministic in practice at the scales used here
  return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

inline Int next_prime(const Int& n) {
  Int r;
  mpz_nextprime(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

// a mod m normalized into [0, m)
inline Int mod_floor(const Int& a, const Int& m) {
  if (m <= 0) throw std::invalid_argument("modulus must be positive");
  Int r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline Int invmod(const Int& a, const Int& m) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::invalid_argument("element not invertible modulo " + m.get_str());
  return r;
}

inline Int powmod(const Int& b, const Int& e, const Int& m) {
  Int r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

// x with x = a1 mod m1, x = a2 mod m2; moduli need not be coprime but must be compatible
inline Int crt(const Int& a1, const Int& m1, const Int& a2, const Int& m2) {
  Xgcd e = xgcd(m1, m2);
  Int diff = a2 - a1;
  if (diff % e.g != 0) throw std::invalid_argument("incompatible congruences");
  Int l = m1 / e.g * m2;
  Int x = a1 + m1 * (e.u * (diff / e.g));
  return mod_floor(x, l);
}

inline Int int_from_string(const std::string& s) {
  try {
    return Int(s);
  } catch (const std::invalid_argument&) {
    throw integrity_error("malformed integer literal: " + s);
  }
}

// v_p(n) for n != 0
inline unsigned long valuation(Int n, const Int& p) {
  if (n == 0) throw std::invalid_argument("valuation of zero");
  unsigned long v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

long to_long(const Int& n);

// splitmix64-seeded xorshift-free generator; fully specified so runs are reproducible
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    // splitmix64 step
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform-enough draw in [0, n), deterministic across platforms
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("empty range");
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // draw in [lo, hi] inclusive
  long range(long lo, long hi) {
    if (lo > hi) throw std::invalid_argument("empty range");
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // derive an independent stream for a named purpose
  Rng fork(std::uint64_t tag) const { return Rng(state_ ^ (tag * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL)); }

 private:
  std::uint64_t state_;
};

// run fn(i) for i in [0, n); with jobs > 1, work is chunked over threads.
// results must be written into preallocated slots so output is independent of scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// FIPS 180-4 SHA-256, hex digest of a byte string
std::string sha256_hex(const std::string& data);

}  // namespace weakiso
