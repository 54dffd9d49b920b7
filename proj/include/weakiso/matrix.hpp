#pragma once

#include <optional>
#include <vector>

#include "weakiso/util.hpp"

namespace weakiso {

// dense integer matrix, sized for small g; exact arithmetic throughout
struct IntMatrix {
  std::vector<std::vector<Int>> m;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : m(r, std::vector<Int>(c, Int(0))) {}
  static IntMatrix identity(std::size_t g);

  std::size_t rows() const { return m.size(); }
  std::size_t cols() const { return m.empty() ? 0 : m[0].size(); }
  Int& at(std::size_t i, std::size_t j) { return m[i][j]; }
  const Int& at(std::size_t i, std::size_t j) const { return m[i][j]; }

  IntMatrix mul(const IntMatrix& o) const;
  IntMatrix transpose() const;
  Int det() const;  // fraction-free elimination, exact

  bool operator==(const IntMatrix& o) const { return m == o.m; }
  std::string str() const;
};

// dense rational matrix for the exact verification layers that live over Q
struct RatMatrix {
  std::vector<std::vector<Rat>> m;

  RatMatrix() = default;
  RatMatrix(std::size_t r, std::size_t c) : m(r, std::vector<Rat>(c, Rat(0))) {}
  static RatMatrix identity(std::size_t g);

  std::size_t rows() const { return m.size(); }
  std::size_t cols() const { return m.empty() ? 0 : m[0].size(); }
  Rat& at(std::size_t i, std::size_t j) { return m[i][j]; }
  const Rat& at(std::size_t i, std::size_t j) const { return m[i][j]; }

  RatMatrix mul(const RatMatrix& o) const;
  RatMatrix transpose() const;
  Rat det() const;  // Gaussian elimination over the field, exact

  bool operator==(const RatMatrix& o) const { return m == o.m; }
};

// symmetric positive definite integer matrix (all leading principal minors > 0, checked exactly)
class SymPosDefIntMatrix {
 public:
  explicit SymPosDefIntMatrix(IntMatrix m);
  static std::optional<SymPosDefIntMatrix> try_make(IntMatrix m);

  std::size_t g() const { return m_.rows(); }
  const Int& at(std::size_t i, std::size_t j) const { return m_.at(i, j); }
  const IntMatrix& entries() const { return m_; }
  const Int& det() const { return det_; }
  bool is_diagonal() const;

  bool operator==(const SymPosDefIntMatrix& o) const { return m_ == o.m_; }
  std::string str() const { return m_.str(); }

 private:
  SymPosDefIntMatrix() = default;
  IntMatrix m_;
  Int det_;
};

// A = U * D * V with U, V unimodular and D = diag(d_1 | d_2 | ... | d_g), d_i > 0
struct SNFResult {
  IntMatrix U, D, V;
  std::vector<Int> divisors() const;
};

SNFResult smith_normal_form(const SymPosDefIntMatrix& A);

// #{v in (Z/N)^g : A v = 0 mod N} for N = det A; always equals det A (checked), which
// certifies that the polarization induced on the quotient is principal
Int kernel_order(const SymPosDefIntMatrix& A, const Int& N);

// all symmetric positive definite matrices with entries bounded by ell^max_power whose
// determinant is a power of ell at most ell^max_power; deterministic scan order
std::vector<SymPosDefIntMatrix> enumerate_detl(long g, const Int& ell, long max_power);

}  // namespace weakiso
