#include "weakiso/matrix.hpp"

#include <algorithm>
#include <functional>

namespace weakiso {

IntMatrix IntMatrix::identity(std::size_t g) {
  IntMatrix r(g, g);
  for (std::size_t i = 0; i < g; ++i) r.m[i][i] = 1;
  return r;
}

IntMatrix IntMatrix::mul(const IntMatrix& o) const {
  if (cols() != o.rows()) throw std::invalid_argument("matrix size mismatch");
  IntMatrix r(rows(), o.cols());
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t k = 0; k < cols(); ++k)
      for (std::size_t j = 0; j < o.cols(); ++j) r.m[i][j] += m[i][k] * o.m[k][j];
  return r;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix r(cols(), rows());
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) r.m[j][i] = m[i][j];
  return r;
}

Int IntMatrix::det() const {
  if (rows() != cols()) throw std::invalid_argument("determinant of a non-square matrix");
  std::size_t n = rows();
  if (n == 0) return 1;
  // Bareiss: division-free up to exact divisions by the previous pivot
  IntMatrix w = *this;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (w.m[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && w.m[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(w.m[k], w.m[s]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int num = w.m[i][j] * w.m[k][k] - w.m[i][k] * w.m[k][j];
        w.m[i][j] = num / prev;
      }
    prev = w.m[k][k];
  }
  return sign > 0 ? w.m[n - 1][n - 1] : -w.m[n - 1][n - 1];
}

std::string IntMatrix::str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < rows(); ++i) {
    if (i) s += "; ";
    for (std::size_t j = 0; j < cols(); ++j) {
      if (j) s += ",";
      s += m[i][j].get_str();
    }
  }
  return s + "]";
}

RatMatrix RatMatrix::identity(std::size_t g) {
  RatMatrix r(g, g);
  for (std::size_t i = 0; i < g; ++i) r.m[i][i] = 1;
  return r;
}

RatMatrix RatMatrix::mul(const RatMatrix& o) const {
  if (cols() != o.rows()) throw std::invalid_argument("matrix size mismatch");
  RatMatrix r(rows(), o.cols());
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t k = 0; k < cols(); ++k)
      for (std::size_t j = 0; j < o.cols(); ++j) r.m[i][j] += m[i][k] * o.m[k][j];
  return r;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix r(cols(), rows());
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) r.m[j][i] = m[i][j];
  return r;
}

Rat RatMatrix::det() const {
  if (rows() != cols()) throw std::invalid_argument("determinant of a non-square matrix");
  std::size_t n = rows();
  if (n == 0) return 1;
  auto a = m;
  Rat out(1);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t p = j;
    while (p < n && a[p][j] == 0) ++p;
    if (p == n) return 0;
    if (p != j) {
      std::swap(a[p], a[j]);
      out = -out;
    }
    out *= a[j][j];
    for (std::size_t i = j + 1; i < n; ++i) {
      if (a[i][j] == 0) continue;
      Rat f = a[i][j] / a[j][j];
      for (std::size_t c = j; c < n; ++c) a[i][c] -= f * a[j][c];
    }
  }
  return out;
}

namespace {

// leading principal minors, exact; empty optional when some minor fails to be positive
bool all_leading_minors_positive(const IntMatrix& m) {
  for (std::size_t k = 1; k <= m.rows(); ++k) {
    IntMatrix sub(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub.m[i][j] = m.m[i][j];
    if (sub.det() <= 0) return false;
  }
  return true;
}

}  // namespace

SymPosDefIntMatrix::SymPosDefIntMatrix(IntMatrix m) {
  auto r = try_make(std::move(m));
  if (!r) throw std::invalid_argument("matrix is not symmetric positive definite");
  *this = *std::move(r);
}

std::optional<SymPosDefIntMatrix> SymPosDefIntMatrix::try_make(IntMatrix m) {
  if (m.rows() == 0 || m.rows() != m.cols()) return std::nullopt;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (m.m[i][j] != m.m[j][i]) return std::nullopt;
  if (!all_leading_minors_positive(m)) return std::nullopt;
  SymPosDefIntMatrix r;
  r.det_ = m.det();
  r.m_ = std::move(m);
  return r;
}

bool SymPosDefIntMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < g(); ++i)
    for (std::size_t j = 0; j < g(); ++j)
      if (i != j && m_.m[i][j] != 0) return false;
  return true;
}

std::vector<Int> SNFResult::divisors() const {
  std::vector<Int> d;
  for (std::size_t i = 0; i < D.rows(); ++i) d.push_back(D.m[i][i]);
  return d;
}

namespace {

struct SnfWork {
  IntMatrix M, U, V;  // invariant: original A = U * M * V

  void row_add(std::size_t i, std::size_t j, const Int& k) {  // row_i += k * row_j
    std::size_t n = M.cols();
    for (std::size_t c = 0; c < n; ++c) M.m[i][c] += k * M.m[j][c];
    for (std::size_t r = 0; r < n; ++r) U.m[r][j] -= k * U.m[r][i];
  }
  void col_add(std::size_t j, std::size_t i, const Int& k) {  // col_j += k * col_i
    std::size_t n = M.rows();
    for (std::size_t r = 0; r < n; ++r) M.m[r][j] += k * M.m[r][i];
    for (std::size_t c = 0; c < n; ++c) V.m[i][c] -= k * V.m[j][c];
  }
  void row_swap(std::size_t i, std::size_t j) {
    std::swap(M.m[i], M.m[j]);
    for (std::size_t r = 0; r < U.rows(); ++r) std::swap(U.m[r][i], U.m[r][j]);
  }
  void col_swap(std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < M.rows(); ++r) std::swap(M.m[r][i], M.m[r][j]);
    std::swap(V.m[i], V.m[j]);
  }
  void row_negate(std::size_t i) {
    for (auto& x : M.m[i]) x = -x;
    for (std::size_t r = 0; r < U.rows(); ++r) U.m[r][i] = -U.m[r][i];
  }

  // diagonalize the trailing block starting at t
  void pivot_sweep() {
    std::size_t n = M.rows();
    for (std::size_t t = 0; t < n; ++t) {
      for (;;) {
        // smallest nonzero entry of the trailing block, rows scanned before columns
        std::size_t pi = n, pj = n;
        for (std::size_t i = t; i < n; ++i)
          for (std::size_t j = t; j < n; ++j)
            if (M.m[i][j] != 0 && (pi == n || abs(M.m[i][j]) < abs(M.m[pi][pj]))) {
              pi = i;
              pj = j;
            }
        if (pi == n) throw integrity_error("rank-deficient matrix in normal-form reduction");
        if (pi != t) row_swap(t, pi);
        if (pj != t) col_swap(t, pj);
        if (M.m[t][t] < 0) row_negate(t);

        bool clean = true;
        for (std::size_t i = t + 1; i < n; ++i)
          if (M.m[i][t] != 0) {
            Int q = -(M.m[i][t] / M.m[t][t]);
            row_add(i, t, q);
            if (M.m[i][t] != 0) clean = false;  // remainder left; pivot will shrink
          }
        for (std::size_t j = t + 1; j < n; ++j)
          if (M.m[t][j] != 0) {
            Int q = -(M.m[t][j] / M.m[t][t]);
            col_add(j, t, q);
            if (M.m[t][j] != 0) clean = false;
          }
        if (clean) break;
      }
    }
  }
};

}  // namespace

SNFResult smith_normal_form(const SymPosDefIntMatrix& A) {
  std::size_t n = A.g();
  SnfWork w{A.entries(), IntMatrix::identity(n), IntMatrix::identity(n)};

  w.pivot_sweep();
  // enforce the divisibility chain: pull d_{i+1} into row i and rediagonalize
  for (int guard = 0;; ++guard) {
    if (guard > 10000) throw integrity_error("divisibility fix-up did not settle");
    bool changed = false;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (w.M.m[i + 1][i + 1] % w.M.m[i][i] != 0) {
        w.row_add(i, i + 1, Int(1));
        w.pivot_sweep();
        changed = true;
        break;
      }
    if (!changed) break;
  }

  SNFResult r{w.U, w.M, w.V};
  // exact self-checks: factorization, unimodularity, chain, positivity, determinant
  if (!(r.U.mul(r.D).mul(r.V) == A.entries())) throw integrity_error("normal form failed to refactor");
  if (abs(r.U.det()) != 1 || abs(r.V.det()) != 1) throw integrity_error("transform matrices not unimodular");
  Int prod = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Int& d = r.D.m[i][i];
    if (d <= 0) throw integrity_error("nonpositive elementary divisor");
    if (i + 1 < n && r.D.m[i + 1][i + 1] % d != 0) throw integrity_error("divisibility chain violated");
    prod *= d;
  }
  if (prod != A.det()) throw integrity_error("elementary divisors do not multiply to the determinant");
  return r;
}

Int kernel_order(const SymPosDefIntMatrix& A, const Int& N) {
  if (A.det() != N) throw std::invalid_argument("kernel order is defined at N = det A");
  Int count = 1;
  for (const Int& d : smith_normal_form(A).divisors()) count *= gcd_int(d, N);
  if (count != A.det()) throw integrity_error("quotient polarization is not principal");
  return count;
}

std::vector<SymPosDefIntMatrix> enumerate_detl(long g, const Int& ell, long max_power) {
  if (g < 1) throw std::invalid_argument("dimension must be positive");
  if (max_power < 0) throw std::invalid_argument("power bound must be nonnegative");
  if (!is_prime(ell)) throw std::invalid_argument("modulus must be prime");

  const Int bound = int_pow(ell, static_cast<unsigned long>(max_power));
  auto det_is_small_ell_power = [&](Int d) {
    if (d < 1) return false;
    long k = 0;
    while (mod_floor(d, ell) == 0) {
      d /= ell;
      ++k;
    }
    return d == 1 && k <= max_power;
  };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < static_cast<std::size_t>(g); ++i)
    for (std::size_t j = i + 1; j < static_cast<std::size_t>(g); ++j) pairs.emplace_back(i, j);

  std::vector<SymPosDefIntMatrix> out;
  IntMatrix cand(g, g);

  std::function<void(std::size_t)> fill_offdiag = [&](std::size_t k) {
    if (k == pairs.size()) {
      auto spd = SymPosDefIntMatrix::try_make(cand);
      if (spd && det_is_small_ell_power(spd->det())) out.push_back(std::move(*spd));
      return;
    }
    auto [i, j] = pairs[k];
    // positive definiteness already forces A_ij^2 < A_ii * A_jj
    Int m = isqrt(cand.m[i][i] * cand.m[j][j] - 1);
    for (Int v = -m; v <= m; ++v) {
      cand.m[i][j] = v;
      cand.m[j][i] = v;
      fill_offdiag(k + 1);
    }
  };

  std::function<void(std::size_t)> fill_diag = [&](std::size_t i) {
    if (i == static_cast<std::size_t>(g)) {
      fill_offdiag(0);
      return;
    }
    for (Int v = 1; v <= bound; ++v) {
      cand.m[i][i] = v;
      fill_diag(i + 1);
    }
  };

  fill_diag(0);
  return out;
}

}  // namespace weakiso
