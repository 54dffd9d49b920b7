#include "weakiso/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "weakiso/util.hpp"

namespace weakiso {

namespace {

constexpr double kEntryBound = 1000.0;

template <typename R>
using CMat = std::vector<std::vector<std::complex<R>>>;

template <typename R>
CMat<R> czero(std::size_t r, std::size_t c) {
  return CMat<R>(r, std::vector<std::complex<R>>(c, std::complex<R>(0, 0)));
}

template <typename R>
CMat<R> cmul(const CMat<R>& a, const CMat<R>& b) {
  CMat<R> out = czero<R>(a.size(), b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

template <typename R>
CMat<R> cinv(CMat<R> a) {
  std::size_t g = a.size();
  CMat<R> inv = czero<R>(g, g);
  for (std::size_t i = 0; i < g; ++i) inv[i][i] = std::complex<R>(1, 0);
  for (std::size_t col = 0; col < g; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < g; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) == R(0)) throw integrity_error("singular matrix in half-space action");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    std::complex<R> p = a[col][col];
    for (std::size_t j = 0; j < g; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < g; ++r) {
      if (r == col) continue;
      std::complex<R> f = a[r][col];
      if (f == std::complex<R>(0, 0)) continue;
      for (std::size_t j = 0; j < g; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// transpose of the cofactor matrix; A * adjugate(A) = det(A) * I exactly
IntMatrix adjugate(const IntMatrix& a) {
  std::size_t g = a.rows();
  IntMatrix adj(g, g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      IntMatrix minor(g - 1, g - 1);
      for (std::size_t r = 0, rr = 0; r < g; ++r) {
        if (r == i) continue;
        for (std::size_t c = 0, cc = 0; c < g; ++c) {
          if (c == j) continue;
          minor.at(rr, cc) = a.at(r, c);
          ++cc;
        }
        ++rr;
      }
      Int sign = (i + j) % 2 == 0 ? 1 : -1;
      adj.at(j, i) = g == 1 ? sign : sign * minor.det();
    }
  return adj;
}

void require_bounded(const SymPosDefIntMatrix& A) {
  for (std::size_t i = 0; i < A.g(); ++i)
    for (std::size_t j = 0; j < A.g(); ++j)
      if (abs(A.at(i, j)) > 1000)
        throw std::invalid_argument("matrix entries exceed the conditioning bound");
}

void require_check_range(Complex tau) {
  if (!(tau.imag() >= 0.5) || tau.imag() > kEntryBound || std::abs(tau.real()) > kEntryBound)
    throw std::invalid_argument("tau outside the supported window of the half-plane");
}

template <typename R>
R equivariance_residual(const FractionalLinearMap& sigma, Complex tau,
                        const SymPosDefIntMatrix& A, const IntMatrix& M) {
  std::size_t g = A.g();
  std::complex<R> t(static_cast<R>(tau.real()), static_cast<R>(tau.imag()));

  CMat<R> omega = czero<R>(g, g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) omega[i][j] = t * static_cast<R>(A.at(i, j).get_d());

  CMat<R> num = czero<R>(g, g), den = czero<R>(g, g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      std::complex<R> pq(static_cast<R>(M.at(i, j + g).get_d()), 0);
      std::complex<R> rs(static_cast<R>(M.at(i + g, j + g).get_d()), 0);
      for (std::size_t k = 0; k < g; ++k) {
        pq += static_cast<R>(M.at(i, k).get_d()) * omega[k][j];
        rs += static_cast<R>(M.at(i + g, k).get_d()) * omega[k][j];
      }
      num[i][j] = pq;
      den[i][j] = rs;
    }
  CMat<R> acted = cmul(num, cinv(den));

  std::complex<R> s = (static_cast<R>(sigma.a.get_d()) * t + static_cast<R>(sigma.b.get_d())) /
                      (static_cast<R>(sigma.c.get_d()) * t + static_cast<R>(sigma.d.get_d()));
  R worst(0);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      R e = std::abs(acted[i][j] - s * static_cast<R>(A.at(i, j).get_d()));
      worst = std::max(worst, e);
    }
  return worst;
}

// alternating pairing determined by splitting z = x + tau * (B y) along the real
// subspaces R^g and tau * B R^g, then pairing x against y through the matrix P:
// value = x' P y2 - y1' P x2
template <typename R>
struct SplitForm {
  // columns of B^-1 as exact rationals, converted on entry
  std::vector<std::vector<R>> binv;
  std::vector<std::vector<R>> pairing;
  R tre, tim;

  std::pair<std::vector<R>, std::vector<R>> split(const std::vector<std::complex<R>>& z) const {
    std::size_t g = z.size();
    std::vector<R> im(g), x(g), y(g);
    for (std::size_t i = 0; i < g; ++i) {
      im[i] = z[i].imag() / tim;
      x[i] = z[i].real() - tre * im[i];
    }
    for (std::size_t i = 0; i < g; ++i) {
      y[i] = 0;
      for (std::size_t j = 0; j < g; ++j) y[i] += binv[i][j] * im[j];
    }
    return {x, y};
  }

  R value(const std::vector<std::complex<R>>& z1, const std::vector<std::complex<R>>& z2) const {
    auto [x1, y1] = split(z1);
    auto [x2, y2] = split(z2);
    R acc(0);
    for (std::size_t i = 0; i < z1.size(); ++i)
      for (std::size_t j = 0; j < z1.size(); ++j)
        acc += pairing[i][j] * (x1[i] * y2[j] - y1[i] * x2[j]);
    return acc;
  }
};

template <typename R>
R rat_to(const Rat& v) {
  return static_cast<R>(v.get_num().get_d()) / static_cast<R>(v.get_den().get_d());
}

template <typename R>
R riemann_residual(Complex tau, const SymPosDefIntMatrix& A, const IntMatrix& adj) {
  std::size_t g = A.g();
  R tre = static_cast<R>(tau.real()), tim = static_cast<R>(tau.imag());
  Rat detA = Rat(A.det());

  std::vector<std::vector<R>> a_r(g, std::vector<R>(g)), ainv_r(g, std::vector<R>(g)),
      id_r(g, std::vector<R>(g, R(0)));
  for (std::size_t i = 0; i < g; ++i) {
    id_r[i][i] = 1;
    for (std::size_t j = 0; j < g; ++j) {
      a_r[i][j] = static_cast<R>(A.at(i, j).get_d());
      ainv_r[i][j] = rat_to<R>(Rat(adj.at(i, j)) / detA);
    }
  }

  // first lattice: A^-1 Z^g + tau Z^g, paired through A; B = I so y is read directly
  SplitForm<R> ea{id_r, a_r, tre, tim};
  // second lattice: Z^g + tau A Z^g, paired through the identity; B = A
  SplitForm<R> et{ainv_r, id_r, tre, tim};

  auto basis = [&](const std::vector<std::vector<R>>& real_cols, bool tau_block,
                   std::size_t k) {
    std::vector<std::complex<R>> z(g);
    for (std::size_t i = 0; i < g; ++i)
      z[i] = tau_block ? std::complex<R>(tre, tim) * real_cols[i][k]
                       : std::complex<R>(real_cols[i][k], 0);
    return z;
  };

  R worst(0);
  auto integrality = [&](const SplitForm<R>& form, const std::vector<std::vector<R>>& real_cols,
                         const std::vector<std::vector<R>>& tau_cols) {
    for (std::size_t k = 0; k < 2 * g; ++k)
      for (std::size_t l = 0; l < 2 * g; ++l) {
        auto z1 = k < g ? basis(real_cols, false, k) : basis(tau_cols, true, k - g);
        auto z2 = l < g ? basis(real_cols, false, l) : basis(tau_cols, true, l - g);
        R v = form.value(z1, z2);
        worst = std::max(worst, std::abs(v - std::round(v)));
      }
  };
  integrality(ea, ainv_r, id_r);
  integrality(et, id_r, a_r);

  // transport: pairing of e_i against tau A e_j in the second lattice equals the
  // pairing of A^-1 e_i against tau e_j in the first
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      R lhs = et.value(basis(id_r, false, i), basis(a_r, true, j));
      R rhs = ea.value(basis(ainv_r, false, i), basis(id_r, true, j));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

}  // namespace

SiegelPoint::SiegelPoint(std::vector<std::vector<Complex>> om) : omega(std::move(om)) {
  std::size_t g = omega.size();
  if (g == 0) throw std::invalid_argument("empty matrix");
  double scale = 0.0;
  for (const auto& row : omega) {
    if (row.size() != g) throw std::invalid_argument("matrix is not square");
    for (const Complex& v : row) scale = std::max({scale, std::abs(v.real()), std::abs(v.imag())});
  }
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i + 1; j < g; ++j)
      if (std::abs(omega[i][j] - omega[j][i]) > 1e-12 * (1.0 + scale))
        throw std::invalid_argument("matrix is not symmetric");

  // Cholesky of the imaginary part; a nonpositive pivot means it is not a half-space point
  std::vector<std::vector<double>> im(g, std::vector<double>(g));
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) im[i][j] = omega[i][j].imag();
  for (std::size_t col = 0; col < g; ++col) {
    double piv = im[col][col];
    if (piv <= 1e-10 * (1.0 + scale))
      throw std::invalid_argument("imaginary part is not positive definite");
    for (std::size_t r = col + 1; r < g; ++r) {
      double f = im[r][col] / piv;
      for (std::size_t c = col; c < g; ++c) im[r][c] -= f * im[col][c];
    }
  }
}

SymplecticMatrix::SymplecticMatrix(IntMatrix mat) : m(std::move(mat)) {
  if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0)
    throw std::invalid_argument("matrix shape is not 2g x 2g");
  std::size_t g = m.rows() / 2;
  IntMatrix j(2 * g, 2 * g);
  for (std::size_t i = 0; i < g; ++i) {
    j.at(i, g + i) = 1;
    j.at(g + i, i) = -1;
  }
  if (!(m.transpose().mul(j).mul(m) == j))
    throw std::invalid_argument("matrix does not preserve the alternating form");
}

SiegelPoint tau_embed(Complex tau, const SymPosDefIntMatrix& A) {
  if (!(tau.imag() > 0.0)) throw std::invalid_argument("tau must lie in the upper half-plane");
  std::size_t g = A.g();
  std::vector<std::vector<Complex>> om(g, std::vector<Complex>(g));
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) om[i][j] = tau * A.at(i, j).get_d();
  return SiegelPoint(std::move(om));
}

SymplecticMatrix equivariance_matrix(const FractionalLinearMap& sigma,
                                     const SymPosDefIntMatrix& A) {
  if (sigma.det() != 1) throw std::invalid_argument("map must have determinant 1");
  for (const Int* v : {&sigma.a, &sigma.b, &sigma.c, &sigma.d})
    if (abs(*v) > 1000) throw std::invalid_argument("map entries exceed the conditioning bound");
  require_bounded(A);
  Int N = A.det();
  if (mod_floor(sigma.c, N) != 0)
    throw std::invalid_argument("lower left entry must be divisible by the determinant");

  std::size_t g = A.g();
  IntMatrix adj = adjugate(A.entries());
  IntMatrix m(2 * g, 2 * g);
  for (std::size_t i = 0; i < g; ++i) {
    m.at(i, i) = sigma.a;
    m.at(g + i, g + i) = sigma.d;
    for (std::size_t j = 0; j < g; ++j) {
      m.at(i, g + j) = sigma.b * A.at(i, j);
      Int scaled = sigma.c * adj.at(i, j);
      if (mod_floor(scaled, N) != 0) throw integrity_error("inverse block failed to clear");
      m.at(g + i, j) = scaled / N;
    }
  }
  return SymplecticMatrix(std::move(m));
}

CheckReport equivariance_check(const FractionalLinearMap& sigma, Complex tau,
                               const SymPosDefIntMatrix& A, double tol) {
  require_check_range(tau);
  SymplecticMatrix M = equivariance_matrix(sigma, A);

  CheckReport r;
  r.name = "equivariance";
  r.tolerance = tol;
  r.precision = "double, long double";
  r.max_residual = equivariance_residual<double>(sigma, tau, A, M.m);
  r.max_residual_refined =
      static_cast<double>(equivariance_residual<long double>(sigma, tau, A, M.m));
  r.pass = r.max_residual < tol && r.max_residual_refined < tol;
  return r;
}

CheckReport riemann_form_check(Complex tau, const SymPosDefIntMatrix& A, double tol) {
  require_check_range(tau);
  require_bounded(A);
  IntMatrix adj = adjugate(A.entries());

  CheckReport r;
  r.name = "riemann-form";
  r.tolerance = tol;
  r.precision = "double, long double";
  r.max_residual = riemann_residual<double>(tau, A, adj);
  r.max_residual_refined = static_cast<double>(riemann_residual<long double>(tau, A, adj));
  r.pass = r.max_residual < tol && r.max_residual_refined < tol;
  return r;
}

DensityReport sl_density_demo(const std::vector<std::vector<double>>& target, const Int& ell,
                              double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("requested error must be positive");

  DensityReport best;
  best.requested = eps;
  for (long k : {4L, 8L, 16L, 24L, 32L, 48L, 64L}) {
    RatMatrix G = approx_in_sl(target, ell, k);
    double err = 0.0;
    for (std::size_t i = 0; i < G.rows(); ++i)
      for (std::size_t j = 0; j < G.cols(); ++j)
        err = std::max(err, std::abs(G.at(i, j).get_d() - target[i][j]));
    if (best.approx.rows() == 0 || err < best.achieved) {
      best.approx = G;
      best.achieved = err;
    }
    if (best.achieved < eps) {
      best.pass = true;
      return best;
    }
  }
  return best;
}

}  // namespace weakiso
