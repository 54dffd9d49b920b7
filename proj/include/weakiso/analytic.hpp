#pragma once

#include <complex>
#include <string>
#include <vector>

#include "weakiso/matrix.hpp"
#include "weakiso/qexp.hpp"

namespace weakiso {

using Complex = std::complex<double>;

// point of the degree-g upper half-space: a complex symmetric matrix with positive
// definite imaginary part. Construction verifies both properties with a margin.
struct SiegelPoint {
  std::vector<std::vector<Complex>> omega;

  explicit SiegelPoint(std::vector<std::vector<Complex>> om);
  std::size_t g() const { return omega.size(); }
};

// 2g x 2g integer matrix M with Mt J M = J verified in exact integer arithmetic,
// J the standard alternating form [[0, I], [-I, 0]]
struct SymplecticMatrix {
  IntMatrix m;

  explicit SymplecticMatrix(IntMatrix mat);
  std::size_t g() const { return m.rows() / 2; }
};

// integer 2x2 matrix acting on the upper half-plane by t -> (a t + b) / (c t + d)
struct FractionalLinearMap {
  Int a, b, c, d;

  Int det() const { return a * d - b * c; }
};

// outcome of one floating-point identity check. The same computation runs at two
// precisions; a genuine identity leaves both residuals at roundoff level, so the
// refined run shrinking the residual is evidence the gap is noise, not substance.
struct CheckReport {
  std::string name;
  double max_residual = 0.0;          // standard precision run
  double max_residual_refined = 0.0;  // extended precision run
  double tolerance = 0.0;
  bool pass = false;
  std::string precision;
};

// scalar tau with Im(tau) > 0 stretched to the block point tau * A
SiegelPoint tau_embed(Complex tau, const SymPosDefIntMatrix& A);

// the exact integer companion [[aI, bA], [c A^-1, dI]] of sigma; requires det 1 and
// c divisible by det A, which makes the lower left block integral
SymplecticMatrix equivariance_matrix(const FractionalLinearMap& sigma,
                                     const SymPosDefIntMatrix& A);

// checks sigma(tau) * A == M(tau A) where M acts by the fractional linear action
// (P Omega + Q)(R Omega + S)^-1; M itself is validated exactly before any floating
// point work happens
CheckReport equivariance_check(const FractionalLinearMap& sigma, Complex tau,
                               const SymPosDefIntMatrix& A, double tol = 1e-9);

// evaluates the alternating pairing of the lattice A^-1 Z^g + tau Z^g and of the
// lattice Z^g + tau A Z^g on their standard bases: values must be integers, and the
// second pairing pulled back through multiplication by A must agree with the first
CheckReport riemann_form_check(Complex tau, const SymPosDefIntMatrix& A,
                               double tol = 1e-9);

struct DensityReport {
  RatMatrix approx;
  double achieved = 0.0;
  double requested = 0.0;
  bool pass = false;
};

// drives the denominator-ell approximation until the target error is met or the
// precision ladder is exhausted; eps must be positive, perfection is not on offer
DensityReport sl_density_demo(const std::vector<std::vector<double>>& target,
                              const Int& ell, double eps);

}  // namespace weakiso
