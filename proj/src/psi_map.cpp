#include "weakiso/psi_map.hpp"

#include <algorithm>

namespace weakiso {

namespace {

std::vector<Int> prime_factors(Int n) {
  std::vector<Int> out;
  for (Int p(2); p * p <= n; p += (p == 2 ? 1 : 2))
    if (mod_floor(n, p) == 0) {
      out.push_back(p);
      while (mod_floor(n, p) == 0) n /= p;
    }
  if (n > 1) out.push_back(n);
  return out;
}

// the map is defined on points of the modular curve of level det A: C must be cyclic of
// exactly that order, which for the witness lattice w > a means w contains no (1/p)a
void validate_point(const CMCurve& E, const MarkedSubgroup& C, const SymPosDefIntMatrix& A) {
  if (!(C.parent == E)) throw std::invalid_argument("subgroup of a different curve");
  if (A.det() != C.modulus)
    throw std::invalid_argument("matrix determinant does not match the subgroup order");
  for (const Int& p : prime_factors(C.modulus))
    if (C.witness.contains_lattice(E.lattice.scale_rat(Rat(1) / Rat(p))))
      throw std::invalid_argument("subgroup is not cyclic");
}

CMCurve factor_curve(const CMCurve& E, const MarkedSubgroup& C, const Int& d) {
  return quotient(E, scale_subgroup(C, C.modulus / d));
}

}  // namespace

ProductVariety psi_general(const CMCurve& E, const MarkedSubgroup& C, const SymPosDefIntMatrix& A) {
  validate_point(E, C, A);
  kernel_order(A, A.det());  // certifies the polarization induced on the image is principal
  std::vector<CMCurve> factors;
  for (const Int& d : smith_normal_form(A).divisors()) factors.push_back(factor_curve(E, C, d));
  return ProductVariety(std::move(factors));
}

ProductVariety psi_diag(const CMCurve& E, const MarkedSubgroup& C, const SymPosDefIntMatrix& A) {
  if (!A.is_diagonal()) throw std::invalid_argument("matrix is not diagonal");
  std::vector<Int> sorted;
  for (std::size_t i = 0; i < A.g(); ++i) sorted.push_back(A.at(i, i));
  std::sort(sorted.begin(), sorted.end());
  // the diagonal entries must be the elementary divisors up to order, otherwise the
  // factor-by-factor reading below would disagree with the product structure of the image
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (mod_floor(sorted[i + 1], sorted[i]) != 0)
      throw std::invalid_argument("diagonal entries do not form a divisibility chain");
  validate_point(E, C, A);
  kernel_order(A, A.det());
  std::vector<CMCurve> factors;
  for (std::size_t i = 0; i < A.g(); ++i) factors.push_back(factor_curve(E, C, A.at(i, i)));
  return ProductVariety(std::move(factors));
}

}  // namespace weakiso
