#pragma once

#include "weakiso/matrix.hpp"
#include "weakiso/products.hpp"

namespace weakiso {

// image of a point (E, C) of the modular curve of level N = det A under the product map
// attached to A: the weak-isomorphism class E_1 x ... x E_g with E_i = E / ((N/d_i) C),
// d_1 | ... | d_g the elementary divisors of A.  The principal polarization carried by the
// image is never constructed; its existence is certified arithmetically via kernel_order.
// C must be cyclic of order det A.
ProductVariety psi_general(const CMCurve& E, const MarkedSubgroup& C, const SymPosDefIntMatrix& A);

// same map restricted to diagonal A with positive entries; factors keep the diagonal's
// order instead of being sorted by divisibility
ProductVariety psi_diag(const CMCurve& E, const MarkedSubgroup& C, const SymPosDefIntMatrix& A);

}  // namespace weakiso
