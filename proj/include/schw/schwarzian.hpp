#pragma once

#include <span>

#include "schw/connection.hpp"
#include "schw/diffeo.hpp"

namespace schw {

/// Projectively equivariant Schwarzian derivative S(f) = f*(T) - T with
/// respect to the given projective connection (n >= 2), computed through
/// the well-defined difference of operator symbols.
S2OperatorValue schwarzian(const Diffeo& f, const Connection& pi, std::span<const double> x);

/// Flat-structure closed form built from the jets of ell(f):
/// ell^k_ij d_k - 2/(n-1) d_k(ell^k_ij) + (n+1)/(n-1) ell^k_im ell^m_kj.
S2OperatorValue schwarzian_flat(const Diffeo& f, std::span<const double> x);

/// Coordinate form (valid for n >= 1): principal part ell(f); scalar part
/// d3f^k_ijl dx^l/df^k - (n+3)/(n+1) J^-1 d2J_ij + (n+2)/(n+1) J^-2 dJ_i dJ_j.
S2OperatorValue schwarzian_coord(const Diffeo& f, std::span<const double> x);

/// Classical 1-d Schwarzian f'''/f' - 3/2 (f''/f')^2.
double classical_schwarzian(const Diffeo& f, double x);

/// Max-norm residual over (i,j) of the contraction identity
///   d3f^k_ijl dx^l/df^k - d2f^k_im d2f^l_js dx^m/df^l dx^s/df^k
///     = J^-1 d2J_ij - J^-2 dJ_i dJ_j
/// (the second derivative of log J); expected ~ 0 for any local diffeo.
double verify_jacobian_identity(const Diffeo& f, std::span<const double> x);

}  // namespace schw
