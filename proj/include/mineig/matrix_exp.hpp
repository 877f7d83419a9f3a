#pragma once

#include "mineig/sym_matrix.hpp"

namespace mineig {

/// Matrix exponential of a general (not necessarily symmetric) square matrix
/// by scaling-and-squaring with Pade approximants. For symmetric input it
/// agrees with the spectral exponential to ~1e-13 relative. Throws
/// std::invalid_argument on non-finite input and std::overflow_error when the
/// result leaves the representable range.
Matrix general_exp(const Matrix& m);

/// Largest singular value of a general square matrix.
double singular_norm(const Matrix& m);

}  // namespace mineig
