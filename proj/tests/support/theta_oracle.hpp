#pragma once

#include <optional>

#include "phdelay/linalg.hpp"

namespace phdelay::testing {

/// Grid search for a symmetric Theta with Theta >= 0 and
/// [[R - Theta, Z/2], [Z^T/2, Theta]] >= 0, for 2x2 R and Z. Diagonal entries
/// run over [0, 2||R||], the off-diagonal entry over [-2||R||, 2||R||], all
/// with spacing 0.02 ||R||. Returns the first hit.
std::optional<Matrix> brute_force_theta(const Matrix& r, const Matrix& z,
                                        const Tolerance& tol = {});

}  // namespace phdelay::testing
