#pragma once

#include "segreg/field.hpp"

#include <vector>

namespace segreg {

// Solves -lap u = f on the DOF set (5/3-point stencil), keeping u fixed at
// every non-DOF node. `f` may be null for the harmonic problem. Conjugate
// gradients; stops when the sup norm of the residual (-lap u - f) over the
// DOFs drops below tol_inf. Returns the iteration count.
int solve_poisson(ScalarField& u, const std::vector<std::uint8_t>& dof,
                  const ScalarField* f, double tol_inf, int max_iter, int threads = 1);

// Smallest Dirichlet eigenvalue of -lap on the DOF set by inverse power
// iteration (CG inner solves). `u` is the start vector and receives the
// normalized eigenfunction (h^dim l2 norm 1). Returns the Rayleigh quotient.
double inverse_power_smallest(ScalarField& u, const std::vector<std::uint8_t>& dof,
                              double tol, int max_outer, int threads = 1);

} // namespace segreg
