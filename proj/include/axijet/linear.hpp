// Jacobi-preconditioned conjugate gradients for the cell stiffness operator
// A = sum_cells stiffness / r_c restricted to a free-node subset, with
// Dirichlet values baked into the excluded entries of psi.
#pragma once

#include <cstdint>
#include <vector>

#include "axijet/energy.hpp"
#include "axijet/geometry.hpp"

namespace axijet {

struct PcgResult {
  int iterations = 0;
  double residual = 0.0;  // final l2 residual over free nodes
  bool converged = false;
};

// Solves A psi = rhs on nodes with free_mask != 0 (rhs may be null for a
// zero right-hand side).  psi holds the initial guess and the boundary data.
PcgResult pcg_stiffness(const Grid& g, const CellRows& cr,
                        const std::vector<uint8_t>& free_mask,
                        const double* rhs, std::vector<double>& psi,
                        double rel_tol, int max_iter);

}  // namespace axijet
