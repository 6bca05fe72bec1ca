// Projected descent on the truncated functional with continuation in the
// smoothing width.  The loop is diagonally preconditioned spectral-step
// descent with backtracking, interleaved with frozen-coefficient linear
// correction solves used as line-searched directions.
#pragma once

#include <cstdint>
#include <vector>

#include "axijet/analytic.hpp"
#include "axijet/energy.hpp"
#include "axijet/flow.hpp"
#include "axijet/geometry.hpp"

namespace axijet {

struct SolveOptions {
  std::vector<double> eps_schedule;  // empty = min(m1, -m2) * {1/4 .. 1/100}
  double tol_energy = 1e-12;  // relative energy decrease floor
  double tol_step = 1e-7;     // max node update, in units of max(m1, -m2)
  int max_iters = 30000;      // per continuation stage
  int anchor_every = 60;      // far-field anchor refresh cadence
  int polish_every = 40;      // linear correction cadence
  bool use_trial_seed = true; // false: caller must pass a seed
  Quadrature quad = Quadrature::trapezoid;
};

struct Solution {
  std::vector<double> psi;
  std::vector<Phase> phase;
  JetParams params;
  double eps_smooth = 0.0;  // width of the final stage
  double energy = 0.0;
  int iterations = 0;       // accepted steps, all stages
  bool converged = false;
  double step_norm = 0.0;
  double anchor_x = 0.0;    // interface position used by the top boundary row
  std::vector<double> energy_trace;  // accepted energies of the final stage
};

// Dirichlet data of the truncated problem.  anchor_x centers the top-row
// far-field profile for oblique jets; it is ignored when theta is 0 or pi.
void boundary_values(const Grid& g, const FlowSpec& flow, const JetParams& jet,
                     double anchor_x, std::vector<double>& bc,
                     std::vector<uint8_t>& fixed);

// Clamp into the barrier band and re-impose the Dirichlet data.
void project_admissible(const Grid& g, const Barriers& b,
                        const std::vector<double>& bc,
                        const std::vector<uint8_t>& fixed,
                        std::vector<double>& psi);

// Explicit-data core used by minimize and by the box-harness tests.
struct FieldProblem {
  const Grid* grid = nullptr;
  const CellRows* cells = nullptr;
  EnergyParams params;
  const std::vector<double>* bc = nullptr;
  const std::vector<uint8_t>* fixed = nullptr;
  const std::vector<double>* lo = nullptr;
  const std::vector<double>* hi = nullptr;
};

struct DescentStats {
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  double step_norm = 0.0;
  std::vector<double> trace;
};

DescentStats minimize_field(const FieldProblem& fp, const SolveOptions& opts,
                            std::vector<double>& psi);

Solution minimize(const Grid& g, const FlowSpec& flow, const JetParams& jet,
                  const SolveOptions& opts, const Barriers* barriers = nullptr,
                  const std::vector<double>* seed = nullptr);

// Resample a field between grids over the same domain: fluid-weighted
// bilinear interpolation, exact injection where nodes coincide, and the
// fallback field where no fluid source node carries weight.
std::vector<double> transfer_field(const Grid& from, const std::vector<double>& v,
                                   const Grid& to,
                                   const std::vector<double>& fallback);

// Coarse-to-fine solve.  The coarsest level is solved twice: first from the
// caller's seed (or the trial field), then from an analytic profile
// re-anchored at the measured far-field crossing rounded to the coarse
// spacing.  The restart forgets everything about the starting guess except
// that one rounded scalar, so any admissible seed reaches the identical
// field; refinement below is plain interpolate-and-minimize.
Solution solve_cascade(const TruncatedDomain& dom, double h, const FlowSpec& flow,
                       const JetParams& jet, const SolveOptions& opts,
                       const std::vector<double>* seed = nullptr);

// Five-point residual of Delta psi - (1/r) d_r psi on nodes farther than
// exclusion_radius grid steps from any phase change; per-fluid maxima, and
// the most negative value below the lid where the operator is one-signed.
struct ResidualStats {
  double max_fluid1 = 0.0;
  double max_fluid2 = 0.0;
  double mean_abs = 0.0;
  double min_signed_sublid = 0.0;
  int64_t nodes = 0;
};

ResidualStats pde_residual(const Grid& g, const std::vector<double>& psi,
                           const EnergyParams& p, int exclusion_radius = 3);

}  // namespace axijet
