// Discrete functional
//   J(psi) = sum_cells  int_cell r | grad psi / r - Q(psi) e |^2 dx dr
// with e = (-sin theta, cos theta) and the smoothed phase weight
//   Q(psi) = sqrt(Lambda+lambda) S(psi) S(m1-psi) + sqrt(lambda) S(-psi) S(psi-m2).
// Cells are h x h quads of fluid nodes and r is frozen at the cell center.
// The quadrature switch picks how the nonquadratic terms are sampled.
// midpoint: gradient term integrated exactly for the bilinear interpolant,
// one Q at the cell-average psi.  trapezoid: corner-sampled gradient term
// and Q^2, and the cross term written through the primitive G of Q, whose
// row sums telescope to boundary data.  Under the trapezoid rule a monotone
// rearrangement of any row leaves the Q terms unchanged and can only lower
// the gradient term, so minimizers inherit monotonicity in x; the midpoint
// rule lacks this and lets sub-cell oscillation hide inside the rolloff band
// of Q.  That is why trapezoid is the solver default.  All derivatives below
// are exact for the chosen rule, so the assembled gradient matches finite
// differences of J.
#pragma once

#include <cstdint>
#include <vector>

#include "axijet/flow.hpp"
#include "axijet/geometry.hpp"

namespace axijet {

enum class Quadrature : uint8_t { midpoint, trapezoid };

struct EnergyParams {
  double m1 = 1.0;
  double m2 = -1.0;
  double speed1 = 1.0;  // sqrt(Lambda + lambda), left fluid
  double speed2 = 1.0;  // sqrt(lambda), right fluid
  double ex = 0.0;      // -sin theta
  double er = 1.0;      // cos theta
  double eps = 0.02;    // smoothing width of the step S
  Quadrature quad = Quadrature::trapezoid;

  EnergyParams() = default;
  EnergyParams(const FlowSpec& flow, const JetParams& jp, double eps_smooth,
               Quadrature q = Quadrature::trapezoid);
};

// Smoothed unit step of width eps: 0 for t <= 0, 1 for t >= eps, C1 cubic
// in between.
double smooth_step(double t, double eps);
double smooth_step_deriv(double t, double eps);

struct Indicator {
  double Q = 0.0;
  double dQ = 0.0;
};
Indicator indicator_weight(double psi, const EnergyParams& p);

// Q alone, with the plateau and dead ranges short-circuited; agrees with
// indicator_weight(psi, p).Q to the bit
double indicator_Q(double psi, const EnergyParams& p);

// Primitive G(psi) = int_0^psi Q(s) ds, closed form per rolloff piece.  The
// trapezoid-mode cross term is written through G so that summing it along a
// grid row telescopes to the row's boundary values.
double indicator_primitive(double psi, const EnergyParams& p);

// Node phases derived from psi levels with the smoothing width as the band
// threshold.
enum class Phase : uint8_t {
  dry = 0,       // excluded node
  plateau1,      // psi >= m1 - eps
  fluid1,        // eps < psi < m1 - eps
  band,          // |psi| <= eps
  fluid2,        // m2 + eps < psi < -eps
  plateau2,      // psi <= m2 + eps
};

struct StreamField {
  std::vector<double> psi;
  std::vector<Phase> phase;
};

std::vector<Phase> phase_mask(const Grid& g, const std::vector<double>& psi,
                              const EnergyParams& p);

// Active cell rows (contiguous spans) used by the energy loops.  `k_max`
// bounds the cell rows; pass grid.nr-1 for the whole domain or grid.k_lid
// for the sub-lid region D used by the comparison barriers.
struct CellRows {
  int32_t nx = 0;
  double h = 0.0;
  double r0 = 0.0;
  std::vector<int32_t> k;      // node row index of the cell bottom
  std::vector<int32_t> jlo;
  std::vector<int32_t> jhi;    // inclusive
  int64_t cells = 0;
};
CellRows collect_cells(const Grid& g, int32_t k_max);

double energy(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
              const EnergyParams& p);

// One cell of J from its corner values (a,b bottom row, c,d top row) and
// center radius; used by the nodewise relaxation in the minimizer.
double cell_energy(double a, double b, double c, double d, double rc, double h,
                   const EnergyParams& p);

// Energy restricted to cells with center radius above r0.
double energy_tail(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
                   const EnergyParams& p, double r0);

// Raw nodal gradient dJ/dpsi_n over all nodes (no boundary masking).
void energy_gradient(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
                     const EnergyParams& p, std::vector<double>& grad);

// Action of the quadratic part only: out = A psi with
// A = sum_cells stiffness / r_c.  Shared by the barrier solve and the
// minimizer's linear correction steps.
void apply_stiffness(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
                     std::vector<double>& out);

// Diagonal of A, used as preconditioner.
void stiffness_diagonal(const Grid& g, const CellRows& cr, std::vector<double>& diag);

// Forcing of the frozen-coefficient model A psi = rhs: the cross-term part
// of the gradient with the cell weights Q held fixed at the current field.
void linear_forcing(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
                    const EnergyParams& p, std::vector<double>& rhs);

}  // namespace axijet
