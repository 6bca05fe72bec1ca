// Closed-form reference profiles and the constructed starting field.
//
// blowup_profile gives the one-dimensional far-field shape of the scaled
// stream function against the signed cross-jet coordinate s = r cos(theta)
// - x sin(theta): constant m1 on the fluid-1 side, a linear drop with slope
// sqrt(Lambda+lambda) to zero, a linear drop with slope sqrt(lambda) down to
// m2, constant after that.  degenerate_profile is the radial analogue for a
// jet ejected straight along the axis (theta = 0 or pi).
#pragma once

#include <vector>

#include "axijet/energy.hpp"
#include "axijet/flow.hpp"
#include "axijet/geometry.hpp"

namespace axijet {

// Poiseuille-free columnar inflow m * r^2 / r_in^2.
double upstream_profile(double r, double m, double r_in);

double blowup_profile(double s, const FlowSpec& flow, double lambda);

// Radial profile of the axial jet; theta must be 0 or pi.
double degenerate_profile(double theta, double r, const FlowSpec& flow,
                          double lambda, double R);

// Piecewise starting field: clamped tilted quadratics past r = R + 1, the
// x-interpolated inflow parabolas in the nozzle band, and blends between.
// Inlet columns carry the exact parabola values.
std::vector<double> trial_seed(const Grid& g, const FlowSpec& flow,
                               const JetParams& jet);

// Same field with the far sheet translated so its centerline meets the top
// row at x = sheet_x_top.  Axial jets have no sheet and ignore the shift.
std::vector<double> trial_seed(const Grid& g, const FlowSpec& flow,
                               const JetParams& jet, double sheet_x_top);

struct Barriers {
  std::vector<double> hi;  // larger comparison solution, caps psi above
  std::vector<double> lo;  // smaller one, caps psi below
};

// Solves the linear problem with lid data m1 (hi) / m2 (lo), wall data m1 on
// the left nozzle and m2 on the right, zero on the axis and the inflow
// parabolas on the truncation columns.  Values above the lid are filled with
// the lid constant.
Barriers barrier_fields(const Grid& g, const FlowSpec& flow);

}  // namespace axijet
