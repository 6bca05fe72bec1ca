#include "axijet/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "axijet/linear.hpp"

namespace axijet {

namespace {

double clampv(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

double sstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

double upstream_profile(double r, double m, double r_in) {
  if (!(r_in > 0.0)) throw std::invalid_argument("upstream_profile: r_in must be positive");
  return m * (r * r) / (r_in * r_in);
}

double blowup_profile(double s, const FlowSpec& flow, double lambda) {
  flow.validate();
  if (!(lambda >= 0.0)) throw std::invalid_argument("blowup_profile: lambda < 0");
  const double sp = std::sqrt(flow.Lambda + lambda);
  if (!(sp > 0.0)) throw std::invalid_argument("blowup_profile: Lambda + lambda == 0");
  const double sl = std::sqrt(lambda);
  const double m1 = flow.m1(), m2 = flow.m2();

  if (s >= 0.0) return m1;
  const double knee = -m1 / sp;  // where the fast ramp reaches zero
  if (s >= knee) return m1 + sp * s;
  if (sl == 0.0) return 0.0;     // outer fluid carries no speed, flat tail
  return std::max(sl * (s - knee), m2);
}

double degenerate_profile(double theta, double r, const FlowSpec& flow,
                          double lambda, double R) {
  flow.validate();
  if (!(lambda >= 0.0)) throw std::invalid_argument("degenerate_profile: lambda < 0");
  if (!(R > 0.0)) throw std::invalid_argument("degenerate_profile: R must be positive");
  const double sp = std::sqrt(flow.Lambda + lambda);
  if (!(sp > 0.0)) throw std::invalid_argument("degenerate_profile: Lambda + lambda == 0");
  const double sl = std::sqrt(lambda);
  const double m1 = flow.m1(), m2 = flow.m2();
  const double rr = r * r, RR = R * R;

  if (std::abs(theta - M_PI) <= 1e-12) {
    // jet leaves along -x, profile falls from m1 at the lid
    const double a = clampv(m1 - 0.5 * sp * (rr - RR), 0.0, m1);
    const double b = (sl > 0.0)
                         ? clampv(0.5 * sl * (RR + 2.0 * m1 / sp - rr), m2, 0.0)
                         : 0.0;
    return a + b;
  }
  if (std::abs(theta) <= 1e-12) {
    if (sl == 0.0)
      throw std::invalid_argument("degenerate_profile: theta = 0 needs lambda > 0");
    const double a = clampv(m2 + 0.5 * sl * (rr - RR), m2, 0.0);
    const double b = clampv(0.5 * sp * (rr - RR + 2.0 * m2 / sl), 0.0, m1);
    return a + b;
  }
  throw std::invalid_argument("degenerate_profile: theta must be 0 or pi");
}

namespace {

std::vector<double> trial_seed_impl(const Grid& g, const FlowSpec& flow,
                                    const JetParams& jet, double x_shift) {
  flow.validate();
  jet.validate();
  const double m1 = flow.m1(), m2 = flow.m2();
  const double sp = std::sqrt(flow.Lambda + jet.lambda);
  const double sl = std::sqrt(jet.lambda);
  if (!(sp > 0.0)) throw std::invalid_argument("trial_seed: Lambda + lambda == 0");
  const double R = g.R, mu = g.mu;
  const double r1c = g.r_cut_l, r2c = g.r_cut_r;
  const double ct = std::cos(jet.theta), st = std::sin(jet.theta);
  const bool axial = (st <= 1e-12);

  auto mixv = [&](double x, double r) {
    double eta = (x <= -mu) ? 1.0 : (x >= mu) ? 0.0 : (mu - x) / (2.0 * mu);
    double q1 = std::min(r * r / (r1c * r1c), 1.0);
    double q2 = std::min(r * r / (r2c * r2c), 1.0);
    return eta * m1 * q1 + (1.0 - eta) * m2 * q2;
  };
  // clamped profile along the cross-jet coordinate, valid far from the mouths
  auto jetv = [&](double x, double r) {
    double s = r * ct - (x - x_shift) * st;
    if (s >= 0.0) return std::min(sp * r * s, m1);
    return std::max(sl * r * s, m2);
  };
  auto axialv = [&](double x, double r) {
    // plateau on the upstream side of the jet, radial profile downstream
    double v0 = degenerate_profile(jet.theta, r, flow, jet.lambda, R);
    if (jet.theta < 0.5 * M_PI) {  // theta == 0, jet to the right
      double w = sstep((2.0 - x) / 4.0);
      return w * m1 + (1.0 - w) * v0;
    }
    double w = sstep((2.0 - x) / 4.0);
    return w * v0 + (1.0 - w) * m2;
  };

  std::vector<double> psi(g.size(), 0.0);
  const double rc_min = std::min(r1c, r2c);
  for (int32_t k = 0; k < g.nr; ++k) {
    const double r = g.r(k);
    for (int32_t j = 0; j < g.nx; ++j) {
      const double x = g.x(j);
      double v;
      if (axial) {
        if (r >= R) {
          v = axialv(x, r);
        } else {
          double wz = sstep((r - rc_min) / std::max(R - rc_min, 1e-12));
          v = (1.0 - wz) * mixv(x, r) + wz * axialv(x, R);
        }
      } else {
        if (r >= R + 1.0) {
          v = jetv(x, r);
        } else if (r > R) {
          double w = sstep(r - R);
          v = (1.0 - w) * mixv(x, r) + w * jetv(x, r);
        } else {
          v = mixv(x, r);
        }
      }
      psi[g.idx(j, k)] = clampv(v, m2, m1);
    }
  }
  // inflow columns carry the exact parabolas
  for (int32_t k = 0; k < g.nr; ++k)
    for (int32_t j = 0; j < g.nx; ++j) {
      const NodeKind kind = g.kind_at(j, k);
      if (kind == NodeKind::inlet_left)
        psi[g.idx(j, k)] = upstream_profile(g.r(k), m1, r1c);
      else if (kind == NodeKind::inlet_right)
        psi[g.idx(j, k)] = upstream_profile(g.r(k), m2, r2c);
    }
  return psi;
}

}  // namespace

std::vector<double> trial_seed(const Grid& g, const FlowSpec& flow,
                               const JetParams& jet) {
  return trial_seed_impl(g, flow, jet, 0.0);
}

std::vector<double> trial_seed(const Grid& g, const FlowSpec& flow,
                               const JetParams& jet, double sheet_x_top) {
  const double st = std::sin(jet.theta);
  if (st <= 1e-12) return trial_seed_impl(g, flow, jet, 0.0);
  // untranslated sheet meets the top row at r_top * cot(theta)
  const double xs = sheet_x_top - g.r_top * std::cos(jet.theta) / st;
  return trial_seed_impl(g, flow, jet, xs);
}

Barriers barrier_fields(const Grid& g, const FlowSpec& flow) {
  flow.validate();
  const double m1 = flow.m1(), m2 = flow.m2();
  const double r1c = g.r_cut_l, r2c = g.r_cut_r;
  const CellRows cr = collect_cells(g, g.k_lid);

  std::vector<uint8_t> free_mask(g.size(), 0);
  for (int32_t k = 1; k < g.k_lid; ++k)
    for (int32_t j = 0; j < g.nx; ++j)
      if (g.kind_at(j, k) == NodeKind::interior) free_mask[g.idx(j, k)] = 1;

  auto solve_one = [&](double lid_value) {
    std::vector<double> psi(g.size(), 0.0);
    for (int32_t k = 0; k < g.nr; ++k)
      for (int32_t j = 0; j < g.nx; ++j) {
        const size_t n = g.idx(j, k);
        const NodeKind kind = g.kind_at(j, k);
        if (kind == NodeKind::outside) continue;
        if (k >= g.k_lid) {
          if (kind == NodeKind::wall_left)
            psi[n] = m1;
          else if (kind == NodeKind::wall_right)
            psi[n] = m2;
          else
            psi[n] = lid_value;
          continue;
        }
        switch (kind) {
          case NodeKind::axis: psi[n] = 0.0; break;
          case NodeKind::wall_left: psi[n] = m1; break;
          case NodeKind::wall_right: psi[n] = m2; break;
          case NodeKind::inlet_left: psi[n] = upstream_profile(g.r(k), m1, r1c); break;
          case NodeKind::inlet_right: psi[n] = upstream_profile(g.r(k), m2, r2c); break;
          default:
            // warm start for the interior unknowns
            psi[n] = 0.5 * (m1 + m2) * (g.r(k) * g.r(k)) / (g.R * g.R) +
                     0.5 * (m1 - m2) * (-g.x(j) / g.mu) * (g.r(k) * g.r(k)) / (g.R * g.R);
            break;
        }
      }
    PcgResult res = pcg_stiffness(g, cr, free_mask, nullptr, psi, 1e-11, 20000);
    if (!res.converged)
      throw std::runtime_error("barrier_fields: linear solve did not converge");
    return psi;
  };

  Barriers b;
  b.hi = solve_one(m1);
  b.lo = solve_one(m2);
  return b;
}

}  // namespace axijet
