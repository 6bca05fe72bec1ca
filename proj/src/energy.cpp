#include "axijet/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace axijet {

EnergyParams::EnergyParams(const FlowSpec& flow, const JetParams& jp, double eps_smooth,
                           Quadrature q) {
  flow.validate();
  jp.validate();
  m1 = flow.m1();
  m2 = flow.m2();
  speed1 = std::sqrt(flow.Lambda + jp.lambda);
  speed2 = std::sqrt(jp.lambda);
  ex = -std::sin(jp.theta);
  er = std::cos(jp.theta);
  eps = eps_smooth;
  quad = q;
  if (!(eps > 0.0)) throw std::invalid_argument("energy: smoothing width must be positive");
  if (!(2.0 * eps < std::min(m1, -m2)))
    throw std::invalid_argument("energy: smoothing width too large for the flux range");
}

double smooth_step(double t, double eps) {
  if (t <= 0.0) return 0.0;
  if (t >= eps) return 1.0;
  double u = t / eps;
  return u * u * (3.0 - 2.0 * u);
}

double smooth_step_deriv(double t, double eps) {
  if (t <= 0.0 || t >= eps) return 0.0;
  double u = t / eps;
  return 6.0 * u * (1.0 - u) / eps;
}

Indicator indicator_weight(double psi, const EnergyParams& p) {
  double sa1 = smooth_step(psi, p.eps);
  double sa2 = smooth_step(p.m1 - psi, p.eps);
  double sb1 = smooth_step(-psi, p.eps);
  double sb2 = smooth_step(psi - p.m2, p.eps);
  Indicator w;
  w.Q = p.speed1 * sa1 * sa2 + p.speed2 * sb1 * sb2;
  w.dQ = p.speed1 * (smooth_step_deriv(psi, p.eps) * sa2 - sa1 * smooth_step_deriv(p.m1 - psi, p.eps)) +
         p.speed2 * (-smooth_step_deriv(-psi, p.eps) * sb2 + sb1 * smooth_step_deriv(psi - p.m2, p.eps));
  return w;
}

// the rolloffs of one branch never overlap (eps < m/2), so away from them
// Q is a constant and the other branch is identically zero
double indicator_Q(double psi, const EnergyParams& p) {
  if (psi >= 0.0) {
    if (psi >= p.eps)
      return psi <= p.m1 - p.eps ? p.speed1
                                 : p.speed1 * smooth_step(p.m1 - psi, p.eps);
    return p.speed1 * smooth_step(psi, p.eps);
  }
  const double w = -psi;
  if (w >= p.eps)
    return w <= -p.m2 - p.eps ? p.speed2
                              : p.speed2 * smooth_step(-p.m2 - w, p.eps);
  return p.speed2 * smooth_step(w, p.eps);
}

namespace {

// Q and dQ together, same short-circuits
inline void indicator_qdq(double psi, const EnergyParams& p, double& Q, double& dQ) {
  if (psi >= 0.0) {
    if (psi >= p.eps) {
      if (psi <= p.m1 - p.eps) {
        Q = p.speed1;
        dQ = 0.0;
      } else {
        Q = p.speed1 * smooth_step(p.m1 - psi, p.eps);
        dQ = -p.speed1 * smooth_step_deriv(p.m1 - psi, p.eps);
      }
    } else {
      Q = p.speed1 * smooth_step(psi, p.eps);
      dQ = p.speed1 * smooth_step_deriv(psi, p.eps);
    }
    return;
  }
  const double w = -psi;
  if (w >= p.eps) {
    if (w <= -p.m2 - p.eps) {
      Q = p.speed2;
      dQ = 0.0;
    } else {
      Q = p.speed2 * smooth_step(-p.m2 - w, p.eps);
      dQ = p.speed2 * smooth_step_deriv(-p.m2 - w, p.eps);
    }
    return;
  }
  Q = p.speed2 * smooth_step(w, p.eps);
  dQ = -p.speed2 * smooth_step_deriv(w, p.eps);
}

}  // namespace

namespace {

// int_0^u of the unit cubic step, u in [0,1]
inline double step_primitive(double u) { return u * u * u * (1.0 - 0.5 * u); }

// int_0^v  sp * S(s) S(m - s) ds  for v, m > 0 (one phase branch); the two
// rolloffs do not overlap since eps < m/2
inline double branch_primitive(double v, double m, double sp, double eps) {
  if (v <= 0.0) return 0.0;
  if (v >= m) v = m;
  if (v < eps) return sp * eps * step_primitive(v / eps);
  if (v <= m - eps) return sp * (0.5 * eps + (v - eps));
  return sp * (m - eps - eps * step_primitive((m - v) / eps));
}

}  // namespace

double indicator_primitive(double psi, const EnergyParams& p) {
  if (psi >= 0.0) return branch_primitive(psi, p.m1, p.speed1, p.eps);
  return -branch_primitive(-psi, -p.m2, p.speed2, p.eps);
}

std::vector<Phase> phase_mask(const Grid& g, const std::vector<double>& psi,
                              const EnergyParams& p) {
  std::vector<Phase> ph(g.size(), Phase::dry);
  for (int32_t k = 0; k < g.nr; ++k) {
    for (int32_t j = g.node_span[k].jlo; j <= g.node_span[k].jhi; ++j) {
      double v = psi[g.idx(j, k)];
      Phase q;
      if (v >= p.m1 - p.eps)
        q = Phase::plateau1;
      else if (v > p.eps)
        q = Phase::fluid1;
      else if (v >= -p.eps)
        q = Phase::band;
      else if (v > p.m2 + p.eps)
        q = Phase::fluid2;
      else
        q = Phase::plateau2;
      ph[g.idx(j, k)] = q;
    }
  }
  return ph;
}

CellRows collect_cells(const Grid& g, int32_t k_max) {
  CellRows cr;
  cr.nx = g.nx;
  cr.h = g.h;
  cr.r0 = g.r0;
  int32_t top = std::min<int32_t>(k_max, g.nr - 1);
  for (int32_t k = 0; k < top; ++k) {
    const RowSpan& s = g.cell_span[k];
    if (s.empty()) continue;
    cr.k.push_back(k);
    cr.jlo.push_back(s.jlo);
    cr.jhi.push_back(s.jhi);
    cr.cells += s.jhi - s.jlo + 1;
  }
  return cr;
}

// One cell of J for either quadrature.  The trapezoid rule corner-samples
// the gradient term and Q^2 (so the hourglass mode e1 = -e2 keeps positive
// stiffness) and integrates the cross term exactly through the primitive G,
// Q grad(psi) . e = grad(G(psi)) . e, with the trapezoid rule across the
// transverse node pair.  The midpoint rule keeps the exactly integrated
// gradient term and one Q at the cell average.
static inline double cell_value(double a, double b, double c, double d, double rc,
                                double h, double h2, double inv2h,
                                const EnergyParams& p) {
  const double e1 = b - a, e2 = d - c, e3 = c - a, e4 = d - b;
  if (p.quad == Quadrature::midpoint) {
    const double stiff =
        (e1 * e1 + e1 * e2 + e2 * e2 + e3 * e3 + e3 * e4 + e4 * e4) / 3.0;
    const double gx = (e1 + e2) * inv2h;
    const double gr = (e3 + e4) * inv2h;
    const Indicator w = indicator_weight(0.25 * (a + b + c + d), p);
    return stiff / rc - 2.0 * w.Q * h2 * (gx * p.ex + gr * p.er) + rc * h2 * w.Q * w.Q;
  }
  const double Qa = indicator_Q(a, p), Qb = indicator_Q(b, p);
  const double Qc = indicator_Q(c, p), Qd = indicator_Q(d, p);
  const double Ga = indicator_primitive(a, p), Gb = indicator_primitive(b, p);
  const double Gc = indicator_primitive(c, p), Gd = indicator_primitive(d, p);
  const double stiff = 0.5 * (e1 * e1 + e2 * e2 + e3 * e3 + e4 * e4);
  const double cross =
      p.ex * (Gb + Gd - Ga - Gc) + p.er * (Gc + Gd - Ga - Gb);
  return stiff / rc - h * cross +
         0.25 * rc * h2 * (Qa * Qa + Qb * Qb + Qc * Qc + Qd * Qd);
}

double cell_energy(double a, double b, double c, double d, double rc, double h,
                   const EnergyParams& p) {
  return cell_value(a, b, c, d, rc, h, h * h, 0.5 / h, p);
}

double energy(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
              const EnergyParams& p) {
  const double h = cr.h, inv2h = 0.5 / h, h2 = h * h;
  const int32_t nx = cr.nx;
  double J = 0.0;
  for (size_t row = 0; row < cr.k.size(); ++row) {
    const int32_t k = cr.k[row];
    const double rc = cr.r0 + (k + 0.5) * h;
    const double* lo = psi.data() + int64_t(k) * nx;
    const double* hi = lo + nx;
    double Jrow = 0.0;
    for (int32_t j = cr.jlo[row]; j <= cr.jhi[row]; ++j)
      Jrow += cell_value(lo[j], lo[j + 1], hi[j], hi[j + 1], rc, h, h2, inv2h, p);
    J += Jrow;
  }
  return J;
}

double energy_tail(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
                   const EnergyParams& p, double r0) {
  const double h = cr.h, inv2h = 0.5 / h, h2 = h * h;
  const int32_t nx = cr.nx;
  double J = 0.0;
  for (size_t row = 0; row < cr.k.size(); ++row) {
    const int32_t k = cr.k[row];
    const double rc = cr.r0 + (k + 0.5) * h;
    if (rc <= r0) continue;
    const double* lo = psi.data() + int64_t(k) * nx;
    const double* hi = lo + nx;
    for (int32_t j = cr.jlo[row]; j <= cr.jhi[row]; ++j)
      J += cell_value(lo[j], lo[j + 1], hi[j], hi[j + 1], rc, h, h2, inv2h, p);
  }
  return J;
}

void energy_gradient(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
                     const EnergyParams& p, std::vector<double>& grad) {
  grad.assign(psi.size(), 0.0);
  const double h = cr.h, inv2h = 0.5 / h, h2 = h * h;
  const int32_t nx = cr.nx;
  const double third = 1.0 / 3.0;
  const bool corner = p.quad == Quadrature::trapezoid;
  for (size_t row = 0; row < cr.k.size(); ++row) {
    const int32_t k = cr.k[row];
    const double rc = cr.r0 + (k + 0.5) * h;
    const double inv_rc = 1.0 / rc;
    const double* lo = psi.data() + int64_t(k) * nx;
    const double* hi = lo + nx;
    double* glo = grad.data() + int64_t(k) * nx;
    double* ghi = glo + nx;
    for (int32_t j = cr.jlo[row]; j <= cr.jhi[row]; ++j) {
      const double a = lo[j], b = lo[j + 1], c = hi[j], d = hi[j + 1];
      const double e1 = b - a, e2 = d - c, e3 = c - a, e4 = d - b;
      if (!corner) {
        const double sa = (-(2.0 * e1 + e2) - (2.0 * e3 + e4)) * third * inv_rc;
        const double sb = ((2.0 * e1 + e2) - (2.0 * e4 + e3)) * third * inv_rc;
        const double sc = (-(2.0 * e2 + e1) + (2.0 * e3 + e4)) * third * inv_rc;
        const double sd = ((2.0 * e2 + e1) + (2.0 * e4 + e3)) * third * inv_rc;
        const double gx = (e1 + e2) * inv2h;
        const double gr = (e3 + e4) * inv2h;
        const Indicator w = indicator_weight(0.25 * (a + b + c + d), p);
        const double ge = gx * p.ex + gr * p.er;
        // chain through Q (same for all four corners)
        const double qchain = 0.25 * w.dQ * (2.0 * rc * h2 * w.Q - 2.0 * h2 * ge);
        // chain through the averaged gradient
        const double cx = h * w.Q * p.ex, cs = h * w.Q * p.er;
        glo[j] += sa + qchain + (cx + cs);
        glo[j + 1] += sb + qchain - (cx - cs);
        ghi[j] += sc + qchain + (cx - cs);
        ghi[j + 1] += sd + qchain - (cx + cs);
      } else {
        double Qa, dQa, Qb, dQb, Qc, dQc, Qd, dQd;
        indicator_qdq(a, p, Qa, dQa);
        indicator_qdq(b, p, Qb, dQb);
        indicator_qdq(c, p, Qc, dQc);
        indicator_qdq(d, p, Qd, dQd);
        const double rh = 0.5 * rc * h2;
        glo[j] += -(e1 + e3) * inv_rc + h * Qa * (p.ex + p.er) + rh * Qa * dQa;
        glo[j + 1] += (e1 - e4) * inv_rc - h * Qb * (p.ex - p.er) + rh * Qb * dQb;
        ghi[j] += (e3 - e2) * inv_rc + h * Qc * (p.ex - p.er) + rh * Qc * dQc;
        ghi[j + 1] += (e2 + e4) * inv_rc - h * Qd * (p.ex + p.er) + rh * Qd * dQd;
      }
    }
  }
}

void apply_stiffness(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
                     std::vector<double>& out) {
  out.assign(psi.size(), 0.0);
  const int32_t nx = cr.nx;
  const double third = 1.0 / 3.0;
  for (size_t row = 0; row < cr.k.size(); ++row) {
    const int32_t k = cr.k[row];
    const double inv_rc = 1.0 / (cr.r0 + (k + 0.5) * cr.h);
    const double* lo = psi.data() + int64_t(k) * nx;
    const double* hi = lo + nx;
    double* olo = out.data() + int64_t(k) * nx;
    double* ohi = olo + nx;
    for (int32_t j = cr.jlo[row]; j <= cr.jhi[row]; ++j) {
      const double a = lo[j], b = lo[j + 1], c = hi[j], d = hi[j + 1];
      const double e1 = b - a, e2 = d - c, e3 = c - a, e4 = d - b;
      olo[j] += (-(2.0 * e1 + e2) - (2.0 * e3 + e4)) * third * inv_rc;
      olo[j + 1] += ((2.0 * e1 + e2) - (2.0 * e4 + e3)) * third * inv_rc;
      ohi[j] += (-(2.0 * e2 + e1) + (2.0 * e3 + e4)) * third * inv_rc;
      ohi[j + 1] += ((2.0 * e2 + e1) + (2.0 * e4 + e3)) * third * inv_rc;
    }
  }
}

void stiffness_diagonal(const Grid& g, const CellRows& cr, std::vector<double>& diag) {
  diag.assign(g.size(), 0.0);
  const double third4 = 4.0 / 3.0;
  const int32_t nx = cr.nx;
  for (size_t row = 0; row < cr.k.size(); ++row) {
    const int32_t k = cr.k[row];
    const double w = third4 / (cr.r0 + (k + 0.5) * cr.h);
    double* dlo = diag.data() + int64_t(k) * nx;
    double* dhi = dlo + nx;
    for (int32_t j = cr.jlo[row]; j <= cr.jhi[row]; ++j) {
      dlo[j] += w;
      dlo[j + 1] += w;
      dhi[j] += w;
      dhi[j + 1] += w;
    }
  }
}

void linear_forcing(const Grid& g, const CellRows& cr, const std::vector<double>& psi,
                    const EnergyParams& p, std::vector<double>& rhs) {
  rhs.assign(psi.size(), 0.0);
  const double h = cr.h;
  const int32_t nx = cr.nx;
  for (size_t row = 0; row < cr.k.size(); ++row) {
    const int32_t k = cr.k[row];
    const double* lo = psi.data() + int64_t(k) * nx;
    const double* hi = lo + nx;
    double* flo = rhs.data() + int64_t(k) * nx;
    double* fhi = flo + nx;
    for (int32_t j = cr.jlo[row]; j <= cr.jhi[row]; ++j) {
      const double a = lo[j], b = lo[j + 1], c = hi[j], d = hi[j + 1];
      if (p.quad == Quadrature::midpoint) {
        const Indicator w = indicator_weight(0.25 * (a + b + c + d), p);
        const double cx = h * w.Q * p.ex, cs = h * w.Q * p.er;
        flo[j] -= cx + cs;
        flo[j + 1] += cx - cs;
        fhi[j] -= cx - cs;
        fhi[j + 1] += cx + cs;
      } else {
        const double Qa = indicator_weight(a, p).Q, Qb = indicator_weight(b, p).Q;
        const double Qc = indicator_weight(c, p).Q, Qd = indicator_weight(d, p).Q;
        flo[j] -= h * Qa * (p.ex + p.er);
        flo[j + 1] += h * Qb * (p.ex - p.er);
        fhi[j] -= h * Qc * (p.ex - p.er);
        fhi[j + 1] += h * Qd * (p.ex + p.er);
      }
    }
  }
}

}  // namespace axijet
