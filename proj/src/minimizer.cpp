#include "axijet/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "axijet/linear.hpp"

namespace axijet {

namespace {

double clampv(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// interface position on the probe row: first sign change, sub-cell resolved
bool row_zero_crossing(const Grid& g, const std::vector<double>& psi, int32_t k,
                       double* xz) {
  for (int32_t j = 0; j + 1 < g.nx; ++j) {
    if (!g.is_fluid(j, k) || !g.is_fluid(j + 1, k)) continue;
    const double a = psi[g.idx(j, k)], b = psi[g.idx(j + 1, k)];
    if (a >= 0.0 && b < 0.0) {
      const double f = (a - b) > 0.0 ? a / (a - b) : 0.5;
      *xz = g.x(j) + f * g.h;
      return true;
    }
  }
  return false;
}

}  // namespace

void boundary_values(const Grid& g, const FlowSpec& flow, const JetParams& jet,
                     double anchor_x, std::vector<double>& bc,
                     std::vector<uint8_t>& fixed) {
  flow.validate();
  jet.validate();
  const double m1 = flow.m1(), m2 = flow.m2();
  const double sp = std::sqrt(flow.Lambda + jet.lambda);
  if (!(sp > 0.0)) throw std::invalid_argument("boundary_values: Lambda + lambda == 0");
  const double st = std::sin(jet.theta);
  const bool oblique = st > 1e-12;
  const bool leftward = jet.theta > 0.5 * M_PI;  // theta = pi when not oblique
  const double s0 = -m1 / sp;  // profile offset putting the interface at the anchor

  bc.assign(g.size(), 0.0);
  fixed.assign(g.size(), 1);
  for (int32_t k = 0; k < g.nr; ++k) {
    const double r = g.r(k);
    for (int32_t j = 0; j < g.nx; ++j) {
      const int64_t n = g.idx(j, k);
      switch (g.kind_at(j, k)) {
        case NodeKind::interior:
          fixed[n] = 0;
          break;
        case NodeKind::outside:
        case NodeKind::axis:
        case NodeKind::cut_bottom:
          bc[n] = 0.0;
          break;
        case NodeKind::wall_left:
          bc[n] = m1;
          break;
        case NodeKind::wall_right:
          bc[n] = m2;
          break;
        case NodeKind::inlet_left:
          bc[n] = upstream_profile(r, m1, g.r_cut_l);
          break;
        case NodeKind::inlet_right:
          bc[n] = upstream_profile(r, m2, g.r_cut_r);
          break;
        case NodeKind::cut_left:
          bc[n] = (oblique || !leftward)
                      ? m1
                      : degenerate_profile(M_PI, r, flow, jet.lambda, g.R);
          break;
        case NodeKind::cut_right:
          bc[n] = (oblique || leftward)
                      ? m2
                      : degenerate_profile(0.0, r, flow, jet.lambda, g.R);
          break;
        case NodeKind::cut_top:
          // far-field profile in the rescaled transverse variable, d(sigma)
          // = r ds, so the ramp thins like 1/r as the annular sheet spreads
          bc[n] = oblique
                      ? blowup_profile(s0 - r * (g.x(j) - anchor_x) * st, flow, jet.lambda)
                      : degenerate_profile(jet.theta, r, flow, jet.lambda, g.R);
          break;
      }
    }
  }
}

void project_admissible(const Grid& g, const Barriers& b,
                        const std::vector<double>& bc,
                        const std::vector<uint8_t>& fixed,
                        std::vector<double>& psi) {
  for (int64_t n = 0; n < (int64_t)psi.size(); ++n) {
    if (b.lo[n] > b.hi[n] + 1e-9)
      throw std::runtime_error("project_admissible: barrier order violated");
    psi[n] = fixed[n] ? bc[n] : clampv(psi[n], b.lo[n], b.hi[n]);
  }
}

DescentStats minimize_field(const FieldProblem& fp, const SolveOptions& opts,
                            std::vector<double>& psi) {
  const Grid& g = *fp.grid;
  const CellRows& cr = *fp.cells;
  const std::vector<double>& bc = *fp.bc;
  const std::vector<uint8_t>& fixed = *fp.fixed;
  const std::vector<double>& lo = *fp.lo;
  const std::vector<double>& hi = *fp.hi;
  const size_t n = psi.size();

  for (size_t i = 0; i < n; ++i)
    psi[i] = fixed[i] ? bc[i] : clampv(psi[i], lo[i], hi[i]);

  std::vector<uint8_t> free_mask(n);
  for (size_t i = 0; i < n; ++i) free_mask[i] = fixed[i] ? 0 : 1;
  std::vector<double> diag;
  stiffness_diagonal(g, cr, diag);

  std::vector<double> grad(n), pg(n, 0.0), pg_prev(n, 0.0), psi_prev(n), trial(n);
  std::vector<double> rhs, model;

  double E = energy(g, cr, psi, fp.params);
  DescentStats st;
  st.trace.push_back(E);
  const double scale = std::max(std::abs(fp.params.m1), std::abs(fp.params.m2));
  const double stop_step = opts.tol_step * scale;

  // frozen-coefficient correction used as a line-searched direction;
  // returns the accepted max node change (0 when rejected)
  auto try_polish = [&]() -> double {
    linear_forcing(g, cr, psi, fp.params, rhs);
    model = psi;
    pcg_stiffness(g, cr, free_mask, rhs.data(), model, 1e-6, 150);
    double tt = 1.0;
    for (int bt = 0; bt < 20; ++bt) {
      double step = 0.0;
      for (size_t i = 0; i < n; ++i) {
        if (fixed[i]) {
          trial[i] = bc[i];
          continue;
        }
        const double v = clampv(psi[i] + tt * (model[i] - psi[i]), lo[i], hi[i]);
        step = std::max(step, std::abs(v - psi[i]));
        trial[i] = v;
      }
      if (step == 0.0) return 0.0;
      const double Et = energy(g, cr, trial, fp.params);
      if (Et <= E - 1e-14 * std::abs(E)) {
        psi.swap(trial);
        E = Et;
        st.trace.push_back(E);
        return step;
      }
      tt *= 0.4;
    }
    return 0.0;
  };

  // Nodewise exact line minimization.  The functional is nonconvex in each
  // node through Q(psi_bar), so descent directions stall at configurations
  // where single nodes sit in the wrong well; the sub-cell free boundary is
  // represented by one node per row inside the rolloff band and neither the
  // gradient step nor the frozen-coefficient correction can place it there.
  // Scanning each node's admissible interval (plus the values that put an
  // incident cell average exactly at a rolloff breakpoint) hops those wells
  // while keeping the energy strictly decreasing.
  std::vector<int32_t> cell_row(g.nr > 1 ? g.nr - 1 : 0, -1);
  for (size_t row = 0; row < cr.k.size(); ++row) cell_row[cr.k[row]] = int32_t(row);

  auto cell_at = [&](int32_t cj, int32_t ck) -> double {
    const double rc = cr.r0 + (ck + 0.5) * cr.h;
    const double* lorow = psi.data() + int64_t(ck) * g.nx;
    const double* hirow = lorow + g.nx;
    return cell_energy(lorow[cj], lorow[cj + 1], hirow[cj], hirow[cj + 1], rc, cr.h,
                       fp.params);
  };
  auto has_cell = [&](int32_t cj, int32_t ck) -> bool {
    if (ck < 0 || ck >= int32_t(cell_row.size())) return false;
    const int32_t row = cell_row[ck];
    return row >= 0 && cj >= cr.jlo[row] && cj <= cr.jhi[row];
  };

  const EnergyParams& p = fp.params;
  const double lv[] = {p.m2,          p.m2 + 0.5 * p.eps, p.m2 + p.eps,
                       -p.eps,        -0.5 * p.eps,       0.0,
                       0.5 * p.eps,   p.eps,              p.m1 - p.eps,
                       p.m1 - 0.5 * p.eps,                p.m1};
  // with corner-sampled transport the only breakpoints are at the node value
  // itself; the cell-average candidates exist for the averaged rule
  const bool avg_rule = p.quad == Quadrature::midpoint;

  auto relax = [&](int32_t j, int32_t k) -> double {
    const size_t id = g.idx(j, k);
    if (fixed[id]) return 0.0;
    int32_t cjs[4], cks[4];
    int nc = 0;
    for (int dk = -1; dk <= 0; ++dk)
      for (int dj = -1; dj <= 0; ++dj)
        if (has_cell(j + dj, k + dk)) {
          cjs[nc] = j + dj;
          cks[nc] = k + dk;
          ++nc;
        }
    if (nc == 0) return 0.0;
    const double v0 = psi[id], vlo = lo[id], vhi = hi[id];

    if (!avg_rule) {
      // with corner sampling the incident-cell energy collapses, up to
      // constants, to  A v^2 - B v + C G(v) + D Q(v)^2  in the node value,
      // so each candidate costs one Q and one G evaluation
      double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
      for (int c = 0; c < nc; ++c) {
        const int32_t cj = cjs[c], ck = cks[c];
        const double rc = cr.r0 + (ck + 0.5) * g.h;
        const double inv_rc = 1.0 / rc;
        const double* lorow = psi.data() + int64_t(ck) * g.nx;
        const double* hirow = lorow + g.nx;
        const bool right = (j == cj + 1), top = (k == ck + 1);
        double adj, gamma;
        if (!top) {
          if (!right) {
            adj = lorow[cj + 1] + hirow[cj];
            gamma = g.h * (p.ex + p.er);
          } else {
            adj = lorow[cj] + hirow[cj + 1];
            gamma = -g.h * (p.ex - p.er);
          }
        } else {
          if (!right) {
            adj = hirow[cj + 1] + lorow[cj];
            gamma = g.h * (p.ex - p.er);
          } else {
            adj = hirow[cj] + lorow[cj + 1];
            gamma = -g.h * (p.ex + p.er);
          }
        }
        A += inv_rc;
        B += adj * inv_rc;
        C += gamma;
        D += 0.25 * rc * g.h * g.h;
      }
      auto local = [&](double v) {
        const double q = indicator_Q(v, p);
        return (A * v - B) * v + C * indicator_primitive(v, p) + D * q * q;
      };
      const double E0 = local(v0);
      double bv = v0, bE = E0;
      auto consider = [&](double v) {
        if (!(v >= vlo && v <= vhi)) return;
        const double Ev = local(v);
        if (Ev < bE) {
          bE = Ev;
          bv = v;
        }
      };
      const int ns = 16;
      const double span = vhi - vlo;
      for (int s = 0; s <= ns; ++s) consider(vlo + span * s / ns);
      for (double L : lv) consider(L);
      double wl = std::max(vlo, bv - span / ns), wr = std::min(vhi, bv + span / ns);
      for (int t2 = 0; t2 < 32 && wr - wl > 1e-13; ++t2) {
        const double u1 = wl + (wr - wl) / 3.0, u2 = wr - (wr - wl) / 3.0;
        if (local(u1) < local(u2))
          wr = u2;
        else
          wl = u1;
      }
      consider(0.5 * (wl + wr));
      if (E0 - bE > 1e-13 * (1.0 + std::abs(E0))) {
        psi[id] = bv;
        return std::abs(bv - v0);
      }
      return 0.0;
    }

    auto local = [&](double v) {
      psi[id] = v;
      double s = 0.0;
      for (int c = 0; c < nc; ++c) s += cell_at(cjs[c], cks[c]);
      return s;
    };
    const double E0 = local(v0);
    double bv = v0, bE = E0;
    auto consider = [&](double v) {
      if (!(v >= vlo && v <= vhi)) return;
      const double Ev = local(v);
      if (Ev < bE) {
        bE = Ev;
        bv = v;
      }
    };
    const int ns = 16;
    const double span = vhi - vlo;
    for (int s = 0; s <= ns; ++s) consider(vlo + span * s / ns);
    for (double L : lv) consider(L);
    for (int c = 0; c < nc; ++c) {
      const int32_t cj = cjs[c], ck = cks[c];
      const double* lorow = psi.data() + int64_t(ck) * g.nx;
      const double* hirow = lorow + g.nx;
      psi[id] = v0;
      const double s3 = lorow[cj] + lorow[cj + 1] + hirow[cj] + hirow[cj + 1] - v0;
      for (double L : lv) consider(4.0 * L - s3);  // cell average at a knot
    }
    double wl = std::max(vlo, bv - span / ns), wr = std::min(vhi, bv + span / ns);
    for (int t2 = 0; t2 < 32 && wr - wl > 1e-13; ++t2) {
      const double u1 = wl + (wr - wl) / 3.0, u2 = wr - (wr - wl) / 3.0;
      if (local(u1) < local(u2))
        wr = u2;
      else
        wl = u1;
    }
    consider(0.5 * (wl + wr));
    if (E0 - bE > 1e-13 * (1.0 + std::abs(E0))) {
      psi[id] = bv;
      return std::abs(bv - v0);
    }
    psi[id] = v0;
    return 0.0;
  };

  // One full nodewise pass, then closure over the wavefront of moved nodes.
  // A node skipped by the closure kept all its incident cells unchanged, so
  // the quiet state is a fixed point of the full pass.  Returns the largest
  // move seen anywhere, so a pass that rearranged the field reports itself
  // as unsettled and descent resumes on the improved iterate.
  bool gs_fwd = true;
  std::vector<uint8_t> queued(n, 0);
  std::vector<int64_t> work, work_next;
  auto gs_fixed_point = [&]() -> double {
    work_next.clear();
    std::fill(queued.begin(), queued.end(), 0);
    auto enqueue_around = [&](int32_t j, int32_t k) {
      for (int32_t dk = -1; dk <= 1; ++dk)
        for (int32_t dj = -1; dj <= 1; ++dj) {
          const int32_t jj = j + dj, kk = k + dk;
          if (jj < 1 || kk < 1 || jj >= g.nx - 1 || kk >= g.nr - 1) continue;
          const size_t id = g.idx(jj, kk);
          if (queued[id]) continue;
          queued[id] = 1;
          work_next.push_back((int64_t)id);
        }
    };
    double maxstep = 0.0;
    if (gs_fwd) {
      for (int32_t k = 1; k < g.nr - 1; ++k)
        for (int32_t j = 1; j < g.nx - 1; ++j) {
          const double d = relax(j, k);
          if (d > 0.0) {
            maxstep = std::max(maxstep, d);
            enqueue_around(j, k);
          }
        }
    } else {
      for (int32_t k = g.nr - 2; k >= 1; --k)
        for (int32_t j = g.nx - 2; j >= 1; --j) {
          const double d = relax(j, k);
          if (d > 0.0) {
            maxstep = std::max(maxstep, d);
            enqueue_around(j, k);
          }
        }
    }
    gs_fwd = !gs_fwd;
    for (int pass = 0; pass < 400 && !work_next.empty(); ++pass) {
      work.swap(work_next);
      work_next.clear();
      std::fill(queued.begin(), queued.end(), 0);
      std::sort(work.begin(), work.end());
      double wstep = 0.0;
      for (const int64_t id : work) {
        const int32_t k = int32_t(id / g.nx), j = int32_t(id % g.nx);
        const double d = relax(j, k);
        if (d > 0.0) {
          wstep = std::max(wstep, d);
          enqueue_around(j, k);
        }
      }
      maxstep = std::max(maxstep, wstep);
      if (wstep <= stop_step) break;
    }
    if (maxstep > 0.0) {
      E = energy(g, cr, psi, fp.params);
      st.trace.push_back(E);
    }
    return maxstep;
  };

  // quiet only when the correction solve and the nodewise pass both are
  auto settle = [&]() -> double {
    const double pstep = try_polish();
    const double sstep = gs_fixed_point();
    return std::max(pstep, sstep);
  };

  double t = 1.0;
  bool have_prev = false;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    energy_gradient(g, cr, psi, fp.params, grad);
    for (size_t i = 0; i < n; ++i)
      pg[i] = fixed[i] ? 0.0 : grad[i] / std::max(diag[i], 1e-300);

    if (have_prev) {
      double ss = 0.0, sy = 0.0;
      for (size_t i = 0; i < n; ++i) {
        if (fixed[i]) continue;
        const double s = psi[i] - psi_prev[i], y = pg[i] - pg_prev[i];
        ss += s * s;
        sy += s * y;
      }
      t = (sy > 1e-300) ? clampv(ss / sy, 1e-7, 1e7) : std::min(t * 2.0, 1e7);
    }
    psi_prev = psi;
    pg_prev = pg;

    double tt = t, Et = E, step = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      step = 0.0;
      double dec = 0.0;
      for (size_t i = 0; i < n; ++i) {
        if (fixed[i]) {
          trial[i] = bc[i];
          continue;
        }
        const double v = clampv(psi[i] - tt * pg[i], lo[i], hi[i]);
        dec += grad[i] * (psi[i] - v);
        step = std::max(step, std::abs(v - psi[i]));
        trial[i] = v;
      }
      if (step == 0.0) {  // stationary within the box
        accepted = true;
        Et = E;
        break;
      }
      Et = energy(g, cr, trial, fp.params);
      if (Et <= E - 1e-4 * dec + 1e-15 * std::abs(E)) {
        accepted = true;
        break;
      }
      tt *= 0.5;
    }
    if (!accepted) {
      // no decrease along the preconditioned gradient; only settled if the
      // linear correction and the nodewise scan also find nothing
      st.step_norm = settle();
      if (st.step_norm <= stop_step) {
        st.converged = true;
        ++it;
        break;
      }
      have_prev = false;
      continue;
    }
    if (step > 0.0) {
      psi.swap(trial);
      const double drop = E - Et;
      E = Et;
      st.trace.push_back(E);
      have_prev = true;
      st.step_norm = step;
      if (drop <= opts.tol_energy * (std::abs(E) + 1e-300) && step <= stop_step) {
        const double res = settle();
        if (res <= stop_step) {
          st.converged = true;
          ++it;
          break;
        }
        have_prev = false;  // field moved, spectral history is stale
        continue;
      }
    }
    if (step <= stop_step) {
      const double res = settle();
      if (res <= stop_step) {
        st.converged = true;
        st.step_norm = std::max(step, res);
        ++it;
        break;
      }
      have_prev = false;
    } else if (opts.polish_every > 0 && (it + 1) % opts.polish_every == 0) {
      if (try_polish() > 0.0) have_prev = false;
    }
  }
  st.iterations = it;
  st.energy = E;
  return st;
}

namespace {

bool estimate_anchor(const Grid& g, const std::vector<double>& psi, double* anchor) {
  double xz;
  if (!row_zero_crossing(g, psi, g.nr - 2, &xz)) return false;
  *anchor = clampv(xz, -0.85 * g.mu, 0.85 * g.mu);
  return true;
}

}  // namespace

Solution minimize(const Grid& g, const FlowSpec& flow, const JetParams& jet,
                  const SolveOptions& opts, const Barriers* barriers,
                  const std::vector<double>* seed) {
  flow.validate();
  jet.validate();
  Barriers local;
  const Barriers* B = barriers;
  if (!B) {
    local = barrier_fields(g, flow);
    B = &local;
  }

  const CellRows cr = collect_cells(g, g.nr - 1);
  // widths walked down from a quarter of the smaller flux so the sheet can
  // slide while the wells are still shallow; jumping straight to the working
  // width costs more iterations and lands in higher minima
  const double mb = std::min(flow.m1(), -flow.m2());
  std::vector<double> sched = opts.eps_schedule;
  if (sched.empty()) sched = {mb / 4.0, mb / 10.0, mb / 25.0, mb / 50.0, mb / 100.0};

  std::vector<double> psi;
  if (seed)
    psi = *seed;
  else if (opts.use_trial_seed)
    psi = trial_seed(g, flow, jet);
  else
    throw std::invalid_argument("minimize: no seed provided");
  if ((int64_t)psi.size() != g.size())
    throw std::invalid_argument("minimize: seed size mismatch");

  const bool oblique = std::sin(jet.theta) > 1e-12;
  double anchor = 0.0;
  if (oblique && !estimate_anchor(g, psi, &anchor))
    anchor = clampv(g.r_top * std::cos(jet.theta) / std::sin(jet.theta),
                    -0.85 * g.mu, 0.85 * g.mu);

  std::vector<double> bc;
  std::vector<uint8_t> fixed;
  boundary_values(g, flow, jet, anchor, bc, fixed);
  project_admissible(g, *B, bc, fixed, psi);

  Solution sol;
  sol.params = jet;

  for (size_t stage = 0; stage < sched.size(); ++stage) {
    EnergyParams p(flow, jet, sched[stage], opts.quad);
    FieldProblem fp;
    fp.grid = &g;
    fp.cells = &cr;
    fp.params = p;
    fp.bc = &bc;
    fp.fixed = &fixed;
    fp.lo = &B->lo;
    fp.hi = &B->hi;

    sol.eps_smooth = sched[stage];
    sol.converged = false;
    std::vector<double> stage_trace;
    int stage_iters = 0;
    int chunk = opts.anchor_every;  // grows while the anchor stays put
    while (stage_iters < opts.max_iters) {
      SolveOptions inner = opts;
      inner.eps_schedule.clear();
      inner.max_iters = std::min(chunk, opts.max_iters - stage_iters);
      DescentStats st = minimize_field(fp, inner, psi);
      stage_iters += std::max(st.iterations, 1);
      sol.iterations += std::max(st.iterations, 1);
      sol.energy = st.energy;
      sol.step_norm = st.step_norm;
      const size_t skip = stage_trace.empty() ? 0 : 1;
      stage_trace.insert(stage_trace.end(), st.trace.begin() + skip, st.trace.end());

      double danchor = 0.0;
      if (oblique) {
        double na;
        if (estimate_anchor(g, psi, &na)) {
          danchor = std::abs(na - anchor);
          if (danchor > 1e-14) {
            anchor = na;
            boundary_values(g, flow, jet, anchor, bc, fixed);
            project_admissible(g, *B, bc, fixed, psi);
          }
        }
      }
      if (st.converged && danchor <= 0.25 * g.h) {
        sol.converged = true;
        break;
      }
      chunk = danchor <= 0.25 * g.h ? std::min(2 * chunk, 16 * opts.anchor_every)
                                    : opts.anchor_every;
    }
    if (stage + 1 == sched.size()) sol.energy_trace = std::move(stage_trace);
    if (!std::isfinite(sol.energy)) throw std::runtime_error("minimize: energy is not finite");
  }

  sol.anchor_x = anchor;
  EnergyParams p_final(flow, jet, sched.back(), opts.quad);
  sol.phase = phase_mask(g, psi, p_final);
  sol.psi = std::move(psi);
  return sol;
}

std::vector<double> transfer_field(const Grid& from, const std::vector<double>& v,
                                   const Grid& to,
                                   const std::vector<double>& fallback) {
  if ((int64_t)v.size() != from.size() || (int64_t)fallback.size() != to.size())
    throw std::invalid_argument("transfer_field: size mismatch");
  std::vector<double> out(to.size(), 0.0);
  for (int32_t k = 0; k < to.nr; ++k)
    for (int32_t j = 0; j < to.nx; ++j) {
      const double u = (to.x(j) - from.x0) / from.h;
      const double w = (to.r(k) - from.r0) / from.h;
      int32_t js = (int32_t)std::floor(u), ks = (int32_t)std::floor(w);
      js = std::min(std::max(js, 0), from.nx - 2);
      ks = std::min(std::max(ks, 0), from.nr - 2);
      const double fx = u - js, fr = w - ks;
      double wsum = 0.0, vsum = 0.0;
      for (int dk = 0; dk <= 1; ++dk)
        for (int dj = 0; dj <= 1; ++dj) {
          const double ww = (dj ? fx : 1.0 - fx) * (dk ? fr : 1.0 - fr);
          if (ww <= 0.0 || !from.is_fluid(js + dj, ks + dk)) continue;
          wsum += ww;
          vsum += ww * v[from.idx(js + dj, ks + dk)];
        }
      out[to.idx(j, k)] = wsum > 1e-12 ? vsum / wsum : fallback[to.idx(j, k)];
    }
  return out;
}

Solution solve_cascade(const TruncatedDomain& dom, double h, const FlowSpec& flow,
                       const JetParams& jet, const SolveOptions& opts,
                       const std::vector<double>* seed) {
  std::vector<Grid> levels;
  levels.push_back(rasterize(dom, h));
  if (seed && (int64_t)seed->size() != levels[0].size())
    throw std::invalid_argument("solve_cascade: seed size mismatch");
  while (levels.size() < 4) {
    try {
      levels.push_back(rasterize(dom, 2.0 * levels.back().h));
    } catch (const std::exception&) {
      break;
    }
  }

  const double mb = std::min(flow.m1(), -flow.m2());
  Solution sol;
  for (size_t i = levels.size(); i-- > 0;) {
    const Grid& g = levels[i];
    const Barriers B = barrier_fields(g, flow);
    const std::vector<double> tr = trial_seed(g, flow, jet);
    if (i + 1 == levels.size()) {
      // anchor pass: a loose solve whose only output kept is the far-field
      // crossing, rounded to the level spacing
      std::vector<double> s0 = seed ? transfer_field(levels[0], *seed, g, tr) : tr;
      SolveOptions pre_opts = opts;
      pre_opts.eps_schedule = {mb / 4.0, mb / 10.0, mb / 50.0};
      pre_opts.tol_step = std::max(opts.tol_step, 1e-5);
      const Solution pre = minimize(g, flow, jet, pre_opts, &B, &s0);
      const double aq = std::round(pre.anchor_x / g.h) * g.h;
      const std::vector<double> canon = trial_seed(g, flow, jet, aq);
      sol = minimize(g, flow, jet, opts, &B, &canon);
      sol.iterations += pre.iterations;
    } else {
      const std::vector<double> up = transfer_field(levels[i + 1], sol.psi, g, tr);
      Solution next = minimize(g, flow, jet, opts, &B, &up);
      next.iterations += sol.iterations;
      next.converged = next.converged && sol.converged;
      sol = std::move(next);
    }
  }
  return sol;
}

ResidualStats pde_residual(const Grid& g, const std::vector<double>& psi,
                           const EnergyParams& p, int exclusion_radius) {
  const std::vector<Phase> phases = phase_mask(g, psi, p);
  ResidualStats st;
  double sum = 0.0;
  double min_sub = 0.0;
  const double h = g.h, inv_h2 = 1.0 / (h * h), inv2h = 0.5 / h;
  for (int32_t k = 1; k + 1 < g.nr; ++k) {
    const double r = g.r(k);
    if (!(r > 0.0)) continue;
    for (int32_t j = 1; j + 1 < g.nx; ++j) {
      if (g.kind_at(j, k) != NodeKind::interior) continue;
      const Phase c = phases[g.idx(j, k)];
      if (c == Phase::dry || c == Phase::band) continue;
      bool clear = true;
      for (int32_t dk = -exclusion_radius; dk <= exclusion_radius && clear; ++dk) {
        const int32_t kk = k + dk;
        if (kk < 0 || kk >= g.nr) continue;
        for (int32_t dj = -exclusion_radius; dj <= exclusion_radius; ++dj) {
          const int32_t jj = j + dj;
          if (jj < 0 || jj >= g.nx) continue;
          if (phases[g.idx(jj, kk)] != c) {
            clear = false;
            break;
          }
        }
      }
      if (!clear) continue;
      const double cpsi = psi[g.idx(j, k)];
      const double e = psi[g.idx(j + 1, k)], w = psi[g.idx(j - 1, k)];
      const double nn = psi[g.idx(j, k + 1)], s = psi[g.idx(j, k - 1)];
      const double res = (e + w + nn + s - 4.0 * cpsi) * inv_h2 - (nn - s) * inv2h / r;
      const double ares = std::abs(res);
      if (c == Phase::plateau1 || c == Phase::fluid1)
        st.max_fluid1 = std::max(st.max_fluid1, ares);
      else
        st.max_fluid2 = std::max(st.max_fluid2, ares);
      sum += ares;
      ++st.nodes;
      if (k < g.k_lid) min_sub = std::min(min_sub, res);
    }
  }
  st.mean_abs = st.nodes ? sum / st.nodes : 0.0;
  st.min_signed_sublid = min_sub;
  return st;
}

}  // namespace axijet
