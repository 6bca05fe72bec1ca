#include "axijet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace axijet {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Inverse of the wall families: radius of the wall at |x| = a (a >= 1).
double family_radius(const WallSpec& s, double a) {
  if (s.family == "cone") {
    double t = (a - 1.0) / s.length_scale;
    return (s.R + t * s.r_inner) / (1.0 + t);
  }
  // tanh
  double t = std::tanh((a - 1.0) / s.length_scale);
  return s.R - (s.R - s.r_inner) * t;
}

bool near_integer(double t) { return std::abs(t - std::round(t)) < 1e-9 * std::max(1.0, std::abs(t)); }

}  // namespace

double NozzleProfile::wall_x(double r) const {
  double rlo = samples.front().first;
  double rhi = samples.back().first;
  if (r < rlo - 1e-12 || r > rhi + 1e-12)
    throw std::out_of_range("wall_x: radius outside the sampled wall range");
  r = std::clamp(r, rlo, rhi);
  auto it = std::lower_bound(samples.begin(), samples.end(), r,
                             [](const std::pair<double, double>& s, double v) { return s.first < v; });
  if (it == samples.begin()) return it->second;
  if (it == samples.end()) return samples.back().second;
  auto [r1, x1] = *(it - 1);
  auto [r2, x2] = *it;
  double w = (r - r1) / (r2 - r1);
  return x1 + w * (x2 - x1);
}

NozzleProfile build_nozzle_profile(const WallSpec& spec, double mu) {
  if (spec.r_inner <= 0.0) fail("wall: r_inner must be positive");
  if (spec.R <= spec.r_inner) fail("wall: R must exceed r_inner");
  if (mu <= 1.0) fail("wall: mu must exceed the mouth offset 1");

  const double sgn = side_sign(spec.side);
  NozzleProfile p;
  p.side = spec.side;
  p.r_inner = spec.r_inner;
  p.R = spec.R;
  p.mouth_x = sgn;
  p.mu = mu;

  if (spec.family == "cone" || spec.family == "tanh") {
    if (spec.length_scale <= 0.0) fail("wall: length_scale must be positive");
    // Sample uniformly in |x| (resolves the flare near r_inner) and in r
    // (resolves the mouth region), then merge.
    const int nxs = 4096, nrs = 2048;
    std::vector<std::pair<double, double>> pts;
    pts.reserve(nxs + nrs + 2);
    for (int i = 0; i <= nxs; ++i) {
      double a = 1.0 + (mu - 1.0) * double(i) / nxs;
      pts.emplace_back(family_radius(spec, a), sgn * a);
    }
    p.r_cut = family_radius(spec, mu);
    for (int i = 1; i < nrs; ++i) {
      double r = p.r_cut + (spec.R - p.r_cut) * double(i) / nrs;
      // invert r -> a for the sample's x value
      double a;
      if (spec.family == "cone") {
        a = 1.0 + spec.length_scale * (spec.R - r) / (r - spec.r_inner);
      } else {
        a = 1.0 + spec.length_scale * std::atanh((spec.R - r) / (spec.R - spec.r_inner));
      }
      if (a <= mu) pts.emplace_back(r, sgn * a);
    }
    std::sort(pts.begin(), pts.end());
    for (auto& q : pts) {
      if (p.samples.empty() || q.first > p.samples.back().first + 1e-13)
        p.samples.push_back(q);
    }
  } else if (spec.family == "points") {
    if (spec.points.size() < 2) fail("wall: points family needs at least 2 samples");
    auto pts = spec.points;
    std::sort(pts.begin(), pts.end());
    for (size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].first <= pts[i - 1].first) fail("wall: point radii must be strictly increasing");
      // weakly monotone so vertical wall segments (constant x) are allowed
      if (sgn * pts[i].second > sgn * pts[i - 1].second)
        fail("wall: point polyline must approach the mouth monotonically");
    }
    if (std::abs(pts.back().first - spec.R) > 1e-9 || std::abs(pts.back().second - sgn) > 1e-9)
      fail("wall: point polyline must end at the mouth");
    if (sgn * pts.front().second < mu)
      fail("wall: point polyline must reach the truncation cut |x| = mu");
    // clip at |x| = mu
    size_t i0 = 0;
    while (sgn * pts[i0 + 1].second >= mu) ++i0;
    auto [r1, x1] = pts[i0];
    auto [r2, x2] = pts[i0 + 1];
    double w = (mu - sgn * x1) / (sgn * x2 - sgn * x1);
    p.r_cut = r1 + w * (r2 - r1);
    p.samples.emplace_back(p.r_cut, sgn * mu);
    for (size_t i = i0 + 1; i < pts.size(); ++i) p.samples.push_back(pts[i]);
    if (p.r_cut <= 0.0) fail("wall: truncation point below the axis");
  } else {
    fail("wall: unknown family '" + spec.family + "'");
  }
  return p;
}

TruncatedDomain build_truncated_domain(const WallSpec& left_spec,
                                       const WallSpec& right_spec,
                                       double mu, double r_top) {
  if (left_spec.side != Side::left || right_spec.side != Side::right)
    fail("domain: wall sides must be (left, right)");
  if (std::abs(left_spec.R - right_spec.R) > 1e-12)
    fail("domain: both mouths must sit at the same height R");
  TruncatedDomain d;
  d.left = build_nozzle_profile(left_spec, mu);
  d.right = build_nozzle_profile(right_spec, mu);
  d.mu = mu;
  d.R = left_spec.R;
  d.r_top = r_top;
  if (r_top <= 2.0 * d.R) fail("domain: r_top must exceed 2R");
  return d;
}

NodeMask mask_of(NodeKind k) {
  switch (k) {
    case NodeKind::outside: return NodeMask::outside;
    case NodeKind::interior: return NodeMask::interior;
    case NodeKind::axis: return NodeMask::axis;
    case NodeKind::wall_left:
    case NodeKind::wall_right: return NodeMask::wall;
    case NodeKind::inlet_left: return NodeMask::inlet_left;
    case NodeKind::inlet_right: return NodeMask::inlet_right;
    case NodeKind::cut_left:
    case NodeKind::cut_right:
    case NodeKind::cut_top:
    case NodeKind::cut_bottom: return NodeMask::top;
  }
  return NodeMask::outside;
}

int64_t Grid::count_fluid() const {
  int64_t n = 0;
  for (auto k : kind)
    if (k != NodeKind::outside) ++n;
  return n;
}

int64_t Grid::count_cells() const {
  int64_t n = 0;
  for (const auto& s : cell_span)
    if (!s.empty()) n += s.jhi - s.jlo + 1;
  return n;
}

Grid rasterize(const TruncatedDomain& dom, double h) {
  if (h <= 0.0) fail("rasterize: h must be positive");
  if (!near_integer(2.0 * dom.mu / h) || !near_integer(dom.r_top / h) ||
      !near_integer(dom.R / h) || !near_integer((dom.mu - 1.0) / h))
    fail("rasterize: h must divide the domain extents and the mouth offset");
  double rmin = std::min(dom.left.r_inner, dom.right.r_inner);
  if (rmin / h < 8.0 - 1e-9)
    fail("rasterize: h too coarse, need at least 8 cells across the channel radius");

  Grid g;
  g.h = h;
  g.mu = dom.mu;
  g.R = dom.R;
  g.r_top = dom.r_top;
  g.x0 = -dom.mu;
  g.nx = int32_t(std::llround(2.0 * dom.mu / h)) + 1;
  g.nr = int32_t(std::llround(dom.r_top / h)) + 1;
  g.k_lid = int32_t(std::llround(dom.R / h));
  g.j_mouth_l = int32_t(std::llround((dom.mu - 1.0) / h));
  g.j_mouth_r = int32_t(std::llround((dom.mu + 1.0) / h));
  g.kind.assign(g.size(), NodeKind::outside);
  g.node_span.assign(g.nr, RowSpan{});

  auto wall_col = [&](const NozzleProfile& p, double r) {
    return int32_t(std::floor((p.wall_x(r) + dom.mu) / h + 0.5));
  };

  for (int32_t k = 0; k < g.nr; ++k) {
    double r = g.r(k);
    int32_t jl = 0, jr = g.nx - 1;
    if (k < g.k_lid) {
      if (r > dom.left.r_cut) jl = wall_col(dom.left, r);
      if (r > dom.right.r_cut) jr = wall_col(dom.right, r);
    }
    g.node_span[k] = RowSpan{jl, jr};
    for (int32_t j = jl; j <= jr; ++j) g.kind[g.idx(j, k)] = NodeKind::interior;

    if (k == 0) {
      for (int32_t j = jl; j <= jr; ++j) g.kind[g.idx(j, k)] = NodeKind::axis;
    } else if (k < g.k_lid) {
      if (jl == 0 && r <= dom.left.r_cut)
        g.kind[g.idx(0, k)] = NodeKind::inlet_left;
      else
        g.kind[g.idx(jl, k)] = NodeKind::wall_left;
      if (jr == g.nx - 1 && r <= dom.right.r_cut)
        g.kind[g.idx(jr, k)] = NodeKind::inlet_right;
      else
        g.kind[g.idx(jr, k)] = NodeKind::wall_right;
    } else if (k == g.k_lid) {
      for (int32_t j = 0; j <= g.j_mouth_l; ++j) g.kind[g.idx(j, k)] = NodeKind::wall_left;
      for (int32_t j = g.j_mouth_r; j < g.nx; ++j) g.kind[g.idx(j, k)] = NodeKind::wall_right;
    } else if (k == g.nr - 1) {
      for (int32_t j = 0; j < g.nx; ++j) g.kind[g.idx(j, k)] = NodeKind::cut_top;
    } else {
      g.kind[g.idx(0, k)] = NodeKind::cut_left;
      g.kind[g.idx(g.nx - 1, k)] = NodeKind::cut_right;
    }
  }

  // Close the wall staircase: interior nodes bordering an excluded node act
  // as wall nodes, otherwise steep wall segments would leak a natural
  // boundary condition through the steps.
  for (int32_t k = 1; k < g.k_lid; ++k) {
    for (int32_t j = g.node_span[k].jlo; j <= g.node_span[k].jhi; ++j) {
      if (g.kind[g.idx(j, k)] != NodeKind::interior) continue;
      bool exposed = (j > 0 && g.kind[g.idx(j - 1, k)] == NodeKind::outside) ||
                     (j < g.nx - 1 && g.kind[g.idx(j + 1, k)] == NodeKind::outside) ||
                     g.kind[g.idx(j, k - 1)] == NodeKind::outside ||
                     g.kind[g.idx(j, k + 1)] == NodeKind::outside;
      if (exposed)
        g.kind[g.idx(j, k)] = g.x(j) < 0.0 ? NodeKind::wall_left : NodeKind::wall_right;
    }
  }

  // The truncation columns see a staircase wall sitting on a grid row, not
  // the exact profile radius. Record the staircase radii so the inlet data
  // matches the channel the solver actually resolves.
  g.r_cut_l = 0.0;
  g.r_cut_r = 0.0;
  for (int32_t k = 1; k < g.k_lid; ++k) {
    if (g.kind[g.idx(0, k)] == NodeKind::inlet_left) g.r_cut_l = g.r(k);
    if (g.kind[g.idx(g.nx - 1, k)] == NodeKind::inlet_right) g.r_cut_r = g.r(k);
  }
  if (g.r_cut_l <= 0.0 || g.r_cut_r <= 0.0)
    fail("rasterize: truncation column carries no inlet nodes");

  g.cell_span.assign(g.nr - 1, RowSpan{});
  for (int32_t k = 0; k + 1 < g.nr; ++k) {
    int32_t lo = std::max(g.node_span[k].jlo, g.node_span[k + 1].jlo);
    int32_t hi = std::min(g.node_span[k].jhi, g.node_span[k + 1].jhi) - 1;
    g.cell_span[k] = RowSpan{lo, hi};
  }
  return g;
}

Grid make_box_grid(double x0, double x1, double r0, double r1, double h) {
  if (!(h > 0.0) || !(x1 > x0) || !(r1 > r0) || r0 < 0.0)
    fail("box grid: bad extents");
  if (!near_integer((x1 - x0) / h) || !near_integer((r1 - r0) / h))
    fail("box grid: h must divide the extents");
  Grid g;
  g.h = h;
  g.x0 = x0;
  g.r0 = r0;
  g.nx = int32_t(std::llround((x1 - x0) / h)) + 1;
  g.nr = int32_t(std::llround((r1 - r0) / h)) + 1;
  g.mu = 0.5 * (x1 - x0);
  g.R = r1;
  g.r_top = r1;
  g.k_lid = g.nr - 1;
  g.kind.assign(g.size(), NodeKind::interior);
  g.node_span.assign(g.nr, RowSpan{0, g.nx - 1});
  for (int32_t k = 0; k < g.nr; ++k) {
    g.kind[g.idx(0, k)] = NodeKind::cut_left;
    g.kind[g.idx(g.nx - 1, k)] = NodeKind::cut_right;
  }
  for (int32_t j = 0; j < g.nx; ++j) {
    g.kind[g.idx(j, g.nr - 1)] = NodeKind::cut_top;
    g.kind[g.idx(j, 0)] = (r0 == 0.0) ? NodeKind::axis : NodeKind::cut_bottom;
  }
  g.cell_span.assign(g.nr - 1, RowSpan{0, g.nx - 2});
  return g;
}

}  // namespace axijet
