#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <queue>

#include "axijet/geometry.hpp"

using namespace axijet;

namespace {

WallSpec tanh_wall(Side s, double r_inner = 1.0, double R = 2.0, double L = 1.0) {
  WallSpec w;
  w.side = s;
  w.family = "tanh";
  w.r_inner = r_inner;
  w.R = R;
  w.length_scale = L;
  return w;
}

// Oracle: locate the truncation radius by bisecting the sampled polyline
// instead of inverting the family formula.
double r_cut_by_bisection(const NozzleProfile& p, double mu) {
  double lo = p.samples.front().first, hi = p.R;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (std::abs(p.wall_x(mid)) >= mu)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Membership predicate straight from the analytic wall families; used by the
// flood-fill oracle, independent of the rasterizer.
struct Membership {
  const TruncatedDomain& dom;
  bool operator()(double x, double r) const {
    if (r < 0.0 || r > dom.r_top || std::abs(x) > dom.mu) return false;
    if (r >= dom.R) return true;
    double xl = (r <= dom.left.r_cut) ? -dom.mu : dom.left.wall_x(r);
    double xr = (r <= dom.right.r_cut) ? dom.mu : dom.right.wall_x(r);
    return x >= xl && x <= xr;
  }
};

}  // namespace

TEST_CASE("tanh family wall matches the closed-form profile") {
  auto p = build_nozzle_profile(tanh_wall(Side::left), 8.0);
  // f1(1.5) = -(1 + atanh(0.5)) for r1=1, R=2, L=1
  double expect = -(1.0 + std::atanh(0.5));
  CHECK(p.wall_x(1.5) == doctest::Approx(expect).epsilon(1e-8));
  CHECK(p.wall_x(2.0) == doctest::Approx(-1.0));
  CHECK(p.mouth_x == -1.0);
  // strictly monotone samples in r and x
  for (size_t i = 1; i < p.samples.size(); ++i) {
    CHECK(p.samples[i].first > p.samples[i - 1].first);
    CHECK(p.samples[i].second > p.samples[i - 1].second);
  }
}

TEST_CASE("cone family blows up toward r_inner and hits the mouth") {
  WallSpec w = tanh_wall(Side::right);
  w.family = "cone";
  auto p = build_nozzle_profile(w, 8.0);
  CHECK(p.wall_x(2.0) == doctest::Approx(1.0));
  // cone: x = 1 + (R-r)/(r-r1); at r=1.5: 1 + 0.5/0.5 = 2
  CHECK(p.wall_x(1.5) == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(p.r_cut > p.r_inner);
  // wall meets the cut where the formula says: 1 + (2-r)/(r-1) = 8 -> r = 9/8
  CHECK(p.r_cut == doctest::Approx(9.0 / 8.0).epsilon(1e-9));
}

TEST_CASE("truncation radius agrees with the polyline bisection oracle") {
  const double mu = 6.0;
  auto p = build_nozzle_profile(tanh_wall(Side::left), mu);
  // closed form: r_cut = R - (R - r1) tanh(mu - 1)
  double closed = 2.0 - std::tanh(5.0);
  CHECK(p.r_cut == doctest::Approx(closed).epsilon(1e-10));
  CHECK(r_cut_by_bisection(p, mu) == doctest::Approx(p.r_cut).epsilon(1e-7));
  CHECK(std::abs(p.samples.front().second) == doctest::Approx(mu));
}

TEST_CASE("points family is clipped at the cut and validated") {
  WallSpec w;
  w.side = Side::right;
  w.family = "points";
  w.R = 2.0;
  w.r_inner = 1.0;
  w.points = {{1.05, 9.0}, {1.5, 3.0}, {2.0, 1.0}};
  auto p = build_nozzle_profile(w, 8.0);
  CHECK(p.samples.front().second == doctest::Approx(8.0));
  // linear segment between (1.05, 9) and (1.5, 3): x=8 at r = 1.05 + 0.45/6
  CHECK(p.r_cut == doctest::Approx(1.05 + 0.45 / 6.0).epsilon(1e-12));

  WallSpec bad = w;
  bad.points = {{1.5, 3.0}, {2.0, 1.0}};  // never reaches x = 8
  CHECK_THROWS_AS(build_nozzle_profile(bad, 8.0), std::invalid_argument);
}

TEST_CASE("domain construction rejects a shallow far-field cap") {
  CHECK_THROWS_AS(build_truncated_domain(tanh_wall(Side::left), tanh_wall(Side::right), 8.0, 3.9),
                  std::invalid_argument);
}

TEST_CASE("rasterized node count matches area and flood fill oracles") {
  auto dom = build_truncated_domain(tanh_wall(Side::left), tanh_wall(Side::right), 8.0, 12.0);
  const double h = 0.0625;  // R/32
  auto g = rasterize(dom, h);

  CHECK(g.nx == 257);
  CHECK(g.nr == 193);
  CHECK(g.k_lid == 32);
  CHECK(g.r(g.k_lid) == doctest::Approx(2.0));

  // analytic area of the truncated domain
  Membership inside{dom};
  double area = 2.0 * dom.mu * (dom.r_top - dom.R);
  const int nq = 200000;
  double below = 0.0;
  for (int i = 0; i < nq; ++i) {
    double r = dom.R * (i + 0.5) / nq;
    double xl = (r <= dom.left.r_cut) ? -dom.mu : dom.left.wall_x(r);
    double xr = (r <= dom.right.r_cut) ? dom.mu : dom.right.wall_x(r);
    below += (xr - xl) * (dom.R / nq);
  }
  area += below;

  double perimeter = 2.0 * (2.0 * dom.mu + dom.r_top) + 4.0 * (dom.mu + dom.R);  // generous bound
  double fluid = double(g.count_fluid());
  CHECK(std::abs(fluid - area / (h * h)) <= 3.0 * perimeter / h);

  // flood fill from the domain center using the analytic membership test
  std::vector<char> seen(g.size(), 0);
  std::queue<std::pair<int, int>> q;
  q.emplace(g.nx / 2, g.nr / 2);
  seen[g.idx(g.nx / 2, g.nr / 2)] = 1;
  int64_t filled = 0;
  while (!q.empty()) {
    auto [j, k] = q.front();
    q.pop();
    ++filled;
    const int dj[4] = {1, -1, 0, 0}, dk[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      int jj = j + dj[d], kk = k + dk[d];
      if (jj < 0 || jj >= g.nx || kk < 0 || kk >= g.nr) continue;
      if (seen[g.idx(jj, kk)]) continue;
      if (!inside(g.x(jj), g.r(kk))) continue;
      seen[g.idx(jj, kk)] = 1;
      q.emplace(jj, kk);
    }
  }
  CHECK(std::abs(double(filled) - fluid) <= 3.0 * perimeter / h);
}

TEST_CASE("node tags partition the grid and sit on the right segments") {
  auto dom = build_truncated_domain(tanh_wall(Side::left), tanh_wall(Side::right), 8.0, 12.0);
  const double h = 0.0625;
  auto g = rasterize(dom, h);

  // axis row: every node between the inlets is tagged axis with r = 0
  for (int32_t j = 0; j < g.nx; ++j) CHECK(g.kind_at(j, 0) == NodeKind::axis);
  // top row tagged as far-field cut
  for (int32_t j = 0; j < g.nx; ++j) CHECK(g.kind_at(j, g.nr - 1) == NodeKind::cut_top);
  // side cuts above the lid
  for (int32_t k = g.k_lid + 1; k < g.nr - 1; ++k) {
    CHECK(g.kind_at(0, k) == NodeKind::cut_left);
    CHECK(g.kind_at(g.nx - 1, k) == NodeKind::cut_right);
  }
  // mouth nodes are wall nodes; the lid between the mouths is interior
  CHECK(g.kind_at(g.j_mouth_l, g.k_lid) == NodeKind::wall_left);
  CHECK(g.kind_at(g.j_mouth_r, g.k_lid) == NodeKind::wall_right);
  CHECK(g.kind_at((g.j_mouth_l + g.j_mouth_r) / 2, g.k_lid) == NodeKind::interior);

  // wall nodes lie within h of the wall polyline (or on the r = R rays)
  for (int32_t k = 1; k < g.k_lid; ++k) {
    for (int32_t j = 0; j < g.nx; ++j) {
      NodeKind kd = g.kind_at(j, k);
      if (kd != NodeKind::wall_left && kd != NodeKind::wall_right) continue;
      const NozzleProfile& p = (kd == NodeKind::wall_left) ? dom.left : dom.right;
      double dmin = 1e30;
      double r = g.r(k), x = g.x(j);
      for (const auto& [rr, xx] : p.samples) dmin = std::min(dmin, std::hypot(xx - x, rr - r));
      CHECK(dmin <= h * 1.0 + 1e-6);
    }
  }

  // every fluid row is one contiguous span, cells likewise
  for (int32_t k = 0; k < g.nr; ++k) {
    auto s = g.node_span[k];
    for (int32_t j = 0; j < g.nx; ++j) {
      bool in_span = (j >= s.jlo && j <= s.jhi);
      CHECK(g.is_fluid(j, k) == in_span);
    }
  }
  CHECK(g.count_cells() > 0);
}

TEST_CASE("rasterize validates grid spacing") {
  auto dom = build_truncated_domain(tanh_wall(Side::left), tanh_wall(Side::right), 8.0, 12.0);
  CHECK_THROWS_AS(rasterize(dom, 0.3), std::invalid_argument);   // does not divide extents
  CHECK_THROWS_AS(rasterize(dom, 0.25), std::invalid_argument);  // coarser than 8 cells per radius
  CHECK_NOTHROW(rasterize(dom, 0.125));
}
