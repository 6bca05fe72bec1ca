// Channel wall profiles, domain truncation and grid rasterization for the
// axially symmetric impinging-jet solver.  Coordinates are (x, r) with the
// symmetry axis at r = 0.  The left channel opens at the mouth (-1, R), the
// right channel at (+1, R); walls flare out to x -> -inf / +inf as r
// approaches the asymptotic channel radius r_inner from above.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace axijet {

enum class Side { left, right };

inline double side_sign(Side s) { return s == Side::left ? -1.0 : 1.0; }

// Parametric description of one channel wall x = f(r), r in (r_inner, R].
// Families:
//   cone  : x = sgn * (1 + L * (R - r) / (r - r_inner))
//   tanh  : x = sgn * (1 + L * atanh((R - r) / (R - r_inner)))
//   points: user-supplied polyline, monotone in r, reaching |x| >= mu
// Both built-in families satisfy f(R) = sgn and |f| -> inf as r -> r_inner+.
struct WallSpec {
  Side side = Side::left;
  std::string family = "tanh";
  double r_inner = 1.0;
  double R = 2.0;
  double length_scale = 1.0;
  std::vector<std::pair<double, double>> points;  // (r, x) for family "points"
};

// Sampled wall polyline, strictly monotone in r.  samples.front() is the
// truncation point (r_cut, +-mu), samples.back() is the mouth (R, -+1).
struct NozzleProfile {
  Side side = Side::left;
  double r_inner = 0.0;
  double R = 0.0;
  double mouth_x = 0.0;  // -1 for the left channel, +1 for the right
  double mu = 0.0;
  double r_cut = 0.0;    // radius where the wall meets the cut |x| = mu
  std::vector<std::pair<double, double>> samples;  // (r, x), r ascending

  // Piecewise-linear wall position; r must lie in [r_cut, R].
  double wall_x(double r) const;
};

NozzleProfile build_nozzle_profile(const WallSpec& spec, double mu);

// Truncated flow domain: nozzle interiors cut at x = -+mu, upper half plane
// capped at the numerical far-field radius r_top.
struct TruncatedDomain {
  NozzleProfile left;
  NozzleProfile right;
  double mu = 0.0;
  double R = 0.0;
  double r_top = 0.0;

  double r_cut(Side s) const { return s == Side::left ? left.r_cut : right.r_cut; }
};

TruncatedDomain build_truncated_domain(const WallSpec& left_spec,
                                       const WallSpec& right_spec,
                                       double mu, double r_top);

// Coarse per-node classification exposed to diagnostics and dumps.
enum class NodeMask : uint8_t {
  outside = 0,
  interior,
  wall,        // channel walls and their horizontal continuations at r = R
  axis,
  inlet_left,
  inlet_right,
  top,         // numerical far-field cut: top row and side columns above R
};

// Finer classification used to build Dirichlet data.
enum class NodeKind : uint8_t {
  outside = 0,
  interior,
  axis,
  wall_left,
  wall_right,
  inlet_left,
  inlet_right,
  cut_left,
  cut_right,
  cut_top,
  cut_bottom,  // only on box harness grids with r0 > 0
};

NodeMask mask_of(NodeKind k);

// Contiguous fluid column range of one node row: columns [jlo, jhi] inclusive.
struct RowSpan {
  int32_t jlo = 0;
  int32_t jhi = -1;
  bool empty() const { return jhi < jlo; }
};

// Uniform node-centered grid over [-mu, mu] x [0, r_top].  Nodes are indexed
// (j, k) with x = -mu + j*h, r = k*h.  Fluid nodes per row form one
// contiguous span, hence cells (quads of four fluid nodes) do as well.
struct Grid {
  double h = 0.0;
  int32_t nx = 0;  // number of node columns
  int32_t nr = 0;  // number of node rows
  double x0 = 0.0;
  double r0 = 0.0;  // radius of row 0 (zero for rasterized domains)
  double mu = 0.0;
  double R = 0.0;
  double r_top = 0.0;
  int32_t k_lid = 0;      // row index of r = R
  int32_t j_mouth_l = 0;  // column of x = -1
  int32_t j_mouth_r = 0;  // column of x = +1
  double r_cut_l = 0.0;   // staircase radii of the truncation columns, the
  double r_cut_r = 0.0;   // channel radius the inlet data should match

  std::vector<NodeKind> kind;        // nx*nr
  std::vector<RowSpan> node_span;    // per node row: fluid columns
  std::vector<RowSpan> cell_span;    // per cell row k: active cells j in span

  int64_t idx(int32_t j, int32_t k) const { return int64_t(k) * nx + j; }
  double x(int32_t j) const { return x0 + h * j; }
  double r(int32_t k) const { return r0 + h * k; }
  int64_t size() const { return int64_t(nx) * nr; }

  NodeKind kind_at(int32_t j, int32_t k) const { return kind[idx(j, k)]; }
  NodeMask mask_at(int32_t j, int32_t k) const { return mask_of(kind_at(j, k)); }
  bool is_fluid(int32_t j, int32_t k) const { return kind_at(j, k) != NodeKind::outside; }
  bool is_dirichlet(int32_t j, int32_t k) const {
    NodeKind q = kind_at(j, k);
    return q != NodeKind::outside && q != NodeKind::interior;
  }

  int64_t count_fluid() const;
  int64_t count_cells() const;
};

// Node-rounded rasterization of the truncated domain.  Requires h to divide
// mu, R, r_top and the mouth offset (mu - 1) to within rounding, and at least
// 8 cells across the narrower channel radius.
Grid rasterize(const TruncatedDomain& dom, double h);

// Plain rectangular grid [x0, x1] x [r0, r1], all interior except the four
// Dirichlet edges.  Used by straight-pipe oracles and unit tests.
Grid make_box_grid(double x0, double x1, double r0, double r1, double h);

}  // namespace axijet
