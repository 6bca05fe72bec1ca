#include "axijet/linear.hpp"

#include <cmath>
#include <cstring>

namespace axijet {

namespace {

double dot_masked(const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<uint8_t>& mask) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    if (mask[i]) s += a[i] * b[i];
  return s;
}

}  // namespace

PcgResult pcg_stiffness(const Grid& g, const CellRows& cr,
                        const std::vector<uint8_t>& free_mask,
                        const double* rhs, std::vector<double>& psi,
                        double rel_tol, int max_iter) {
  const size_t n = psi.size();
  std::vector<double> diag(n, 0.0);
  stiffness_diagonal(g, cr, diag);

  std::vector<double> res(n, 0.0), z(n, 0.0), p(n, 0.0), ap(n, 0.0);

  apply_stiffness(g, cr, psi, ap);
  double rhs_norm2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (!free_mask[i]) continue;
    const double b = rhs ? rhs[i] : 0.0;
    res[i] = b - ap[i];
    rhs_norm2 += b * b;
  }
  // fall back to the initial residual when the rhs is zero
  double ref2 = rhs_norm2;
  if (ref2 == 0.0) ref2 = dot_masked(res, res, free_mask);
  const double stop2 = rel_tol * rel_tol * ref2;

  PcgResult out;
  double rz = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double rr = dot_masked(res, res, free_mask);
    out.residual = std::sqrt(rr);
    out.iterations = it;
    if (rr <= stop2 || rr == 0.0) {
      out.converged = true;
      return out;
    }
    for (size_t i = 0; i < n; ++i)
      z[i] = free_mask[i] ? res[i] / std::max(diag[i], 1e-300) : 0.0;
    const double rz_new = dot_masked(res, z, free_mask);
    if (it == 0) {
      p = z;
    } else {
      const double beta = rz_new / rz;
      for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rz = rz_new;
    apply_stiffness(g, cr, p, ap);
    double pap = dot_masked(p, ap, free_mask);
    if (pap <= 0.0) break;  // stiffness is PSD; null direction, stop
    const double alpha = rz / pap;
    for (size_t i = 0; i < n; ++i) {
      if (!free_mask[i]) continue;
      psi[i] += alpha * p[i];
      res[i] -= alpha * ap[i];
    }
  }
  out.residual = std::sqrt(dot_masked(res, res, free_mask));
  return out;
}

}  // namespace axijet
