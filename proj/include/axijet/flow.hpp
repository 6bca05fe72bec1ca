// Physical data of the two-jet problem and the reduced parameters of the
// variational functional.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace axijet {

// Prescribed fluxes and densities.  M1 > 0 flows in from the left channel,
// M2 < 0 from the right one; Lambda = 2(rho1 B1 - rho2 B2) >= 0 is the
// Bernoulli-constant mismatch.  The scaled stream function runs between
// m2 = M2/(2 pi sqrt(rho2)) < 0 and m1 = M1/(2 pi sqrt(rho1)) > 0.
struct FlowSpec {
  double M1 = 2.0 * std::numbers::pi;
  double M2 = -2.0 * std::numbers::pi;
  double rho1 = 1.0;
  double rho2 = 1.0;
  double Lambda = 0.0;
  double P_atm = 0.0;

  double m1() const { return M1 / (2.0 * std::numbers::pi * std::sqrt(rho1)); }
  double m2() const { return M2 / (2.0 * std::numbers::pi * std::sqrt(rho2)); }

  void validate() const {
    if (!(M1 > 0.0)) throw std::invalid_argument("flow: M1 must be positive");
    if (!(M2 < 0.0)) throw std::invalid_argument("flow: M2 must be negative");
    if (!(rho1 > 0.0) || !(rho2 > 0.0))
      throw std::invalid_argument("flow: densities must be positive");
    if (Lambda < 0.0) throw std::invalid_argument("flow: Lambda must be nonnegative");
  }
};

// Free parameters fixed by the continuous-fit search: lambda scales the jet
// speeds (sqrt(Lambda+lambda) on the left fluid, sqrt(lambda) on the right),
// theta in [0, pi] is the direction of the outgoing jet.
struct JetParams {
  double lambda = 1.0;
  double theta = 0.5 * std::numbers::pi;

  void validate() const {
    if (lambda < 0.0) throw std::invalid_argument("params: lambda must be nonnegative");
    if (theta < 0.0 || theta > std::numbers::pi)
      throw std::invalid_argument("params: theta must lie in [0, pi]");
  }
};

}  // namespace axijet
