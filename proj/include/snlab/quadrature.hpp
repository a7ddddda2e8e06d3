#pragma once

#include <functional>

namespace snlab {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

// Adaptive 15-point Gauss-Kronrod on [a, b] with relative tolerance.
QuadResult integrate_gk(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-12, int max_depth = 15);

// Integral over [0,1] of g(t) t^(-beta), beta in [0,1), computed after the
// substitution t = s^(1/(1-beta)) which removes the endpoint singularity.
QuadResult integrate_power_singular(const std::function<double(double)>& g,
                                    double beta, double rel_tol = 1e-12);

}  // namespace snlab
