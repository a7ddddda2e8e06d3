#include "snlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

#include "snlab/errors.hpp"

namespace snlab {

QuadResult integrate_gk(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_depth) {
  QuadResult r;
  double l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, static_cast<unsigned>(max_depth), rel_tol, &r.error_estimate,
      &l1);
  r.converged = r.error_estimate <= rel_tol * std::max(l1, 1e-300) * 10.0 ||
                r.error_estimate == 0.0;
  return r;
}

QuadResult integrate_power_singular(const std::function<double(double)>& g,
                                    double beta, double rel_tol) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw DomainError("singular exponent must lie in [0,1)");
  const double q = 1.0 - beta;
  const double p = 1.0 / q;
  auto h = [&](double s) { return g(std::pow(s, p)) * p; };
  return integrate_gk(h, 0.0, 1.0, rel_tol);
}

}  // namespace snlab
