#pragma once

#include <ostream>
#include <vector>

#include "snlab/gamma_kit.hpp"
#include "snlab/nonlinearity.hpp"
#include "snlab/series.hpp"

namespace snlab {

// Center-manifold coefficients at eps = 0. Vectors are indexed by k and
// entries 0, 1 are unused.
struct CenterManifoldData {
  double a0 = 0.0;
  int K = 0;
  std::vector<SignedLogValue> m;
  std::vector<double> S;
  std::vector<double> increment;
  double S_infty_estimate = 0.0;
  double residual = 0.0;

  // m_k as a double; may overflow to +-inf for large k.
  double m_value(int k) const { return m[static_cast<size_t>(k)].to_double(); }
  TruncatedSeries m_series() const;
};

CenterManifoldData center_coeffs(const NonlinearitySpec& spec, int K = 120);

struct SInftyEstimate {
  double value = 0.0;
  int k_used = 0;
  double residual = 0.0;
  bool converged = false;
};

SInftyEstimate estimate_S_infty(const NonlinearitySpec& spec, int K = 120,
                                double tol = 1e-12);

struct LinearCase {
  std::vector<double> S;
  std::vector<SignedLogValue> m;
};

// Closed form for g independent of y; f indexed by power.
LinearCase linear_case_S(const std::vector<double>& f, double a0, int K);

// sup_k |y_k| / Gamma(k + a0).
double gevrey_norm(const TruncatedSeries& y, double a0);

// Fit of |S_k - S_{k-1}| ~ c rho^k over k in [k_lo, K]; returns rho.
double increment_decay_rate(const CenterManifoldData& d, int k_lo);

void write_center_csv(std::ostream& os, const CenterManifoldData& d);

}  // namespace snlab
