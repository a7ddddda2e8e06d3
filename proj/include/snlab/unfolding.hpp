#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "snlab/gamma_kit.hpp"
#include "snlab/nonlinearity.hpp"

namespace snlab {

// 1/eps = N + alpha with 0 < alpha < 1. alpha and 1 - alpha are both stored
// so that either resonance side keeps full relative precision.
class UnfoldingContext {
 public:
  static constexpr double kResonanceGuard = 1e-8;

  // Rejects |1/eps - round(1/eps)| <= kResonanceGuard.
  static UnfoldingContext from_eps(double eps, double a_eps = 0.0);
  // Exact fractional part; only 0 < alpha < 1 is required.
  static UnfoldingContext from_N_alpha(int N, double alpha, double a_eps = 0.0);
  // Same, with 1 - alpha given directly.
  static UnfoldingContext from_N_one_minus_alpha(int N, double one_minus_alpha,
                                                 double a_eps = 0.0);

  double eps() const { return eps_; }
  double inv_eps() const { return N_ + alpha_; }
  int N() const { return N_; }
  double alpha() const { return alpha_; }
  double one_minus_alpha() const { return alpha_c_; }
  double a() const { return a_; }

  UnfoldingContext with_a(double a) const;

  // 1 - eps k evaluated without cancellation.
  double small_divisor(int k) const;
  // 1/eps - k as (integer part, fractional offset) summed exactly enough.
  // Gamma(k + 1 - 1/eps) argument for k >= N: (k - N) + (1 - alpha).
  double shifted_above(int k) const { return (k - N_) + alpha_c_; }

 private:
  UnfoldingContext(int N, double alpha, double alpha_c, double a);
  int N_ = 1;
  double alpha_ = 0.5;
  double alpha_c_ = 0.5;
  double eps_ = 1.0 / 1.5;
  double a_ = 0.0;
};

SignedLogValue wbar(const UnfoldingContext& ctx, int k);

// Scaled weak-stable manifold ybar = sum mbar_k xbar^k, k = 2..K.
struct WeakManifoldExpansion {
  UnfoldingContext ctx = UnfoldingContext::from_N_alpha(1, 0.5);
  int K = 0;
  std::vector<SignedLogValue> mbar;  // indexed by k
  std::vector<double> Sbar;          // indexed by k
  std::vector<std::string> warnings;

  double mbar_value(int k) const { return mbar[static_cast<size_t>(k)].to_double(); }
};

WeakManifoldExpansion weak_manifold_coeffs(const NonlinearitySpec& spec,
                                           const UnfoldingContext& ctx, int K);

// The toy node xdot = -eps x, ydot = -y + u(x) in the same scaled variables:
// mbar_k = eps^(k-1) u_k / (1 - eps k).
WeakManifoldExpansion baby_weak_coeffs(const std::vector<double>& u,
                                       const UnfoldingContext& ctx, int K);

// Sbar at k = N.
double sbar_at_resonance_edge(const NonlinearitySpec& spec,
                              const UnfoldingContext& ctx);

double eval_Vbar(const UnfoldingContext& ctx, double xbar, double tol = 1e-14);
double eval_Ubar(const UnfoldingContext& ctx, double xbar, double tol = 1e-14);

// Leading-order expression of Vbar at xbar = eps * xbar2, |xbar2| <= delta2.
double eval_Vbar_asymptotic(const UnfoldingContext& ctx, double xbar2,
                            double delta2 = 1.0);

double T_monomial_series(const UnfoldingContext& ctx, double xbar,
                         double tol = 1e-14);
double T_monomial_quadrature(const UnfoldingContext& ctx, double xbar,
                             double delta2 = 1.0);

// sigma(xbar) = 1 for xbar <= delta2 eps, (delta2 eps / xbar)^(1-alpha) above.
double sigma_eps(const UnfoldingContext& ctx, double xbar, double delta2 = 1.0);

struct MajorantDiag {
  double Q4 = 0.0;
  double P4 = 0.0;
  double max_violation = 0.0;
};

MajorantDiag weight_majorant_diag(const UnfoldingContext& ctx);

// sup over 2 <= k <= N-1 of |mbar_k| / |wbar_k|.
double weighted_sup(const WeakManifoldExpansion& e);

void write_unfold_csv(std::ostream& os, const WeakManifoldExpansion& e);

}  // namespace snlab
