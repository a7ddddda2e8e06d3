#include <doctest.h>

#include <cmath>
#include <sstream>

#include "snlab/center_manifold.hpp"
#include "snlab/errors.hpp"
#include "snlab/nonlinearity.hpp"

using namespace snlab;

namespace {

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b, size_t n) {
  std::vector<double> c(n + 1, 0.0);
  for (size_t i = 0; i < a.size() && i <= n; ++i)
    for (size_t j = 0; j < b.size() && i + j <= n; ++j) c[i + j] += a[i] * b[j];
  return c;
}

// Family g = f2 x^2 + p (x^3/(1-x) + 3 x y^2 + x y^3). Repeatedly substitutes
// the current polynomial into x^2 y' + y (1 + a0 x) = g(x, y) and solves for
// each coefficient; K sweeps make the triangular system exact.
std::vector<double> family_oracle(double f2, double p, int K) {
  const size_t n = static_cast<size_t>(K);
  std::vector<double> m(n + 1, 0.0);
  for (int sweep = 0; sweep < K; ++sweep) {
    const std::vector<double> m2 = poly_mul(m, m, n);
    const std::vector<double> m3 = poly_mul(m2, m, n);
    std::vector<double> next(n + 1, 0.0);
    for (size_t k = 2; k <= n; ++k) {
      double g = (k == 2 ? f2 : p);
      g += p * (3.0 * m2[k - 1] + m3[k - 1]);
      next[k] = g - (static_cast<double>(k) - 1.0) * next[k - 1];
    }
    m = next;
  }
  return m;
}

}  // namespace

TEST_CASE("euler coefficients") {
  const CenterManifoldData d = center_coeffs(euler_spec(), 6);
  const double want[] = {1, -2, 6, -24, 120};
  for (int k = 2; k <= 6; ++k) CHECK(d.m_value(k) == doctest::Approx(want[k - 2]).epsilon(1e-14));
  const CenterManifoldData big = center_coeffs(euler_spec(), 150);
  for (int k = 2; k <= 150; ++k) {
    CHECK(big.m[static_cast<size_t>(k)].sign == (k % 2 ? -1 : 1));
    CHECK(std::fabs(big.m[static_cast<size_t>(k)].log_abs - std::lgamma(k)) <= 1e-12 * std::max(1.0, std::lgamma(k)));
  }
  CHECK(big.S_infty_estimate == 1.0);
}

TEST_CASE("zero nonlinearity and argument checks") {
  const CenterManifoldData d = center_coeffs(zero_spec(), 20);
  for (int k = 2; k <= 20; ++k) {
    CHECK(d.m[static_cast<size_t>(k)].is_zero());
    CHECK(d.S[static_cast<size_t>(k)] == 0.0);
  }
  CHECK(estimate_S_infty(zero_spec()).value == 0.0);
  CHECK_THROWS_AS(center_coeffs(euler_spec(), 1), DomainError);
  CHECK_THROWS_AS(estimate_S_infty(euler_spec(), 9), DomainError);
  CHECK_THROWS_AS(linear_case_S({0, 0, 1}, -2.0, 10), DomainError);
}

TEST_CASE("family coefficients match brute-force substitution") {
  const std::vector<double> ref = family_oracle(1.0, 1.0, 10);
  const CenterManifoldData d = center_coeffs(family_spec(1.0, 1.0), 10);
  for (int k = 2; k <= 10; ++k)
    CHECK(std::fabs(d.m_value(k) - ref[static_cast<size_t>(k)]) <= 1e-12 * std::fabs(ref[static_cast<size_t>(k)]));
}

TEST_CASE("ODE residual of the truncated series vanishes") {
  const int K = 40;
  const NonlinearitySpec s = family_spec(0.7, 1.3);
  const CenterManifoldData d = center_coeffs(s, K);
  std::vector<double> m(K + 1, 0.0);
  for (int k = 2; k <= K; ++k) m[static_cast<size_t>(k)] = d.m_value(k);
  const std::vector<double> m2 = poly_mul(m, m, K);
  const std::vector<double> m3 = poly_mul(m2, m, K);
  for (int k = 3; k <= K - 3; ++k) {
    const size_t u = static_cast<size_t>(k);
    const double g = s.f_at(k, 0.0) + s.mu * (3.0 * m2[u - 1] + m3[u - 1]);
    const double r = (k - 1 + s.a0) * m[u - 1] + m[u] - g;
    CHECK(std::fabs(r) <= 1e-10 * std::tgamma(k + s.a0));
  }
}

TEST_CASE("recursion identities hold") {
  const CenterManifoldData d = center_coeffs(family_spec(2.0, 0.5), 60);
  for (int k = 2; k <= 60; ++k) {
    const SignedLogValue& m = d.m[static_cast<size_t>(k)];
    const double want = (k % 2 ? -1.0 : 1.0) * d.S[static_cast<size_t>(k)];
    CHECK(m.sign * std::exp(m.log_abs - std::lgamma(k + d.a0)) == doctest::Approx(want).epsilon(1e-13));
    if (k > 2)
      CHECK(d.increment[static_cast<size_t>(k)] ==
            doctest::Approx(d.S[static_cast<size_t>(k)] - d.S[static_cast<size_t>(k - 1)]).epsilon(1e-10));
  }
}

TEST_CASE("linear case closed form") {
  const LinearCase lc = linear_case_S({0, 0, 1, 1}, 1.0, 5);
  CHECK(lc.S[2] == doctest::Approx(0.5));
  CHECK(lc.S[3] == doctest::Approx(1.0 / 3.0));
  CHECK(lc.m[3].to_double() == doctest::Approx(-2.0));

  const LinearCase e = linear_case_S({0, 0, 1}, 0.0, 12);
  for (int k = 2; k <= 12; ++k) CHECK(e.m[static_cast<size_t>(k)].to_double() == doctest::Approx((k % 2 ? -1 : 1) * std::tgamma(k)));

  const LinearCase z = linear_case_S({}, 0.0, 8);
  for (int k = 2; k <= 8; ++k) CHECK(z.S[static_cast<size_t>(k)] == 0.0);
}

TEST_CASE("center_coeffs agrees with the linear closed form") {
  for (double a0 : {-1.5, 0.0, 0.5, 2.0}) {
    std::vector<double> f(151, 0.0);
    for (int k = 2; k <= 150; ++k) f[static_cast<size_t>(k)] = std::sin(1.7 * k) * std::ldexp(1.0, -k);
    const CenterManifoldData d = center_coeffs(linear_spec(f, a0), 150);
    const LinearCase lc = linear_case_S(f, a0, 150);
    for (int k = 2; k <= 150; ++k) {
      const double a = d.S[static_cast<size_t>(k)], b = lc.S[static_cast<size_t>(k)];
      CHECK(std::fabs(a - b) <= 1e-12 * std::fabs(b));
    }
    const SInftyEstimate est = estimate_S_infty(linear_spec(f, a0), 150);
    CHECK(std::fabs(est.value - lc.S[150]) <= 1e-14 * std::fabs(lc.S[150]));
  }
}

TEST_CASE("family at (1, 1): frozen S100, slow convergence") {
  const SInftyEstimate e = estimate_S_infty(family_spec(1.0, 1.0), 100);
  CHECK(e.value == doctest::Approx(0.36159699519861122).epsilon(1e-13));
  CHECK(e.k_used == 100);
  // increments decay like k^-3, so the 1e-12 threshold is not reached
  CHECK_FALSE(e.converged);
  CHECK(e.residual == doctest::Approx(2.26e-6).epsilon(0.01));

  const CenterManifoldData d = center_coeffs(family_spec(1.0, 1.0), 150);
  const double rho = increment_decay_rate(d, 50);
  CHECK(rho < 1.0);
  MESSAGE("fitted increment ratio " << rho);

  double F = 0.0;
  for (int k = 2; k <= 150; ++k)
    F = std::max(F, std::exp(d.m[static_cast<size_t>(k)].log_abs - std::lgamma(k + d.a0)));
  CHECK(std::isfinite(F));
  CHECK(F < 10.0);
  MESSAGE("empirical Gevrey constant " << F);
}

TEST_CASE("gevrey_norm") {
  CHECK(gevrey_norm(TruncatedSeries::monomial(2, 1.0, 5), 0.0) == doctest::Approx(1.0));
  CHECK(gevrey_norm(TruncatedSeries::monomial(2, 1.0, 5), 1.0) == doctest::Approx(0.5));
  std::vector<double> c;
  for (int k = 2; k <= 30; ++k) c.push_back(2.0 * std::tgamma(k + 0.5));
  CHECK(gevrey_norm(TruncatedSeries(2, c, 30), 0.5) == doctest::Approx(2.0));
  const CenterManifoldData d = center_coeffs(euler_spec(), 60);
  CHECK(gevrey_norm(d.m_series(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("csv output is deterministic") {
  const CenterManifoldData d = center_coeffs(family_spec(1.0, 1.0), 30);
  std::ostringstream a, b;
  write_center_csv(a, d);
  write_center_csv(b, center_coeffs(family_spec(1.0, 1.0), 30));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("k,m_log_abs,m_sign,m,S,increment\n", 0) == 0);
  CHECK(a.str().find('\r') == std::string::npos);
}
