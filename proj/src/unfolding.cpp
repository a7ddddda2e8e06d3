#include "snlab/unfolding.hpp"

#include <cmath>
#include <sstream>

#include "snlab/csv.hpp"
#include "snlab/errors.hpp"
#include "snlab/quadrature.hpp"
#include "snlab/series.hpp"

namespace snlab {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int parity_sign(int k) { return k % 2 == 0 ? 1 : -1; }

}  // namespace

UnfoldingContext::UnfoldingContext(int N, double alpha, double alpha_c, double a)
    : N_(N), alpha_(alpha), alpha_c_(alpha_c), eps_(1.0 / (N + alpha)), a_(a) {}

UnfoldingContext UnfoldingContext::from_eps(double eps, double a_eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1), got " + num(eps));
  const double inv = 1.0 / eps;
  const double N = std::floor(inv);
  const double alpha = inv - N;
  const double alpha_c = (N + 1.0) - inv;
  if (alpha <= kResonanceGuard || alpha_c <= kResonanceGuard)
    throw ResonanceError("1/eps = " + num(inv) + " is within 1e-8 of an integer");
  UnfoldingContext c(static_cast<int>(N), alpha, alpha_c, a_eps);
  c.eps_ = eps;
  return c;
}

UnfoldingContext UnfoldingContext::from_N_alpha(int N, double alpha, double a_eps) {
  if (N < 1) throw DomainError("N must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ResonanceError("alpha must lie strictly inside (0,1), got " + num(alpha));
  return UnfoldingContext(N, alpha, 1.0 - alpha, a_eps);
}

UnfoldingContext UnfoldingContext::from_N_one_minus_alpha(int N, double one_minus_alpha,
                                                          double a_eps) {
  if (N < 1) throw DomainError("N must be >= 1");
  if (!(one_minus_alpha > 0.0 && one_minus_alpha < 1.0))
    throw ResonanceError("1 - alpha must lie strictly inside (0,1), got " +
                         num(one_minus_alpha));
  return UnfoldingContext(N, 1.0 - one_minus_alpha, one_minus_alpha, a_eps);
}

UnfoldingContext UnfoldingContext::with_a(double a) const {
  UnfoldingContext c = *this;
  c.a_ = a;
  return c;
}

double UnfoldingContext::small_divisor(int k) const {
  if (k <= N_) return ((N_ - k) + alpha_) / (N_ + alpha_);
  return -((k - N_ - 1) + alpha_c_) / (N_ + alpha_);
}

SignedLogValue wbar(const UnfoldingContext& ctx, int k) {
  if (k < 2) throw DomainError("wbar needs k >= 2");
  const int N = ctx.N();
  const double inv = ctx.inv_eps();
  const double lk = log_gamma(k + ctx.a());
  if (k <= N) {
    // Gamma(1/eps - k) / Gamma(1/eps) = 1 / [Gamma(1/eps)/Gamma(1/eps - k)]
    const double base = (N - k) + ctx.alpha();
    return {lk - log_gamma_ratio(base, k) + std::log(inv), 1};
  }
  const double la = log_reflection(ctx.alpha(), ctx.one_minus_alpha()) +
                    std::log(inv) - log_gamma(inv) + lk -
                    log_gamma(ctx.shifted_above(k));
  return {la, parity_sign(k - N)};
}

WeakManifoldExpansion weak_manifold_coeffs(const NonlinearitySpec& spec,
                                           const UnfoldingContext& ctx_in, int K) {
  if (K < 2) throw DomainError("weak_manifold_coeffs needs K >= 2");
  spec.validate();
  const UnfoldingContext ctx = ctx_in.with_a(spec.a_at(ctx_in.eps()));
  const double eps = ctx.eps();
  WeakManifoldExpansion e;
  e.ctx = ctx;
  e.K = K;
  e.mbar.assign(static_cast<size_t>(K + 1), SignedLogValue::zero());
  e.Sbar.assign(static_cast<size_t>(K + 1), 0.0);
  if (K > ctx.N())
    e.warnings.push_back("K = " + std::to_string(K) + " exceeds N = " +
                         std::to_string(ctx.N()) + ": small divisors past k = N");

  std::vector<SignedLogValue> w(static_cast<size_t>(K + 1));
  std::vector<double> ls(static_cast<size_t>(K + 1), 0.0);
  for (int k = 2; k <= K; ++k) {
    w[static_cast<size_t>(k)] = wbar(ctx, k);
    ls[static_cast<size_t>(k)] = w[static_cast<size_t>(k)].log_abs;
  }
  const CoefficientSlot slot = spec.slot(eps, K, true);
  IncrementalComposer comp(slot, ls, K);
  double sum = 0.0, c = 0.0;
  for (int k = 2; k <= K; ++k) {
    const SignedLogValue& wk = w[static_cast<size_t>(k)];
    // Sbar_k - Sbar_{k-1} = (-1)^k eps Gbar_k / ((1 - eps k) wbar_k)
    const double inc =
        parity_sign(k) * wk.sign * eps * comp.normalized_G(k) / ctx.small_divisor(k);
    const double t = sum + inc;
    c += std::fabs(sum) >= std::fabs(inc) ? (sum - t) + inc : (inc - t) + sum;
    sum = t;
    const double S = sum + c;
    e.Sbar[static_cast<size_t>(k)] = S;
    e.mbar[static_cast<size_t>(k)] =
        wk * SignedLogValue::from_double(parity_sign(k) * S);
    comp.push(parity_sign(k) * wk.sign * S);
  }
  return e;
}

WeakManifoldExpansion baby_weak_coeffs(const std::vector<double>& u,
                                       const UnfoldingContext& ctx, int K) {
  WeakManifoldExpansion e;
  e.ctx = ctx;
  e.K = K;
  e.mbar.assign(static_cast<size_t>(K + 1), SignedLogValue::zero());
  e.Sbar.assign(static_cast<size_t>(K + 1), 0.0);
  const double le = std::log(ctx.eps());
  for (int k = 2; k <= K; ++k) {
    const double uk = k < static_cast<int>(u.size()) ? u[static_cast<size_t>(k)] : 0.0;
    if (uk == 0.0) continue;
    const double d = ctx.small_divisor(k);
    const SignedLogValue m = SignedLogValue::from_log(
        (k - 1) * le + std::log(std::fabs(uk)) - std::log(std::fabs(d)),
        (uk > 0 ? 1 : -1) * (d > 0 ? 1 : -1));
    e.mbar[static_cast<size_t>(k)] = m;
    e.Sbar[static_cast<size_t>(k)] =
        (m / wbar(ctx, k)).to_double() * parity_sign(k);
  }
  return e;
}

double sbar_at_resonance_edge(const NonlinearitySpec& spec, const UnfoldingContext& ctx) {
  if (ctx.N() < 2) throw DomainError("resonance edge needs N >= 2");
  const WeakManifoldExpansion e = weak_manifold_coeffs(spec, ctx, ctx.N());
  return e.Sbar[static_cast<size_t>(ctx.N())];
}

namespace {

// exp(log_pref) * sum_{k >= k0} Gamma(k+a)/Gamma((k-N)+(1-alpha)) x^k,
// optionally without the k0 term.
double gamma_tail_series(const UnfoldingContext& ctx, int k0, double x,
                         double tol, double log_pref, bool drop_first = false) {
  if (x == 0.0) return 0.0;
  const int N = ctx.N();
  const double a = ctx.a();
  const double ax = std::fabs(x);
  const double lead = log_pref + log_gamma(k0 + a) -
                      log_gamma(ctx.shifted_above(k0)) + k0 * std::log(ax);
  const int lead_sign = (x < 0 && k0 % 2 != 0) ? -1 : 1;
  const double q_cap = std::max(0.875, 0.5 * (1.0 + ax));
  double t = 1.0, sum = 0.0, comp = 0.0;
  const int kmax = k0 + 200000;
  for (int k = k0; k <= kmax; ++k) {
    const double add = (drop_first && k == k0) ? 0.0 : t;
    const double s = sum + add;
    comp += std::fabs(sum) >= std::fabs(add) ? (sum - s) + add : (add - s) + sum;
    sum = s;
    const double r = (k + a) / ctx.shifted_above(k) * x;
    const double q = std::max(std::fabs(r), ax);
    t *= r;
    if (k >= N + 10 && q < q_cap) {
      const double tail = std::fabs(t) / (1.0 - q);
      if (tail <= tol * std::fabs(sum + comp)) {
        return lead_sign * std::exp(lead) * (sum + comp + t);
      }
    }
  }
  throw TruncationError("gamma series did not certify its tail");
}

double vbar_log_prefactor(const UnfoldingContext& ctx) {
  const double inv = ctx.inv_eps();
  return log_reflection(ctx.alpha(), ctx.one_minus_alpha()) + std::log(inv) -
         log_gamma(inv);
}

}  // namespace

double eval_Vbar(const UnfoldingContext& ctx, double xbar, double tol) {
  if (!(std::fabs(xbar) <= 0.75)) throw DomainError("eval_Vbar needs |xbar| <= 3/4");
  return gamma_tail_series(ctx, ctx.N(), xbar, tol, vbar_log_prefactor(ctx));
}

double eval_Ubar(const UnfoldingContext& ctx, double xbar, double tol) {
  if (!(std::fabs(xbar) <= 0.75)) throw DomainError("eval_Ubar needs |xbar| <= 3/4");
  return gamma_tail_series(ctx, ctx.N(), xbar, tol, vbar_log_prefactor(ctx), true);
}

double T_monomial_series(const UnfoldingContext& ctx, double xbar, double tol) {
  if (!(std::fabs(xbar) < 1.0)) throw DomainError("T series needs |xbar| < 1");
  const double lp = log_gamma(ctx.one_minus_alpha()) - log_gamma(ctx.N() + 1 + ctx.a());
  return gamma_tail_series(ctx, ctx.N() + 1, xbar, tol, lp);
}

double T_monomial_quadrature(const UnfoldingContext& ctx, double xbar, double delta2) {
  const double eps = ctx.eps();
  if (!(xbar >= -delta2 * eps && xbar < 1.0))
    throw DomainError("T quadrature needs -delta2 eps <= xbar < 1");
  if (xbar == 0.0) return 0.0;
  const double p = ctx.inv_eps() + ctx.a();
  auto g = [&](double t) { return std::pow(1.0 - xbar * t, p - 1.0); };
  const QuadResult q = integrate_power_singular(g, ctx.alpha(), 1e-13);
  // xbar^(1/eps) * xbar^(1-alpha) = xbar^(N+1), real for either sign
  const int n1 = ctx.N() + 1;
  const double lpre = n1 * std::log(std::fabs(xbar)) - p * std::log1p(-xbar);
  const int sgn = (xbar < 0 && n1 % 2 != 0) ? -1 : 1;
  return sgn * std::exp(lpre) * q.value;
}

double eval_Vbar_asymptotic(const UnfoldingContext& ctx, double xbar2, double delta2) {
  if (!(std::fabs(xbar2) <= delta2))
    throw DomainError("asymptotic form needs |xbar2| <= delta2");
  if (xbar2 == 0.0) return 0.0;
  const double alpha = ctx.alpha();
  const int N = ctx.N();
  // int_0^1 e^{(1-v) x2} v^{1-alpha} dv with v = s^{1/(2-alpha)}
  const double pw = 1.0 / (2.0 - alpha);
  auto f = [&](double s) { return pw * std::exp((1.0 - std::pow(s, pw)) * xbar2); };
  const double I = integrate_gk(f, 0.0, 1.0, 1e-12).value;
  const double bracket = 1.0 + xbar2 / ctx.one_minus_alpha() * (1.0 + xbar2 * I);
  const double lmag = log_gamma(alpha) + (ctx.a() + 1.0 - alpha) * std::log(double(N)) +
                      N * std::log(ctx.eps() * std::fabs(xbar2));
  const int sgn = (xbar2 < 0 && N % 2 != 0) ? -1 : 1;
  return sgn * std::exp(lmag) * bracket;
}

double sigma_eps(const UnfoldingContext& ctx, double xbar, double delta2) {
  const double edge = delta2 * ctx.eps();
  if (std::fabs(xbar) <= edge) return 1.0;
  return std::pow(edge / std::fabs(xbar), ctx.one_minus_alpha());
}

MajorantDiag weight_majorant_diag(const UnfoldingContext& ctx) {
  const int N = ctx.N();
  if (N < 5) throw DomainError("majorant diagnostic needs N >= 5");
  MajorantDiag d;
  d.P4 = wbar(ctx, 2).log_abs;
  d.Q4 = (wbar(ctx, N - 1).log_abs - d.P4) / (N - 3);
  d.max_violation = -INFINITY;
  for (int k = 2; k <= N - 1; ++k)
    d.max_violation = std::max(d.max_violation,
                               wbar(ctx, k).log_abs - (d.Q4 * (k - 2) + d.P4));
  return d;
}

double weighted_sup(const WeakManifoldExpansion& e) {
  double s = 0.0;
  const int kmax = std::min(e.K, e.ctx.N() - 1);
  for (int k = 2; k <= kmax; ++k) s = std::max(s, std::fabs(e.Sbar[static_cast<size_t>(k)]));
  return s;
}

void write_unfold_csv(std::ostream& os, const WeakManifoldExpansion& e) {
  CsvWriter w(os, {"k", "wbar_log_abs", "wbar_sign", "Sbar", "mbar_log_abs",
                   "mbar_sign", "mbar"});
  for (int k = 2; k <= e.K; ++k) {
    const SignedLogValue wk = wbar(e.ctx, k);
    const SignedLogValue& m = e.mbar[static_cast<size_t>(k)];
    w.row({CsvWriter::integer(k), CsvWriter::number(wk.log_abs),
           CsvWriter::integer(wk.sign), CsvWriter::number(e.Sbar[static_cast<size_t>(k)]),
           CsvWriter::number(m.log_abs), CsvWriter::integer(m.sign),
           CsvWriter::number(m.to_double())});
  }
}

}  // namespace snlab
