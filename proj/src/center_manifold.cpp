#include "snlab/center_manifold.hpp"

#include <cmath>

#include "snlab/csv.hpp"
#include "snlab/errors.hpp"

namespace snlab {

namespace {

// Neumaier compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

TruncatedSeries CenterManifoldData::m_series() const {
  std::vector<double> c;
  for (int k = 2; k <= K; ++k) c.push_back(m_value(k));
  return TruncatedSeries(2, c, K);
}

CenterManifoldData center_coeffs(const NonlinearitySpec& spec, int K) {
  if (K < 2) throw DomainError("center_coeffs needs K >= 2");
  spec.validate();
  CenterManifoldData d;
  d.a0 = spec.a0;
  d.K = K;
  d.m.assign(static_cast<size_t>(K + 1), SignedLogValue::zero());
  d.S.assign(static_cast<size_t>(K + 1), 0.0);
  d.increment.assign(static_cast<size_t>(K + 1), 0.0);

  std::vector<double> lw(static_cast<size_t>(K + 1), 0.0);
  for (int k = 2; k <= K; ++k) lw[static_cast<size_t>(k)] = log_gamma(k + spec.a0);

  const CoefficientSlot slot = spec.slot(0.0, K, false);
  IncrementalComposer comp(slot, lw, K);
  CompensatedSum acc;
  for (int k = 2; k <= K; ++k) {
    // S_k - S_{k-1} = (-1)^k G_k / Gamma(k + a0)
    const double g_hat = comp.normalized_G(k);
    const double inc = (k % 2 == 0 ? 1.0 : -1.0) * g_hat;
    acc.add(inc);
    const double S = acc.value();
    d.S[static_cast<size_t>(k)] = S;
    d.increment[static_cast<size_t>(k)] = inc;
    d.m[static_cast<size_t>(k)] =
        SignedLogValue::from_log(lw[static_cast<size_t>(k)] + std::log(std::fabs(S)),
                                 (S > 0 ? 1 : (S < 0 ? -1 : 0)) * (k % 2 == 0 ? 1 : -1));
    comp.push((k % 2 == 0 ? 1.0 : -1.0) * S);
  }
  d.S_infty_estimate = d.S[static_cast<size_t>(K)];
  d.residual = K >= 3 ? std::fabs(d.S[static_cast<size_t>(K)] - d.S[static_cast<size_t>(K - 1)])
                      : std::fabs(d.S[2]);
  return d;
}

SInftyEstimate estimate_S_infty(const NonlinearitySpec& spec, int K, double tol) {
  if (K < 10) throw DomainError("estimate_S_infty needs K >= 10");
  const CenterManifoldData d = center_coeffs(spec, K);
  SInftyEstimate e;
  e.value = d.S_infty_estimate;
  e.k_used = K;
  e.residual = d.residual;
  e.converged = d.residual <= tol;
  return e;
}

LinearCase linear_case_S(const std::vector<double>& f, double a0, int K) {
  if (!(a0 > -2.0)) throw DomainError("linear_case_S needs a0 > -2");
  LinearCase lc;
  lc.S.assign(static_cast<size_t>(K + 1), 0.0);
  lc.m.assign(static_cast<size_t>(K + 1), SignedLogValue::zero());
  CompensatedSum acc;
  for (int k = 2; k <= K; ++k) {
    const double fk = k < static_cast<int>(f.size()) ? f[static_cast<size_t>(k)] : 0.0;
    const double lg = log_gamma(k + a0);
    if (fk != 0.0)
      acc.add((k % 2 == 0 ? 1.0 : -1.0) * fk * std::exp(-lg));
    const double S = acc.value();
    lc.S[static_cast<size_t>(k)] = S;
    lc.m[static_cast<size_t>(k)] = SignedLogValue::from_log(
        lg + std::log(std::fabs(S)), (S > 0 ? 1 : (S < 0 ? -1 : 0)) * (k % 2 == 0 ? 1 : -1));
  }
  return lc;
}

double gevrey_norm(const TruncatedSeries& y, double a0) {
  if (y.first_index() < 2) throw DomainError("gevrey_norm needs first_index >= 2");
  double sup = 0.0;
  for (int k = y.first_index(); k <= y.order(); ++k) {
    const double c = y.coeff(k);
    if (c == 0.0) continue;
    sup = std::max(sup, std::exp(std::log(std::fabs(c)) - log_gamma(k + a0)));
  }
  return sup;
}

double increment_decay_rate(const CenterManifoldData& d, int k_lo) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int k = std::max(k_lo, 3); k <= d.K; ++k) {
    const double inc = std::fabs(d.increment[static_cast<size_t>(k)]);
    if (inc == 0.0) continue;
    const double y = std::log(inc);
    sx += k;
    sy += y;
    sxx += double(k) * k;
    sxy += k * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

void write_center_csv(std::ostream& os, const CenterManifoldData& d) {
  CsvWriter w(os, {"k", "m_log_abs", "m_sign", "m", "S", "increment"});
  for (int k = 2; k <= d.K; ++k) {
    const auto& m = d.m[static_cast<size_t>(k)];
    w.row({CsvWriter::integer(k), CsvWriter::number(m.log_abs),
           CsvWriter::integer(m.sign), CsvWriter::number(m.to_double()),
           CsvWriter::number(d.S[static_cast<size_t>(k)]),
           CsvWriter::number(d.increment[static_cast<size_t>(k)])});
  }
}

}  // namespace snlab
