#include "snlab/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snlab/errors.hpp"

namespace snlab {

TruncatedSeries::TruncatedSeries(int first_index, std::vector<double> coeffs,
                                 int order)
    : first_(first_index), order_(order), c_(std::move(coeffs)) {
  if (first_ < 0) throw DomainError("first_index must be non-negative");
  if (order_ < first_ - 1) order_ = first_ - 1;
  c_.resize(static_cast<size_t>(order_ - first_ + 1), 0.0);
}

TruncatedSeries TruncatedSeries::from_dense(const std::vector<double>& c) {
  return TruncatedSeries(0, c, static_cast<int>(c.size()) - 1);
}

TruncatedSeries TruncatedSeries::monomial(int k, double v, int order) {
  TruncatedSeries s(k, {}, order);
  if (k <= order) s.set(k, v);
  return s;
}

double TruncatedSeries::coeff(int k) const {
  if (k > order_)
    throw TruncationError("coefficient " + std::to_string(k) +
                          " beyond truncation order " + std::to_string(order_));
  if (k < first_) return 0.0;
  return c_[static_cast<size_t>(k - first_)];
}

void TruncatedSeries::set(int k, double v) {
  if (k < first_ || k > order_)
    throw TruncationError("index " + std::to_string(k) + " not represented");
  c_[static_cast<size_t>(k - first_)] = v;
}

TruncatedSeries TruncatedSeries::truncated(int n) const {
  if (n > order_) throw TruncationError("cannot extend a truncated series");
  const int keep = std::max(0, n - first_ + 1);
  return TruncatedSeries(first_,
                         std::vector<double>(c_.begin(), c_.begin() + keep), n);
}

double TruncatedSeries::evaluate(double x) const {
  double acc = 0.0;
  for (int k = order_; k >= first_; --k) acc = acc * x + coeff(k);
  return first_ > 0 ? acc * std::pow(x, first_) : acc;
}

TruncatedSeries cauchy_product(const TruncatedSeries& a,
                               const TruncatedSeries& b, int n) {
  const int first = a.first_index() + b.first_index();
  int achievable = std::min(a.order() + b.first_index(),
                            b.order() + a.first_index());
  if (a.empty() || b.empty()) achievable = n;
  if (n > achievable)
    throw TruncationError("product order " + std::to_string(n) +
                          " exceeds achievable order " +
                          std::to_string(achievable));
  TruncatedSeries out(first, {}, n);
  if (a.empty() || b.empty()) return out;
  for (int k = first; k <= n; ++k) {
    double s = 0.0;
    const int jlo = std::max(a.first_index(), k - b.order());
    const int jhi = std::min(a.order(), k - b.first_index());
    for (int j = jlo; j <= jhi; ++j) s += a.coeff(j) * b.coeff(k - j);
    out.set(k, s);
  }
  return out;
}

TruncatedSeries series_power(const TruncatedSeries& y, int l, int n) {
  if (l < 1) throw DomainError("power must be >= 1");
  if (y.first_index() < 2) throw DomainError("series must start at index >= 2");
  if (n < 2 * l) throw DomainError("order must be at least 2l");
  TruncatedSeries acc = y.truncated(std::min(y.order(), n));
  for (int i = 2; i <= l; ++i) acc = cauchy_product(acc, y, n);
  return acc;
}

double CoefficientSlot::h_at(int k, int l) const {
  if (l < 1 || l >= static_cast<int>(h.size())) return 0.0;
  const auto& row = h[static_cast<size_t>(l)];
  return k >= 0 && k < static_cast<int>(row.size()) ? row[static_cast<size_t>(k)]
                                                    : 0.0;
}

int CoefficientSlot::max_l() const {
  for (int l = static_cast<int>(h.size()) - 1; l >= 1; --l)
    for (double v : h[static_cast<size_t>(l)])
      if (v != 0.0) return l;
  return 0;
}

TruncatedSeries compose_nonlinearity(const CoefficientSlot& slot,
                                     const TruncatedSeries& y, int n) {
  if (y.first_index() < 2) throw DomainError("series must start at index >= 2");
  TruncatedSeries g(2, {}, n);
  for (int k = 2; k <= n; ++k) g.set(k, slot.f_at(k));
  const int lmax = slot.mu != 0.0 ? slot.max_l() : 0;
  if (lmax == 0) return g;
  if (y.order() < n - 1)
    throw TruncationError("composition to order " + std::to_string(n) +
                          " needs y to order " + std::to_string(n - 1));
  for (int l = 1; l <= lmax && 2 * l + 1 <= n; ++l) {
    const TruncatedSeries yl = series_power(y, l, n - 1);
    for (int k = 2 * l + 1; k <= n; ++k) {
      double s = 0.0;
      for (int j = 2 * l; j <= k - 1; ++j) s += slot.h_at(k - j, l) * yl.coeff(j);
      g.set(k, g.coeff(k) + slot.mu * s);
    }
  }
  return g;
}

IncrementalComposer::IncrementalComposer(const CoefficientSlot& slot,
                                         std::vector<double> log_scale,
                                         int max_order)
    : slot_(slot), ls_(std::move(log_scale)), max_order_(max_order) {
  if (static_cast<int>(ls_.size()) <= max_order_)
    throw DomainError("log scale table shorter than requested order");
  lmax_ = slot.mu != 0.0 ? slot.max_l() : 0;
  p_.assign(static_cast<size_t>(lmax_ + 1),
            std::vector<double>(static_cast<size_t>(max_order_ + 1), 0.0));
  filled_.assign(static_cast<size_t>(lmax_ + 1), 0);
}

void IncrementalComposer::push(double y_hat) {
  const int j = ++known_;
  if (lmax_ == 0) return;
  if (j <= max_order_) p_[1][static_cast<size_t>(j)] = y_hat;
  // y_j completes (y^l)_i for i = j + 2(l-1).
  for (int l = 2; l <= lmax_; ++l) {
    const int i = j + 2 * (l - 1);
    if (i > max_order_) break;
    const int base = i - 2 * l + 2;
    double s = 0.0;
    for (int a = 2; a <= i - 2 * (l - 1); ++a) {
      const int b = i - a;  // index into y^(l-1), b >= 2(l-1)
      const double pb = p_[static_cast<size_t>(l - 1)][static_cast<size_t>(b)];
      if (pb == 0.0) continue;
      const double ya = p_[1][static_cast<size_t>(a)];
      if (ya == 0.0) continue;
      s += ya * pb *
           std::exp(ls_[static_cast<size_t>(a)] +
                    ls_[static_cast<size_t>(b - 2 * l + 4)] -
                    ls_[static_cast<size_t>(base)]);
    }
    p_[static_cast<size_t>(l)][static_cast<size_t>(i)] = s;
  }
}

double IncrementalComposer::normalized_G(int k) const {
  if (k > max_order_) throw TruncationError("composer order exceeded");
  double g = slot_.f_at(k) == 0.0
                 ? 0.0
                 : slot_.f_at(k) * std::exp(-ls_[static_cast<size_t>(k)]);
  if (lmax_ == 0) return g;
  double acc = 0.0;
  for (int l = 1; l <= lmax_; ++l) {
    const auto& row = slot_.h[static_cast<size_t>(l)];
    const int rmax = static_cast<int>(row.size()) - 1;
    for (int r = 1; r <= rmax; ++r) {
      const double h = row[static_cast<size_t>(r)];
      if (h == 0.0) continue;
      const int j = k - r;
      if (j < 2 * l) break;
      if (j - 2 * (l - 1) > known_)
        throw TruncationError("composer needs more coefficients of y");
      const double pj = p_[static_cast<size_t>(l)][static_cast<size_t>(j)];
      if (pj == 0.0) continue;
      acc += h * pj *
             std::exp(ls_[static_cast<size_t>(j - 2 * l + 2)] -
                      ls_[static_cast<size_t>(k)]);
    }
  }
  return g + slot_.mu * acc;
}

}  // namespace snlab
