#pragma once

#include <vector>

namespace snlab {

// Coefficients c_k of x^k for first_index <= k <= order.
class TruncatedSeries {
 public:
  TruncatedSeries() = default;
  TruncatedSeries(int first_index, std::vector<double> coeffs, int order);

  // Dense vector indexed by power, order = size - 1.
  static TruncatedSeries from_dense(const std::vector<double>& c);
  static TruncatedSeries monomial(int k, double v, int order);

  int first_index() const { return first_; }
  int order() const { return order_; }
  bool empty() const { return order_ < first_; }
  const std::vector<double>& coeffs() const { return c_; }

  // Zero below first_index; throws TruncationError above order.
  double coeff(int k) const;
  void set(int k, double v);

  TruncatedSeries truncated(int n) const;
  double evaluate(double x) const;

 private:
  int first_ = 0;
  int order_ = -1;
  std::vector<double> c_;
};

// Product truncated to order n.
TruncatedSeries cauchy_product(const TruncatedSeries& a,
                               const TruncatedSeries& b, int n);

// y^l truncated to order n; y must start at index >= 2.
TruncatedSeries series_power(const TruncatedSeries& y, int l, int n);

// Coefficient table of g(x,y) = f(x) + mu * sum h_{k,l} x^k y^l at one
// parameter value. f[k] for k >= 0, h[l][k] for l >= 1.
struct CoefficientSlot {
  std::vector<double> f;
  std::vector<std::vector<double>> h;
  double mu = 0.0;

  double f_at(int k) const { return k < static_cast<int>(f.size()) ? f[k] : 0.0; }
  double h_at(int k, int l) const;
  int max_l() const;
};

// Coefficients 2..n of G[y](x) = g(x, y(x)), y starting at index >= 2.
TruncatedSeries compose_nonlinearity(const CoefficientSlot& slot,
                                     const TruncatedSeries& y, int n);

// Builds G[y]_k one index at a time while y is being solved for. All
// quantities are normalized by scales s_k = exp(log_scale[k]) so that
// Gevrey-growing coefficients never overflow.
class IncrementalComposer {
 public:
  IncrementalComposer(const CoefficientSlot& slot,
                      std::vector<double> log_scale, int max_order);

  // Appends the next coefficient y_j / s_j, j = 2, 3, ...
  void push(double y_hat);
  int known() const { return known_; }

  // G_k / s_k; needs y up to index k-1 when l=1 terms are present,
  // otherwise up to k-3.
  double normalized_G(int k) const;

 private:
  const CoefficientSlot& slot_;
  std::vector<double> ls_;
  int max_order_;
  int known_ = 1;
  int lmax_;
  // p_[l][j] = (y^l)_j / s_{j-2(l-1)}
  std::vector<std::vector<double>> p_;
  std::vector<int> filled_;
};

}  // namespace snlab
