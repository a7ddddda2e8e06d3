#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snlab/series.hpp"

namespace snlab {

// Coefficients of num(x)/den(x) up to order n by long division.
std::vector<double> expand_rational(const std::vector<double>& num,
                                    const std::vector<double>& den, int n);

// Univariate coefficient source c_k, k >= 0. Explicit entries, one rational
// function and one named builtin may be combined; the results are summed.
// Builtins: "zero", "x2" (x^2), "geometric2" (sum_{k>=2} x^k), "exp2" (e^x - 1 - x).
class CoefficientProvider {
 public:
  CoefficientProvider();

  static CoefficientProvider explicit_list(std::map<int, double> entries);
  static CoefficientProvider rational(std::vector<double> num,
                                      std::vector<double> den);
  static CoefficientProvider builtin(const std::string& name);

  CoefficientProvider& add_explicit(int k, double v);
  CoefficientProvider& set_rational(std::vector<double> num,
                                    std::vector<double> den);
  CoefficientProvider& set_builtin(const std::string& name, double scale = 1.0);
  CoefficientProvider scaled(double factor) const;

  double coeff(int k) const;
  std::vector<double> dense(int n) const;
  bool is_zero() const;
  // Largest k with a possibly nonzero coefficient, or -1 when unbounded.
  int support_bound() const;

  const std::map<int, double>& explicit_entries() const { return explicit_; }
  bool has_rational() const { return !den_.empty(); }
  const std::vector<double>& numerator() const { return num_; }
  const std::vector<double>& denominator() const { return den_; }
  const std::string& builtin_name() const { return builtin_; }
  double scale() const { return scale_; }

  nlohmann::json to_json() const;
  static CoefficientProvider from_json(const nlohmann::json& j);

 private:
  struct Cache {
    std::mutex mu;
    std::vector<double> rational_terms;
  };

  double rational_coeff(int k) const;
  double builtin_coeff(int k) const;

  std::map<int, double> explicit_;
  std::vector<double> num_;
  std::vector<double> den_;
  std::string builtin_;
  double scale_ = 1.0;
  std::shared_ptr<Cache> cache_;
};

// h_{k,l}: one univariate provider (in k) per power l of y.
class BivariateProvider {
 public:
  void add(int k, int l, double v);
  void set_row(int l, CoefficientProvider row);
  double coeff(int k, int l) const;
  int max_l() const;
  bool is_zero() const;
  const std::map<int, CoefficientProvider>& rows() const { return rows_; }

  nlohmann::json to_json() const;
  static BivariateProvider from_json(const nlohmann::json& j);

 private:
  std::map<int, CoefficientProvider> rows_;
};

// g^eps(x,y) = f^eps(x) + mu h^eps(x,y) with coefficients affine in eps:
// f^eps = f + eps f_eps, h^eps = h + eps h_eps, a^eps = a0 + eps a1.
struct NonlinearitySpec {
  std::string name;
  double a0 = 0.0;
  double a1 = 0.0;
  CoefficientProvider f;
  CoefficientProvider f_eps;
  BivariateProvider h;
  BivariateProvider h_eps;
  double mu = 0.0;
  double rho = 1.0;
  double B = 1.0;

  double a_at(double eps) const { return a0 + eps * a1; }
  double f_at(int k, double eps) const;
  double h_at(int k, int l, double eps) const;
  int max_l() const;

  // Coefficient table at eps up to order n. With scaled = true the table
  // belongs to the blown-up variables x = eps*xbar, y = eps*ybar:
  // f_k eps^(k-2), h_{k,l} eps^(k+l-2).
  CoefficientSlot slot(double eps, int n, bool scaled) const;

  // Copy with f_2 shifted by q.
  NonlinearitySpec with_f2_shift(double q) const;

  // Hard hypothesis checks; throws HypothesisViolation.
  void validate(int check_order = 100) const;
  // Bound checks against B and rho; returns human-readable warnings.
  std::vector<std::string> advisories(int check_order = 100) const;
};

NonlinearitySpec load_spec(const nlohmann::json& doc);
NonlinearitySpec load_spec_text(const std::string& text);
NonlinearitySpec load_spec_file(const std::string& path);
nlohmann::json serialize(const NonlinearitySpec& spec);

NonlinearitySpec zero_spec(double a0 = 0.0);
// a0 = 0, g = x^2.
NonlinearitySpec euler_spec();
// g = f(x), h = 0; f[k] indexed by power.
NonlinearitySpec linear_spec(const std::vector<double>& f, double a0);
// g = f2 x^2 + p (x^3/(1-x) + 3 x y^2 + x y^3), a0 = 0.
NonlinearitySpec family_spec(double f2, double p);

}  // namespace snlab
