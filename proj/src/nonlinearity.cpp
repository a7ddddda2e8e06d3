#include "snlab/nonlinearity.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "snlab/errors.hpp"

namespace snlab {

using nlohmann::json;

std::vector<double> expand_rational(const std::vector<double>& num,
                                    const std::vector<double>& den, int n) {
  if (den.empty() || den[0] == 0.0)
    throw DomainError("rational denominator needs a nonzero constant term");
  if (n < 0) return {};
  std::vector<double> c(static_cast<size_t>(n + 1), 0.0);
  const int dn = static_cast<int>(den.size()) - 1;
  for (int k = 0; k <= n; ++k) {
    double s = k < static_cast<int>(num.size()) ? num[static_cast<size_t>(k)] : 0.0;
    for (int j = 1; j <= std::min(k, dn); ++j)
      s -= den[static_cast<size_t>(j)] * c[static_cast<size_t>(k - j)];
    c[static_cast<size_t>(k)] = s / den[0];
  }
  return c;
}

CoefficientProvider::CoefficientProvider() : cache_(std::make_shared<Cache>()) {}

CoefficientProvider CoefficientProvider::explicit_list(std::map<int, double> e) {
  CoefficientProvider p;
  for (auto [k, v] : e) p.add_explicit(k, v);
  return p;
}

CoefficientProvider CoefficientProvider::rational(std::vector<double> num,
                                                  std::vector<double> den) {
  CoefficientProvider p;
  p.set_rational(std::move(num), std::move(den));
  return p;
}

CoefficientProvider CoefficientProvider::builtin(const std::string& name) {
  CoefficientProvider p;
  p.set_builtin(name);
  return p;
}

CoefficientProvider& CoefficientProvider::add_explicit(int k, double v) {
  if (k < 0) throw ParseError("coefficient index must be non-negative");
  explicit_[k] += v;
  return *this;
}

CoefficientProvider& CoefficientProvider::set_rational(std::vector<double> num,
                                                       std::vector<double> den) {
  if (den.empty() || den[0] == 0.0)
    throw DomainError("rational denominator needs a nonzero constant term");
  num_ = std::move(num);
  den_ = std::move(den);
  cache_ = std::make_shared<Cache>();
  return *this;
}

CoefficientProvider& CoefficientProvider::set_builtin(const std::string& name,
                                                      double scale) {
  static const char* known[] = {"zero", "x2", "geometric2", "exp2"};
  bool ok = false;
  for (const char* k : known) ok = ok || name == k;
  if (!ok) throw ParseError("unknown builtin coefficient provider: " + name);
  builtin_ = name;
  scale_ = scale;
  return *this;
}

CoefficientProvider CoefficientProvider::scaled(double factor) const {
  CoefficientProvider p;
  for (auto [k, v] : explicit_) p.explicit_[k] = v * factor;
  if (has_rational()) {
    std::vector<double> num = num_;
    for (double& v : num) v *= factor;
    p.set_rational(std::move(num), den_);
  }
  if (!builtin_.empty()) p.set_builtin(builtin_, scale_ * factor);
  return p;
}

double CoefficientProvider::rational_coeff(int k) const {
  if (!has_rational()) return 0.0;
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto& t = cache_->rational_terms;
  if (static_cast<int>(t.size()) <= k) {
    const int n = std::max(k, 2 * static_cast<int>(t.size()) + 16);
    t = expand_rational(num_, den_, n);
  }
  return t[static_cast<size_t>(k)];
}

double CoefficientProvider::builtin_coeff(int k) const {
  if (builtin_.empty() || builtin_ == "zero") return 0.0;
  if (builtin_ == "x2") return k == 2 ? scale_ : 0.0;
  if (builtin_ == "geometric2") return k >= 2 ? scale_ : 0.0;
  if (builtin_ == "exp2") return k >= 2 ? scale_ * std::exp(-std::lgamma(k + 1.0)) : 0.0;
  return 0.0;
}

double CoefficientProvider::coeff(int k) const {
  if (k < 0) return 0.0;
  double v = rational_coeff(k) + builtin_coeff(k);
  auto it = explicit_.find(k);
  if (it != explicit_.end()) v += it->second;
  return v;
}

std::vector<double> CoefficientProvider::dense(int n) const {
  std::vector<double> c(static_cast<size_t>(std::max(n + 1, 0)));
  for (int k = 0; k <= n; ++k) c[static_cast<size_t>(k)] = coeff(k);
  return c;
}

bool CoefficientProvider::is_zero() const {
  if (has_rational()) {
    for (double v : num_)
      if (v != 0.0) return false;
  }
  if (!builtin_.empty() && builtin_ != "zero" && scale_ != 0.0) return false;
  for (auto [k, v] : explicit_)
    if (v != 0.0) return false;
  return true;
}

int CoefficientProvider::support_bound() const {
  if (has_rational() && den_.size() > 1) return -1;
  if (builtin_ == "geometric2" || builtin_ == "exp2") return -1;
  int m = builtin_ == "x2" ? 2 : 0;
  if (has_rational()) m = std::max(m, static_cast<int>(num_.size()) - 1);
  if (!explicit_.empty()) m = std::max(m, explicit_.rbegin()->first);
  return m;
}

json CoefficientProvider::to_json() const {
  json j = json::object();
  if (!explicit_.empty()) {
    json arr = json::array();
    for (auto [k, v] : explicit_) arr.push_back({{"k", k}, {"v", v}});
    j["explicit"] = arr;
  }
  if (has_rational()) j["rational"] = {{"num", num_}, {"den", den_}};
  if (!builtin_.empty()) {
    j["builtin"] = builtin_;
    if (scale_ != 1.0) j["scale"] = scale_;
  }
  return j;
}

CoefficientProvider CoefficientProvider::from_json(const json& j) {
  CoefficientProvider p;
  if (j.is_null()) return p;
  if (j.is_array()) {  // shorthand: dense coefficient list by power
    for (size_t k = 0; k < j.size(); ++k)
      if (j[k].get<double>() != 0.0) p.add_explicit(static_cast<int>(k), j[k].get<double>());
    return p;
  }
  if (!j.is_object()) throw ParseError("coefficient provider must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key != "explicit" && key != "rational" && key != "builtin" && key != "scale")
      throw ParseError("unknown coefficient provider field: " + key);
  }
  if (j.contains("explicit")) {
    for (const auto& e : j.at("explicit"))
      p.add_explicit(e.at("k").get<int>(), e.at("v").get<double>());
  }
  if (j.contains("rational")) {
    const auto& r = j.at("rational");
    p.set_rational(r.at("num").get<std::vector<double>>(),
                   r.at("den").get<std::vector<double>>());
  }
  if (j.contains("builtin")) {
    p.set_builtin(j.at("builtin").get<std::string>(), j.value("scale", 1.0));
  }
  return p;
}

void BivariateProvider::add(int k, int l, double v) {
  if (l < 1) throw ParseError("h entries need l >= 1");
  rows_[l].add_explicit(k, v);
}

void BivariateProvider::set_row(int l, CoefficientProvider row) {
  if (l < 1) throw ParseError("h rows need l >= 1");
  rows_[l] = std::move(row);
}

double BivariateProvider::coeff(int k, int l) const {
  auto it = rows_.find(l);
  return it == rows_.end() ? 0.0 : it->second.coeff(k);
}

int BivariateProvider::max_l() const {
  int m = 0;
  for (const auto& [l, row] : rows_)
    if (!row.is_zero()) m = std::max(m, l);
  return m;
}

bool BivariateProvider::is_zero() const { return max_l() == 0; }

json BivariateProvider::to_json() const {
  json arr = json::array();
  for (const auto& [l, row] : rows_) {
    for (auto [k, v] : row.explicit_entries())
      arr.push_back({{"k", k}, {"l", l}, {"v", v}});
    if (row.has_rational())
      arr.push_back({{"l", l},
                     {"rational", {{"num", row.numerator()}, {"den", row.denominator()}}}});
    if (!row.builtin_name().empty()) {
      json e = {{"l", l}, {"builtin", row.builtin_name()}};
      if (row.scale() != 1.0) e["scale"] = row.scale();
      arr.push_back(e);
    }
  }
  return arr;
}

BivariateProvider BivariateProvider::from_json(const json& j) {
  BivariateProvider h;
  if (j.is_null()) return h;
  if (!j.is_array()) throw ParseError("h must be an array of terms");
  for (const auto& e : j) {
    const int l = e.at("l").get<int>();
    if (e.contains("v")) {
      h.add(e.at("k").get<int>(), l, e.at("v").get<double>());
    } else {
      json sub = json::object();
      if (e.contains("rational")) sub["rational"] = e.at("rational");
      if (e.contains("builtin")) sub["builtin"] = e.at("builtin");
      if (e.contains("scale")) sub["scale"] = e.at("scale");
      if (sub.empty()) throw ParseError("h term needs v, rational or builtin");
      CoefficientProvider row = CoefficientProvider::from_json(sub);
      CoefficientProvider& cur = h.rows_[l];
      if (row.has_rational()) cur.set_rational(row.numerator(), row.denominator());
      if (!row.builtin_name().empty()) cur.set_builtin(row.builtin_name(), row.scale());
    }
  }
  return h;
}

double NonlinearitySpec::f_at(int k, double eps) const {
  double v = f.coeff(k);
  if (eps != 0.0) v += eps * f_eps.coeff(k);
  return v;
}

double NonlinearitySpec::h_at(int k, int l, double eps) const {
  double v = h.coeff(k, l);
  if (eps != 0.0) v += eps * h_eps.coeff(k, l);
  return v;
}

int NonlinearitySpec::max_l() const { return std::max(h.max_l(), h_eps.max_l()); }

CoefficientSlot NonlinearitySpec::slot(double eps, int n, bool scaled) const {
  CoefficientSlot s;
  s.mu = mu;
  s.f.assign(static_cast<size_t>(n + 1), 0.0);
  for (int k = 2; k <= n; ++k) {
    double v = f_at(k, eps);
    if (scaled && v != 0.0) v *= std::pow(eps, k - 2);
    s.f[static_cast<size_t>(k)] = v;
  }
  const int lmax = max_l();
  s.h.assign(static_cast<size_t>(lmax + 1), {});
  for (int l = 1; l <= lmax; ++l) {
    int kmax = n;
    const auto bound = [&](const BivariateProvider& bp) {
      auto it = bp.rows().find(l);
      return it == bp.rows().end() ? 0 : it->second.support_bound();
    };
    const int b1 = bound(h), b2 = eps != 0.0 ? bound(h_eps) : 0;
    if (b1 >= 0 && b2 >= 0) kmax = std::min(n, std::max(b1, b2));
    auto& row = s.h[static_cast<size_t>(l)];
    row.assign(static_cast<size_t>(kmax + 1), 0.0);
    for (int k = 1; k <= kmax; ++k) {
      double v = h_at(k, l, eps);
      if (scaled && v != 0.0) v *= std::pow(eps, k + l - 2);
      row[static_cast<size_t>(k)] = v;
    }
  }
  return s;
}

NonlinearitySpec NonlinearitySpec::with_f2_shift(double q) const {
  NonlinearitySpec s = *this;
  s.f.add_explicit(2, q);
  return s;
}

void NonlinearitySpec::validate(int check_order) const {
  if (!(a0 > -2.0) || !std::isfinite(a0)) {
    std::ostringstream os;
    os.precision(17);
    os << "formal invariant a0 = " << a0 << " must exceed -2";
    throw HypothesisViolation(os.str());
  }
  for (int k = 0; k <= check_order; ++k) {
    if (h.coeff(k, 1) != 0.0)
      throw HypothesisViolation("h_{" + std::to_string(k) +
                                ",1} must vanish at eps = 0");
  }
  if (!(mu >= 0.0)) throw HypothesisViolation("mu must be non-negative");
  if (!(rho > 0.0) || !(B > 0.0))
    throw HypothesisViolation("rho and B must be positive");
  if (f.coeff(0) != 0.0 || f.coeff(1) != 0.0)
    throw HypothesisViolation("f must start at order x^2");
}

std::vector<std::string> NonlinearitySpec::advisories(int check_order) const {
  std::vector<std::string> w;
  for (int k = 2; k <= check_order; ++k) {
    const double bound = B * std::pow(rho, -k);
    if (std::fabs(f.coeff(k)) > bound) {
      w.push_back("|f_" + std::to_string(k) + "| exceeds B rho^-k");
      break;
    }
  }
  for (int l = 1; l <= max_l(); ++l) {
    for (int k = 1; k + l <= check_order; ++k) {
      if (std::fabs(h.coeff(k, l)) > std::pow(rho, -k - l)) {
        w.push_back("|h_{" + std::to_string(k) + "," + std::to_string(l) +
                    "}| exceeds rho^-(k+l)");
        break;
      }
    }
  }
  return w;
}

NonlinearitySpec zero_spec(double a0) {
  NonlinearitySpec s;
  s.name = "zero";
  s.a0 = a0;
  return s;
}

NonlinearitySpec euler_spec() {
  NonlinearitySpec s;
  s.name = "euler";
  s.f.add_explicit(2, 1.0);
  return s;
}

NonlinearitySpec linear_spec(const std::vector<double>& f, double a0) {
  NonlinearitySpec s;
  s.name = "linear";
  s.a0 = a0;
  for (size_t k = 2; k < f.size(); ++k)
    if (f[k] != 0.0) s.f.add_explicit(static_cast<int>(k), f[k]);
  return s;
}

NonlinearitySpec family_spec(double f2, double p) {
  NonlinearitySpec s;
  s.name = "family";
  s.a0 = 0.0;
  s.f.set_rational({0.0, 0.0, f2, p - f2}, {1.0, -1.0});
  s.mu = p;
  s.h.add(1, 2, 3.0);
  s.h.add(1, 3, 1.0);
  s.rho = 1.0;
  s.B = std::max({1.0, std::fabs(f2), std::fabs(p)}) * 2.0;
  return s;
}

namespace {

NonlinearitySpec builtin_spec(const json& doc) {
  const std::string name = doc.at("builtin").get<std::string>();
  if (name == "euler") return euler_spec();
  if (name == "zero") return zero_spec(doc.value("a0", 0.0));
  if (name == "family")
    return family_spec(doc.value("f2", 1.0), doc.value("p", 1.0));
  throw ParseError("unknown builtin spec: " + name);
}

}  // namespace

NonlinearitySpec load_spec(const json& doc) {
  NonlinearitySpec s;
  try {
    if (!doc.is_object()) throw ParseError("spec document must be a JSON object");
    if (doc.contains("builtin")) {
      s = builtin_spec(doc);
    } else {
      static const char* allowed[] = {"name", "a0", "a1", "mu", "rho", "B",
                                      "f", "h", "f_eps", "h_eps"};
      for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ParseError("unknown spec field: " + it.key());
      }
      s.name = doc.value("name", std::string("custom"));
      s.a0 = doc.value("a0", 0.0);
      s.a1 = doc.value("a1", 0.0);
      s.mu = doc.value("mu", 0.0);
      s.rho = doc.value("rho", 1.0);
      s.B = doc.value("B", 1.0);
      if (doc.contains("f")) s.f = CoefficientProvider::from_json(doc.at("f"));
      if (doc.contains("f_eps")) s.f_eps = CoefficientProvider::from_json(doc.at("f_eps"));
      if (doc.contains("h")) s.h = BivariateProvider::from_json(doc.at("h"));
      if (doc.contains("h_eps")) s.h_eps = BivariateProvider::from_json(doc.at("h_eps"));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed spec: ") + e.what());
  }
  s.validate();
  return s;
}

NonlinearitySpec load_spec_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("spec is not valid JSON: ") + e.what());
  }
  return load_spec(doc);
}

NonlinearitySpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_spec_text(ss.str());
}

json serialize(const NonlinearitySpec& spec) {
  json j;
  j["name"] = spec.name;
  j["a0"] = spec.a0;
  if (spec.a1 != 0.0) j["a1"] = spec.a1;
  j["mu"] = spec.mu;
  j["rho"] = spec.rho;
  j["B"] = spec.B;
  j["f"] = spec.f.to_json();
  j["h"] = spec.h.to_json();
  if (!spec.f_eps.is_zero()) j["f_eps"] = spec.f_eps.to_json();
  if (!spec.h_eps.is_zero()) j["h_eps"] = spec.h_eps.to_json();
  return j;
}

}  // namespace snlab
