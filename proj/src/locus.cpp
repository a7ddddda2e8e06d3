#include "snlab/locus.hpp"

#include <cmath>

#include "snlab/center_manifold.hpp"
#include "snlab/errors.hpp"
#include "snlab/parallel.hpp"

namespace snlab {

FamilyBuilder default_family() { return [](double f2, double p) { return family_spec(f2, p); }; }

FamilyBuilder load_family(const nlohmann::json& doc) {
  try {
    const auto& fam = doc.at("family");
    const NonlinearitySpec base = load_spec(fam.at("base"));
    CoefficientProvider fp;
    BivariateProvider hp;
    if (fam.contains("p_part")) {
      const auto& pp = fam.at("p_part");
      if (pp.contains("f")) fp = CoefficientProvider::from_json(pp.at("f"));
      if (pp.contains("h")) hp = BivariateProvider::from_json(pp.at("h"));
    }
    return [base, fp, hp](double f2, double p) {
      NonlinearitySpec s = base;
      s.name = "family";
      s.f.add_explicit(2, f2 - base.f.coeff(2));
      const CoefficientProvider scaled = fp.scaled(p);
      // sum explicit parts; rational parts combine over the shared denominator
      for (auto [k, v] : scaled.explicit_entries()) s.f.add_explicit(k, v);
      if (scaled.has_rational()) {
        if (s.f.has_rational())
          throw ParseError("family template cannot combine two rational f parts");
        s.f.set_rational(scaled.numerator(), scaled.denominator());
      }
      if (!scaled.builtin_name().empty()) s.f.set_builtin(scaled.builtin_name(), scaled.scale());
      s.h = hp;
      s.mu = p;
      return s;
    };
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed family template: ") + e.what());
  }
}

double family_S(const FamilyBuilder& family, double f2, double p, int K) {
  return center_coeffs(family(f2, p), K).S_infty_estimate;
}

std::vector<LocusPoint> sinfty_scan(const FamilyBuilder& family,
                                    const std::vector<double>& f2_grid,
                                    const std::vector<double>& p_grid,
                                    const LocusOptions& opts) {
  if (opts.K < 100) throw DomainError("sinfty_scan needs K >= 100");
  const size_t nf = f2_grid.size();
  std::vector<LocusPoint> out(nf * p_grid.size());
  parallel_for(out.size(), opts.jobs, [&](size_t i) {
    LocusPoint& pt = out[i];
    pt.p = p_grid[i / nf];
    pt.f2 = f2_grid[i % nf];
    try {
      const CenterManifoldData d = center_coeffs(family(pt.f2, pt.p), opts.K);
      pt.S = d.S_infty_estimate;
      pt.residual = d.residual;
      pt.flagged = !(d.residual <= opts.tol);
    } catch (const std::exception&) {
      pt.S = NAN;
      pt.residual = NAN;
      pt.flagged = true;
    }
  });
  return out;
}

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double flo, double tol) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> zero_roots(const FamilyBuilder& family, double p, double lo,
                               double hi, double tol, int K) {
  auto S = [&](double f2) { return family_S(family, f2, p, K); };
  const int n = 21;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * i / (n - 1);
    ys[i] = S(xs[i]);
  }
  std::vector<double> roots;
  for (int i = 0; i + 1 < n; ++i) {
    if (ys[i] == 0.0) {
      roots.push_back(xs[i]);
    } else if ((ys[i] > 0) != (ys[i + 1] > 0) && ys[i + 1] != 0.0) {
      roots.push_back(bisect(S, xs[i], xs[i + 1], ys[i], tol));
    }
  }
  if (ys[n - 1] == 0.0) roots.push_back(xs[n - 1]);
  return roots;
}

double zero_bisect(const FamilyBuilder& family, double p, double lo, double hi,
                   double tol, int K) {
  if (!(hi > lo)) throw BracketError("bracket must satisfy lo < hi");
  const std::vector<double> roots = zero_roots(family, p, lo, hi, tol, K);
  if (roots.empty())
    throw BracketError("S_infinity has no sign change in the bracket");
  return roots.front();
}

nlohmann::json FoldResult::to_json() const {
  return {{"p_star", p_star}, {"f2_star", f2_star}, {"S_at_fold", S_at},
          {"dS_dp", dS_dp},   {"dS_df2", dS_df2},   {"iterations", iterations}};
}

namespace {

// max over f2 in [lo, hi] of S(f2, p): coarse grid, then golden section.
std::pair<double, double> max_over_f2(const FamilyBuilder& family, double p,
                                      const FoldOptions& o) {
  auto S = [&](double f2) { return family_S(family, f2, p, o.K); };
  const int n = 21;
  int best = 0;
  double bv = -INFINITY;
  for (int i = 0; i < n; ++i) {
    const double v = S(o.f2_lo + (o.f2_hi - o.f2_lo) * i / (n - 1));
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  const double h = (o.f2_hi - o.f2_lo) / (n - 1);
  double a = o.f2_lo + h * std::max(best - 1, 0);
  double b = o.f2_lo + h * std::min(best + 1, n - 1);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = S(c), fd = S(d);
  while (b - a > 1e-9) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = S(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = S(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, S(x)};
}

}  // namespace

FoldResult fold_find(const FamilyBuilder& family, double p_lo, double p_hi,
                     double tol, const FoldOptions& opts) {
  auto lo = max_over_f2(family, p_lo, opts);
  auto hi = max_over_f2(family, p_hi, opts);
  if (!(lo.second > 0.0 && hi.second < 0.0))
    throw BracketError("p bracket does not straddle the fold (two roots to none)");
  FoldResult r;
  double a = p_lo, b = p_hi;
  std::pair<double, double> at = lo;
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    at = max_over_f2(family, m, opts);
    if (at.second > 0.0) a = m; else b = m;
    ++r.iterations;
  }
  r.p_star = 0.5 * (a + b);
  at = max_over_f2(family, r.p_star, opts);
  r.f2_star = at.first;
  r.S_at = at.second;
  r.dS_dp = dS_dp(family, r.f2_star, r.p_star, 1e-5, opts.K);
  r.dS_df2 = (family_S(family, r.f2_star + 1e-5, r.p_star, opts.K) -
              family_S(family, r.f2_star - 1e-5, r.p_star, opts.K)) / 2e-5;
  return r;
}

double dS_df2(const NonlinearitySpec& spec, double h_step, int K) {
  if (!(h_step > 0.0)) throw DomainError("finite-difference step must be positive");
  const double up = center_coeffs(spec.with_f2_shift(h_step), K).S_infty_estimate;
  const double dn = center_coeffs(spec.with_f2_shift(-h_step), K).S_infty_estimate;
  return (up - dn) / (2.0 * h_step);
}

double dS_dp(const FamilyBuilder& family, double f2, double p, double h_step, int K) {
  return (family_S(family, f2, p + h_step, K) - family_S(family, f2, p - h_step, K)) /
         (2.0 * h_step);
}

}  // namespace snlab
