#pragma once

#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "snlab/nonlinearity.hpp"

namespace snlab {

// Builds the normal-form data for a parameter point (f2, p).
using FamilyBuilder = std::function<NonlinearitySpec(double f2, double p)>;

FamilyBuilder default_family();
// Family from a template document: {"family": {"base": spec, "p_part":
// {"f": provider, "h": terms}}}; g = base with f_2 := f2, plus p (f_p + h_p)
// where the y-dependent part enters through mu = p.
FamilyBuilder load_family(const nlohmann::json& doc);

struct LocusPoint {
  double p = 0.0;
  double f2 = 0.0;
  double S = 0.0;
  double residual = 0.0;
  bool flagged = false;
};

struct LocusOptions {
  int K = 100;
  double tol = 1e-12;  // convergence flag threshold on |S_K - S_{K-1}|
  int jobs = 1;
};

// Grid ordered by p index, then f2 index.
std::vector<LocusPoint> sinfty_scan(const FamilyBuilder& family,
                                    const std::vector<double>& f2_grid,
                                    const std::vector<double>& p_grid,
                                    const LocusOptions& opts = {});

double family_S(const FamilyBuilder& family, double f2, double p, int K = 100);

// All sign changes of S(., p) on a 21-point pre-grid of [lo, hi], refined.
std::vector<double> zero_roots(const FamilyBuilder& family, double p, double lo,
                               double hi, double tol = 1e-12, int K = 100);

// Root of S(., p) in the bracket; throws BracketError without a sign change.
double zero_bisect(const FamilyBuilder& family, double p, double lo, double hi,
                   double tol = 1e-12, int K = 100);

struct FoldResult {
  double p_star = 0.0;
  double f2_star = 0.0;
  double S_at = 0.0;
  double dS_dp = 0.0;
  double dS_df2 = 0.0;
  int iterations = 0;
  nlohmann::json to_json() const;
};

struct FoldOptions {
  double f2_lo = 0.0;
  double f2_hi = 4.0;
  int K = 100;
};

// Fold of the zero locus in p: the value where max_{f2} S(f2, p) crosses 0.
FoldResult fold_find(const FamilyBuilder& family, double p_lo, double p_hi,
                     double tol = 1e-6, const FoldOptions& opts = {});

// Central difference of S_infinity with respect to f_2.
double dS_df2(const NonlinearitySpec& spec, double h_step = 1e-6, int K = 120);
double dS_dp(const FamilyBuilder& family, double f2, double p,
             double h_step = 1e-6, int K = 100);

}  // namespace snlab
