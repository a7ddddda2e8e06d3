#include <doctest.h>

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "snlab/center_manifold.hpp"
#include "snlab/errors.hpp"
#include "snlab/locus.hpp"
#include "snlab/nonlinearity.hpp"

using namespace snlab;

#ifndef SNLAB_DATA_DIR
#define SNLAB_DATA_DIR "data"
#endif

TEST_CASE("p = 0 column is linear in f2") {
  const FamilyBuilder fam = default_family();
  for (double f2 : {0.0, 0.5, 3.0, 10.0}) CHECK(family_S(fam, f2, 0.0) == doctest::Approx(f2).epsilon(1e-15));
  CHECK(family_S(fam, 0.0, 0.0) == 0.0);
}

TEST_CASE("default family matches the explicit spec") {
  const FamilyBuilder fam = default_family();
  for (double p : {0.3, 1.7})
    CHECK(family_S(fam, 1.2, p) == estimate_S_infty(family_spec(1.2, p), 100).value);
}

TEST_CASE("template family reproduces the default family") {
  std::ifstream in(std::string(SNLAB_DATA_DIR) + "/family.json");
  REQUIRE(in.good());
  const FamilyBuilder loaded = load_family(nlohmann::json::parse(in));
  const FamilyBuilder fam = default_family();
  for (double f2 : {0.4, 2.0})
    for (double p : {0.0, 0.8, 1.9})
      CHECK(std::fabs(family_S(loaded, f2, p) - family_S(fam, f2, p)) <= 1e-13 * std::max(1.0, std::fabs(family_S(fam, f2, p))));
  CHECK_THROWS_AS(load_family(nlohmann::json{{"base", 1}}), ParseError);
}

TEST_CASE("scan ordering, flags and determinism") {
  const FamilyBuilder fam = default_family();
  const std::vector<double> f2s = {0.0, 1.0, 2.0};
  const std::vector<double> ps = {0.0, 1.0};
  LocusOptions one;
  const std::vector<LocusPoint> a = sinfty_scan(fam, f2s, ps, one);
  REQUIRE(a.size() == 6);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].p == ps[i / 3]);
    CHECK(a[i].f2 == f2s[i % 3]);
  }
  CHECK_FALSE(a[1].flagged);
  CHECK(a[4].flagged);
  CHECK(a[4].residual > one.tol);

  LocusOptions many;
  many.jobs = 3;
  const std::vector<LocusPoint> b = sinfty_scan(fam, f2s, ps, many);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].S == b[i].S);

  LocusOptions low;
  low.K = 50;
  CHECK_THROWS_AS(sinfty_scan(fam, f2s, ps, low), DomainError);
}

TEST_CASE("zero locus roots") {
  const FamilyBuilder fam = default_family();
  CHECK(zero_bisect(fam, 0.0, -1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::fabs(zero_bisect(fam, 0.0, -1.0, 1.0)) <= 1e-12);
  CHECK(zero_bisect(fam, 0.5, -5.0, 5.0) == doctest::Approx(0.18560380998633264).epsilon(1e-10));
  CHECK_THROWS_AS(zero_bisect(fam, 0.5, 1.0, 2.0), BracketError);

  // lower and upper branch of one curve, closing toward the fold
  double prev_width = INFINITY;
  for (double p : {0.5, 1.0, 1.5, 1.8, 1.9}) {
    const std::vector<double> r = zero_roots(fam, p, 0.0, 7.0, 1e-12);
    REQUIRE(r.size() == 2);
    CHECK(r[0] < r[1]);
    CHECK(r[1] - r[0] < prev_width);
    prev_width = r[1] - r[0];
  }
  CHECK(prev_width < 0.35);
  CHECK(zero_roots(fam, 1.95, 0.0, 7.0).empty());
}

TEST_CASE("fold of the zero locus") {
  const FoldResult f = fold_find(default_family(), 1.5, 2.5);
  CHECK(std::fabs(f.p_star - 1.94) <= 0.02);
  CHECK(std::fabs(f.f2_star - 1.09) <= 0.02);
  CHECK(f.dS_dp < 0.0);
  CHECK(std::fabs(f.dS_df2) < 1e-3);
  CHECK(std::fabs(f.S_at) < 1e-6);
  CHECK(f.to_json()["p_star"].get<double>() == f.p_star);
  CHECK_THROWS_AS(fold_find(default_family(), 0.5, 1.0), BracketError);
}

TEST_CASE("lower branch slope is positive") {
  const FamilyBuilder fam = default_family();
  for (double p = 0.0; p <= 1.9 + 1e-12; p += 0.1) {
    const double lo = p == 0.0 ? 0.0 : zero_roots(fam, p, 0.0, 4.0).front();
    CHECK(dS_df2(fam(lo, p)) > 0.0);
  }
}

TEST_CASE("dS/df2") {
  CHECK(std::fabs(dS_df2(euler_spec()) - 1.0) <= 1e-9);
  CHECK(std::fabs(dS_df2(linear_spec({0, 0, 1.0}, 1.0)) - 0.5) <= 1e-9);
  const FamilyBuilder fam = default_family();
  double prev = INFINITY;
  for (double p : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double d = std::fabs(dS_df2(fam(1.0, p)) - 1.0);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("dS/dp and the first-order perturbation sign") {
  const FamilyBuilder fam = default_family();
  // S(f2, p) - f2 and p dS/dp agree to first order near p = 0
  const double d = dS_dp(fam, 1.0, 1e-5);
  for (double p : {1e-3, 1e-4}) {
    const double diff = family_S(fam, 1.0, p) - 1.0;
    CHECK(diff * d > 0.0);
    CHECK(diff / (p * d) == doctest::Approx(1.0).epsilon(20 * p));
  }
}
