#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snlab/nonlinearity.hpp"
#include "snlab/unfolding.hpp"

namespace snlab {

using Vec2 = std::array<double, 2>;

// Right-hand side of one of the planar systems:
//   original: xdot = (x - eps) x,       ydot = -y (1 + a x) + g(x, y)
//   scaled:   x = eps xbar, y = eps ybar, time unchanged
//   baby:     xdot = -eps x,            ydot = -y + u(x)
class PlanarField {
 public:
  enum class Kind { original, scaled, baby, custom };

  static PlanarField original(const NonlinearitySpec& spec, double eps,
                              int evaluation_order = 400);
  static PlanarField scaled(const NonlinearitySpec& spec, double eps,
                            int evaluation_order = 400);
  static PlanarField baby(const std::vector<double>& u, double eps);
  static PlanarField custom(std::function<Vec2(double, double)> rhs);

  Vec2 operator()(double x, double y) const;
  // g(x, y) and its y-derivative in original coordinates.
  double g(double x, double y) const;
  double g_y(double x, double y) const;

  Kind kind() const { return kind_; }
  double eps() const { return eps_; }
  double a() const { return a_; }
  int evaluation_order() const { return order_; }

 private:
  Kind kind_ = Kind::custom;
  double eps_ = 0.0;
  double a_ = 0.0;
  int order_ = 0;
  std::vector<double> f_;
  std::vector<std::vector<double>> h_;  // h_[l][k], already multiplied by mu
  std::function<Vec2(double, double)> custom_;
};

enum class Direction { forward, backward };

struct StopCondition {
  std::vector<double> y_lines;
  std::vector<double> x_lines;
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
  double y_min = -std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();
  double t_max = 1e6;
  long max_steps = 1000000;
};

enum class StopReason { y_line, x_line, box, time, budget };

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec2> s;
  StopReason reason = StopReason::time;
  double line_value = 0.0;  // the line hit for y_line / x_line
  long steps = 0;
  double min_step = std::numeric_limits<double>::infinity();
  const Vec2& end() const { return s.back(); }
};

// Dormand-Prince 5(4) with dense output; stops at the first satisfied
// condition. Crossing points are located on the dense output.
Trajectory integrate(const PlanarField& field, Vec2 start, Direction dir,
                     const StopCondition& stop, double rtol = 1e-10,
                     double atol = 1e-12);

struct Seed {
  double xbar = 0.0;
  double ybar = 0.0;
  double residual = 0.0;
};

// Point on ybar = sum mbar_k xbar^k at xbar = r0 (side = +1) or -r0.
Seed seed_wws(const WeakManifoldExpansion& e, double r0, int side = 1);
// Retries seed_wws with r0 reduced by 0.8 per attempt (40 attempts).
Seed seed_wws_shrinking(const WeakManifoldExpansion& e, double r0, int side = 1);
double default_seed_radius(const UnfoldingContext& ctx);
int default_seed_order(const UnfoldingContext& ctx);

enum class Side { left, right };
enum class Line { plus_c, minus_c, none };
enum class Prediction { plus_c, minus_c, not_predicted };

const char* to_string(Side s);
const char* to_string(Line l);
const char* to_string(Prediction p);

struct FlapReport {
  double eps = 0.0;
  int N = 0;
  double alpha = 0.0;
  double one_minus_alpha = 0.0;
  Side side = Side::right;
  Line crossed_line = Line::none;
  Prediction predicted_line = Prediction::not_predicted;
  bool agree = false;
  double c = 0.1;
  double x_cross = 0.0;
  long steps = 0;
  double min_step = 0.0;
  double seed_residual = 0.0;
  std::vector<Vec2> trace;  // original coordinates
  nlohmann::json to_json() const;
};

struct TrackOptions {
  double r0 = 0.0;       // scaled seed radius; <= 0 selects the default
  int K = 0;             // seed order; <= 0 selects the default
  int s_sign = 0;        // sign of S_infinity; 0 computes it
  bool keep_trace = false;
};

Prediction predict_flap(int s, int N, double alpha, double one_minus_alpha,
                        double a0, Side side);

FlapReport track_wws(const NonlinearitySpec& spec, const UnfoldingContext& ctx,
                     double c, Side side, const TrackOptions& opts = {});

// Hermite-interpolated graph ybar(xbar) built from trajectory samples.
class GraphSamples {
 public:
  void add(double x, double y, double slope);
  void finalize();
  bool contains(double x) const;
  double at(double x) const;
  double x_lo() const { return xs_.front(); }
  double x_hi() const { return xs_.back(); }
  size_t size() const { return xs_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }

 private:
  std::vector<double> xs_, ys_, ds_;
};

struct WuResult {
  Vec2 saddle{};        // original coordinates
  double lambda_u = 0.0;
  double lambda_s = 0.0;
  GraphSamples inner;   // branch toward the node, scaled coordinates
  GraphSamples outer;   // branch with xbar > 1
  double sup_ratio = 0.0;  // sup |ybar| / eps over xbar in [0.1, 0.9]
};

// Unstable manifold of the saddle near (eps, O(eps^2)).
WuResult track_wu(const NonlinearitySpec& spec, const UnfoldingContext& ctx);

// Minimum |ybar_ws - ybar_u| over the overlap of a right-side trace and W^u.
struct GapReport {
  double min_abs_gap = 0.0;
  int sign = 0;  // +1, -1, or 0 when the gap changes sign
  int samples = 0;
};
GapReport ws_wu_gap(const FlapReport& right_trace, const WuResult& wu,
                    double eps);

// Toy node: exact weak-stable graph and its resonant part.
double baby_exact(const std::vector<double>& u, const UnfoldingContext& ctx, double x);
double baby_exact(const std::vector<double>& u, double eps, double x);
double baby_V(const std::vector<double>& u, const UnfoldingContext& ctx, double x);
double baby_V(const std::vector<double>& u, double eps, double x);

// First crossing of |y| = level for 0 < |x| < delta on one side.
Line baby_direct_crossing(const std::vector<double>& u, const UnfoldingContext& ctx,
                          double level, Side side, double delta);
Line baby_track_crossing(const std::vector<double>& u, const UnfoldingContext& ctx,
                         double level, Side side, double delta);

struct FlapTransition {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
};

struct FlapSweep {
  std::vector<FlapReport> reports;
  std::vector<std::string> errors;
  std::vector<FlapTransition> transitions;
};

FlapSweep flap_sweep(const NonlinearitySpec& spec,
                     const std::vector<UnfoldingContext>& grid, double c,
                     int jobs = 1);
FlapSweep flap_sweep(const NonlinearitySpec& spec, int N,
                     const std::vector<double>& alpha_grid, double c, int jobs = 1);

}  // namespace snlab
