#include "snlab/flow_lab.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "snlab/center_manifold.hpp"
#include "snlab/errors.hpp"
#include "snlab/parallel.hpp"

namespace snlab {

namespace odeint = boost::numeric::odeint;

namespace {

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

PlanarField PlanarField::original(const NonlinearitySpec& spec, double eps,
                                  int evaluation_order) {
  if (evaluation_order < 10) throw DomainError("evaluation_order must be >= 10");
  PlanarField p;
  p.kind_ = Kind::original;
  p.eps_ = eps;
  p.a_ = spec.a_at(eps);
  p.order_ = evaluation_order;
  const CoefficientSlot slot = spec.slot(eps, evaluation_order, false);
  p.f_ = slot.f;
  p.h_ = slot.h;
  for (auto& row : p.h_)
    for (double& v : row) v *= slot.mu;
  return p;
}

PlanarField PlanarField::scaled(const NonlinearitySpec& spec, double eps,
                                int evaluation_order) {
  PlanarField p = original(spec, eps, evaluation_order);
  p.kind_ = Kind::scaled;
  return p;
}

PlanarField PlanarField::baby(const std::vector<double>& u, double eps) {
  PlanarField p;
  p.kind_ = Kind::baby;
  p.eps_ = eps;
  p.f_ = u;
  p.order_ = static_cast<int>(u.size()) - 1;
  return p;
}

PlanarField PlanarField::custom(std::function<Vec2(double, double)> rhs) {
  PlanarField p;
  p.kind_ = Kind::custom;
  p.custom_ = std::move(rhs);
  return p;
}

double PlanarField::g(double x, double y) const {
  double v = horner(f_, x);
  double yl = 1.0;
  for (size_t l = 1; l < h_.size(); ++l) {
    yl *= y;
    if (!h_[l].empty()) v += yl * horner(h_[l], x);
  }
  return v;
}

double PlanarField::g_y(double x, double y) const {
  double v = 0.0;
  double ylm1 = 1.0;
  for (size_t l = 1; l < h_.size(); ++l) {
    if (!h_[l].empty()) v += l * ylm1 * horner(h_[l], x);
    ylm1 *= y;
  }
  return v;
}

Vec2 PlanarField::operator()(double x, double y) const {
  switch (kind_) {
    case Kind::original:
      return {(x - eps_) * x, -y * (1.0 + a_ * x) + g(x, y)};
    case Kind::scaled: {
      const double X = eps_ * x, Y = eps_ * y;
      return {eps_ * x * (x - 1.0), -y * (1.0 + a_ * X) + g(X, Y) / eps_};
    }
    case Kind::baby:
      return {-eps_ * x, -y + horner(f_, x)};
    case Kind::custom:
      return custom_(x, y);
  }
  return {0.0, 0.0};
}

Trajectory integrate(const PlanarField& field, Vec2 start, Direction dir,
                     const StopCondition& stop, double rtol, double atol) {
  if (!std::isfinite(start[0]) || !std::isfinite(start[1]))
    throw DomainError("integration start must be finite");
  const double sgn = dir == Direction::forward ? 1.0 : -1.0;
  auto sys = [&](const Vec2& s, Vec2& ds, double) {
    const Vec2 v = field(s[0], s[1]);
    ds[0] = sgn * v[0];
    ds[1] = sgn * v[1];
  };
  auto stepper = odeint::make_dense_output(atol, rtol, odeint::runge_kutta_dopri5<Vec2>());
  Trajectory tr;
  tr.t.push_back(0.0);
  tr.s.push_back(start);
  stepper.initialize(start, 0.0, 1e-4);

  struct Crossing {
    double tau;
    StopReason reason;
    double line;
  };

  auto out_of_box = [&](const Vec2& s) {
    return s[0] < stop.x_min || s[0] > stop.x_max || s[1] < stop.y_min || s[1] > stop.y_max;
  };
  auto locate = [&](double t0, double t1, auto&& g) {
    // g(state) changes sign on [t0, t1]; bisection on the dense output
    Vec2 tmp;
    stepper.calc_state(t0, tmp);
    const bool s0 = g(tmp) > 0;
    for (int it = 0; it < 200 && t1 - t0 > 1e-15 * std::max(1.0, std::fabs(t1)); ++it) {
      const double tm = 0.5 * (t0 + t1);
      stepper.calc_state(tm, tmp);
      if ((g(tmp) > 0) == s0) t0 = tm; else t1 = tm;
    }
    return t1;
  };

  while (true) {
    if (tr.steps >= stop.max_steps) {
      tr.reason = StopReason::budget;
      break;
    }
    std::pair<double, double> iv;
    try {
      iv = stepper.do_step(sys);
    } catch (const std::exception& e) {
      throw StiffnessError(std::string("step size control failed: ") + e.what());
    }
    ++tr.steps;
    const double h = iv.second - iv.first;
    tr.min_step = std::min(tr.min_step, h);
    if (h < 1e-14) throw StiffnessError("step size underflow below 1e-14");
    const Vec2 prev = tr.s.back();
    const Vec2 cur = stepper.current_state();
    if (!std::isfinite(cur[0]) || !std::isfinite(cur[1]))
      throw StiffnessError("integration produced a non-finite state");

    std::vector<Crossing> hits;
    for (double c : stop.y_lines) {
      if ((prev[1] - c) * (cur[1] - c) <= 0.0 && prev[1] != c)
        hits.push_back({locate(iv.first, iv.second, [c](const Vec2& s) { return s[1] - c; }),
                        StopReason::y_line, c});
    }
    for (double c : stop.x_lines) {
      if ((prev[0] - c) * (cur[0] - c) <= 0.0 && prev[0] != c)
        hits.push_back({locate(iv.first, iv.second, [c](const Vec2& s) { return s[0] - c; }),
                        StopReason::x_line, c});
    }
    if (out_of_box(cur)) {
      hits.push_back({locate(iv.first, iv.second,
                             [&](const Vec2& s) { return out_of_box(s) ? 1.0 : -1.0; }),
                      StopReason::box, 0.0});
    }
    if (iv.second >= stop.t_max) {
      hits.push_back({stop.t_max, StopReason::time, 0.0});
    }
    if (!hits.empty()) {
      const auto first = std::min_element(hits.begin(), hits.end(),
                                          [](const Crossing& a, const Crossing& b) {
                                            return a.tau < b.tau;
                                          });
      Vec2 at;
      stepper.calc_state(first->tau, at);
      if (first->reason == StopReason::y_line) at[1] = first->line;
      if (first->reason == StopReason::x_line) at[0] = first->line;
      tr.t.push_back(sgn * first->tau);
      tr.s.push_back(at);
      tr.reason = first->reason;
      tr.line_value = first->line;
      break;
    }
    tr.t.push_back(sgn * iv.second);
    tr.s.push_back(cur);
  }
  return tr;
}

double default_seed_radius(const UnfoldingContext& ctx) {
  return std::min(0.1, 2.0 * ctx.eps());
}

int default_seed_order(const UnfoldingContext& ctx) {
  return std::max(15, ctx.N() + 30);
}

Seed seed_wws(const WeakManifoldExpansion& e, double r0, int side) {
  if (!(r0 > 0.0)) throw DomainError("seed radius must be positive");
  if (e.K < 10) throw SeedQualityError("seed needs at least 10 coefficients");
  const double x = side >= 0 ? r0 : -r0;
  const double lx = std::log(r0);
  double sum = 0.0, comp = 0.0, last = 0.0;
  for (int k = 2; k <= e.K; ++k) {
    const SignedLogValue& m = e.mbar[static_cast<size_t>(k)];
    double term = 0.0;
    if (!m.is_zero()) {
      term = m.sign * std::exp(m.log_abs + k * lx);
      if (x < 0 && k % 2 != 0) term = -term;
    }
    const double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    last = term;
  }
  Seed s{x, sum + comp, std::fabs(last)};
  if (!(s.residual <= 1e-8))
    throw SeedQualityError("seed truncation residual too large; raise K or shrink r0");
  return s;
}

Seed seed_wws_shrinking(const WeakManifoldExpansion& e, double r0, int side) {
  double r = r0;
  for (int i = 0; i < 40; ++i, r *= 0.8) {
    try {
      return seed_wws(e, r, side);
    } catch (const SeedQualityError&) {
    }
  }
  return seed_wws(e, r, side);
}

const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

const char* to_string(Line l) {
  switch (l) {
    case Line::plus_c: return "+c";
    case Line::minus_c: return "-c";
    case Line::none: return "none";
  }
  return "none";
}

const char* to_string(Prediction p) {
  switch (p) {
    case Prediction::plus_c: return "+c";
    case Prediction::minus_c: return "-c";
    case Prediction::not_predicted: return "not-predicted";
  }
  return "not-predicted";
}

nlohmann::json FlapReport::to_json() const {
  return {{"eps", eps},
          {"N", N},
          {"alpha", alpha},
          {"one_minus_alpha", one_minus_alpha},
          {"side", to_string(side)},
          {"crossed_line", to_string(crossed_line)},
          {"predicted_line", to_string(predicted_line)},
          {"agree", agree},
          {"c", c},
          {"x_cross", x_cross},
          {"trace_meta", {{"steps", steps}, {"min_step", min_step},
                          {"seed_residual", seed_residual}}}};
}

Prediction predict_flap(int s, int N, double alpha, double one_minus_alpha,
                        double a0, Side side) {
  if (s == 0) return Prediction::not_predicted;
  auto as_pred = [](int sign) { return sign > 0 ? Prediction::plus_c : Prediction::minus_c; };
  if (side == Side::right) return as_pred(N % 2 == 0 ? s : -s);
  const double lN = std::log(double(N));
  if (std::log(alpha) <= (a0 - N) * lN) return as_pred(s);
  if (std::log(one_minus_alpha) <= (a0 - 1.0 - N) * lN) return as_pred(-s);
  return Prediction::not_predicted;
}

FlapReport track_wws(const NonlinearitySpec& spec, const UnfoldingContext& ctx,
                     double c, Side side, const TrackOptions& opts) {
  if (!(c > 0.0)) throw DomainError("line offset c must be positive");
  const int K = opts.K > 0 ? opts.K : default_seed_order(ctx);
  const double r0 = opts.r0 > 0.0 ? opts.r0 : default_seed_radius(ctx);
  const WeakManifoldExpansion e = weak_manifold_coeffs(spec, ctx, K);
  const int sd = side == Side::right ? 1 : -1;
  const Seed seed = opts.r0 > 0.0 ? seed_wws(e, r0, sd) : seed_wws_shrinking(e, r0, sd);
  const double eps = ctx.eps();

  int s = opts.s_sign;
  if (s == 0) {
    const double S = estimate_S_infty(spec, 120).value;
    s = S > 0 ? 1 : (S < 0 ? -1 : 0);
  }

  FlapReport rep;
  rep.eps = eps;
  rep.N = ctx.N();
  rep.alpha = ctx.alpha();
  rep.one_minus_alpha = ctx.one_minus_alpha();
  rep.side = side;
  rep.c = c;
  rep.seed_residual = seed.residual;
  rep.predicted_line = predict_flap(s, ctx.N(), ctx.alpha(), ctx.one_minus_alpha(),
                                    spec.a0, side);

  const PlanarField field = PlanarField::original(spec, eps);
  StopCondition stop;
  stop.y_lines = {c, -c};
  stop.x_min = -0.9 * spec.rho;
  stop.x_max = 0.9 * spec.rho;
  const Trajectory tr = integrate(field, {eps * seed.xbar, eps * seed.ybar},
                                  Direction::backward, stop);
  rep.steps = tr.steps;
  rep.min_step = tr.min_step;
  if (tr.reason == StopReason::y_line) {
    rep.crossed_line = tr.line_value > 0 ? Line::plus_c : Line::minus_c;
    rep.x_cross = tr.end()[0];
  }
  if (opts.keep_trace) rep.trace = tr.s;
  if (rep.predicted_line != Prediction::not_predicted)
    rep.agree = (rep.predicted_line == Prediction::plus_c && rep.crossed_line == Line::plus_c) ||
                (rep.predicted_line == Prediction::minus_c && rep.crossed_line == Line::minus_c);
  return rep;
}

void GraphSamples::add(double x, double y, double slope) {
  xs_.push_back(x);
  ys_.push_back(y);
  ds_.push_back(slope);
}

void GraphSamples::finalize() {
  std::vector<size_t> idx(xs_.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return xs_[a] < xs_[b]; });
  std::vector<double> x, y, d;
  for (size_t i : idx) {
    if (!x.empty() && xs_[i] <= x.back()) continue;
    x.push_back(xs_[i]);
    y.push_back(ys_[i]);
    d.push_back(ds_[i]);
  }
  xs_ = std::move(x);
  ys_ = std::move(y);
  ds_ = std::move(d);
}

bool GraphSamples::contains(double x) const {
  return !xs_.empty() && x >= xs_.front() && x <= xs_.back();
}

double GraphSamples::at(double x) const {
  if (!contains(x)) throw DomainError("graph sample query outside sampled range");
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  size_t i = it == xs_.end() ? xs_.size() - 1 : static_cast<size_t>(it - xs_.begin());
  if (i == 0) return ys_[0];
  const size_t j = i - 1;
  const double h = xs_[i] - xs_[j];
  const double t = (x - xs_[j]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * ys_[j] + h10 * h * ds_[j] + h01 * ys_[i] + h11 * h * ds_[i];
}

WuResult track_wu(const NonlinearitySpec& spec, const UnfoldingContext& ctx) {
  const double eps = ctx.eps();
  const PlanarField field = PlanarField::original(spec, eps);
  const double a = field.a();
  // saddle: x = eps, -y (1 + a eps) + g(eps, y) = 0
  double y = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double F = -y * (1.0 + a * eps) + field.g(eps, y);
    const double dF = -(1.0 + a * eps) + field.g_y(eps, y);
    if (dF == 0.0) throw SaddleDegenerateError("singular Newton step at saddle");
    const double step = F / dF;
    y -= step;
    if (std::fabs(step) <= 1e-16 * std::max(1.0, std::fabs(y))) break;
  }
  WuResult r;
  r.saddle = {eps, y};
  r.lambda_u = eps;
  r.lambda_s = -(1.0 + a * eps) + field.g_y(eps, y);
  if (!(r.lambda_s < 0.0) || std::fabs(r.lambda_s - r.lambda_u) < 1e-8)
    throw SaddleDegenerateError("saddle eigenvalues are not hyperbolic");
  const double hx = 1e-7 * std::max(eps, 1e-3);
  const double J21 = (field(eps + hx, y)[1] - field(eps - hx, y)[1]) / (2 * hx);
  double vx = 1.0, vy = J21 / (r.lambda_u - r.lambda_s);
  const double nv = std::hypot(vx, vy);
  vx /= nv;
  vy /= nv;
  const double d = 1e-6 * eps;

  auto sample = [&](const Trajectory& tr, GraphSamples& g) {
    for (const Vec2& s : tr.s) {
      const Vec2 v = field(s[0], s[1]);
      if (v[0] == 0.0) continue;
      g.add(s[0] / eps, s[1] / eps, v[1] / v[0]);
    }
    g.finalize();
  };

  StopCondition in_stop;
  in_stop.x_lines = {0.02 * eps};
  in_stop.y_min = -1.0;
  in_stop.y_max = 1.0;
  const Trajectory inner = integrate(field, {eps - d * vx, y - d * vy},
                                     Direction::forward, in_stop);
  sample(inner, r.inner);
  StopCondition out_stop;
  out_stop.x_lines = {2.0 * eps};
  out_stop.y_min = -1.0;
  out_stop.y_max = 1.0;
  const Trajectory outer = integrate(field, {eps + d * vx, y + d * vy},
                                     Direction::forward, out_stop);
  sample(outer, r.outer);

  for (size_t i = 0; i < r.inner.size(); ++i) {
    const double xb = r.inner.xs()[i];
    if (xb >= 0.1 && xb <= 0.9) r.sup_ratio = std::max(r.sup_ratio, std::fabs(r.inner.ys()[i]) / eps);
  }
  return r;
}

GapReport ws_wu_gap(const FlapReport& right_trace, const WuResult& wu, double eps) {
  GapReport g;
  g.min_abs_gap = INFINITY;
  int sgn = 0;
  bool mixed = false;
  for (const Vec2& s : right_trace.trace) {
    const double xb = s[0] / eps;
    if (!wu.inner.contains(xb)) continue;
    const double gap = s[1] / eps - wu.inner.at(xb);
    const int gs = gap > 0 ? 1 : (gap < 0 ? -1 : 0);
    if (sgn == 0) sgn = gs;
    else if (gs != sgn) mixed = true;
    g.min_abs_gap = std::min(g.min_abs_gap, std::fabs(gap));
    ++g.samples;
  }
  g.sign = mixed ? 0 : sgn;
  if (g.samples == 0) g.min_abs_gap = 0.0;
  return g;
}

double baby_exact(const std::vector<double>& u, const UnfoldingContext& ctx, double x) {
  double s = 0.0;
  for (size_t k = 2; k < u.size(); ++k)
    if (u[k] != 0.0)
      s += u[k] / ctx.small_divisor(static_cast<int>(k)) * std::pow(x, static_cast<int>(k));
  return s;
}

double baby_exact(const std::vector<double>& u, double eps, double x) {
  return baby_exact(u, UnfoldingContext::from_eps(eps), x);
}

double baby_V(const std::vector<double>& u, const UnfoldingContext& ctx, double x) {
  const int N = ctx.N();
  auto uk = [&](int k) { return k < static_cast<int>(u.size()) ? u[static_cast<size_t>(k)] : 0.0; };
  return N * uk(N) / ctx.alpha() * std::pow(x, N) -
         (N + 1) * uk(N + 1) / ctx.one_minus_alpha() * std::pow(x, N + 1);
}

double baby_V(const std::vector<double>& u, double eps, double x) {
  return baby_V(u, UnfoldingContext::from_eps(eps), x);
}

Line baby_direct_crossing(const std::vector<double>& u, const UnfoldingContext& ctx,
                          double level, Side side, double delta) {
  const double sd = side == Side::right ? 1.0 : -1.0;
  const int n = 20000;
  for (int i = 1; i < n; ++i) {
    const double x = sd * delta * i / n;
    const double m = baby_exact(u, ctx, x);
    if (m >= level) return Line::plus_c;
    if (m <= -level) return Line::minus_c;
  }
  return Line::none;
}

Line baby_track_crossing(const std::vector<double>& u, const UnfoldingContext& ctx,
                         double level, Side side, double delta) {
  const double sd = side == Side::right ? 1.0 : -1.0;
  // seed well inside the region where |m| < level
  double r0 = delta / 50.0;
  while (std::fabs(baby_exact(u, ctx, sd * r0)) >= 0.5 * level && r0 > 1e-12) r0 *= 0.5;
  const PlanarField field = PlanarField::baby(u, ctx.eps());
  StopCondition stop;
  stop.y_lines = {level, -level};
  stop.x_min = -delta;
  stop.x_max = delta;
  const Trajectory tr = integrate(field, {sd * r0, baby_exact(u, ctx, sd * r0)},
                                  Direction::backward, stop);
  if (tr.reason != StopReason::y_line) return Line::none;
  return tr.line_value > 0 ? Line::plus_c : Line::minus_c;
}

FlapSweep flap_sweep(const NonlinearitySpec& spec,
                     const std::vector<UnfoldingContext>& grid, double c, int jobs) {
  const double S = estimate_S_infty(spec, 120).value;
  TrackOptions opts;
  opts.s_sign = S > 0 ? 1 : (S < 0 ? -1 : 0);
  FlapSweep out;
  const size_t n = grid.size();
  std::vector<FlapReport> reps(2 * n);
  std::vector<std::string> errs(2 * n);
  std::vector<char> ok(2 * n, 0);
  parallel_for(2 * n, jobs, [&](size_t i) {
    const Side side = i % 2 == 0 ? Side::left : Side::right;
    try {
      reps[i] = track_wws(spec, grid[i / 2], c, side, opts);
      ok[i] = 1;
    } catch (const std::exception& e) {
      errs[i] = std::string(to_string(side)) + " alpha=" +
                std::to_string(grid[i / 2].alpha()) + ": " + e.what();
    }
  });
  for (size_t i = 0; i < 2 * n; ++i) {
    if (ok[i]) out.reports.push_back(reps[i]);
    else out.errors.push_back(errs[i]);
  }
  const FlapReport* prev = nullptr;
  for (const FlapReport& r : out.reports) {
    if (r.side != Side::left) continue;
    if (prev && prev->crossed_line == Line::plus_c && r.crossed_line == Line::minus_c)
      out.transitions.push_back({prev->alpha, r.alpha});
    prev = &r;
  }
  return out;
}

FlapSweep flap_sweep(const NonlinearitySpec& spec, int N,
                     const std::vector<double>& alpha_grid, double c, int jobs) {
  std::vector<UnfoldingContext> grid;
  for (double a : alpha_grid)
    grid.push_back(UnfoldingContext::from_N_alpha(N, a, spec.a_at(1.0 / (N + a))));
  return flap_sweep(spec, grid, c, jobs);
}

}  // namespace snlab
