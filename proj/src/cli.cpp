#include "snlab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "snlab/center_manifold.hpp"
#include "snlab/csv.hpp"
#include "snlab/errors.hpp"
#include "snlab/flow_lab.hpp"
#include "snlab/locus.hpp"
#include "snlab/nonlinearity.hpp"
#include "snlab/parallel.hpp"
#include "snlab/unfolding.hpp"

namespace snlab {

using nlohmann::json;

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw DomainError("grid must have the form a:b:n, got " + text);
  double a, b;
  long n;
  try {
    size_t pos = 0;
    a = std::stod(parts[0], &pos);
    if (pos != parts[0].size()) throw std::invalid_argument("a");
    b = std::stod(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument("b");
    n = std::stol(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument("n");
  } catch (const std::exception&) {
    throw DomainError("grid must have the form a:b:n, got " + text);
  }
  if (n < 1 || n > 10000000) throw DomainError("grid point count out of range");
  std::vector<double> g(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) g[static_cast<size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return g;
}

namespace {

struct Common {
  std::string spec_path;
  std::string out_path;
  std::string format = "csv";
  int K = -1;
  double tol = -1.0;
  std::optional<double> eps;
  std::optional<int> N;
  std::optional<double> alpha;
  std::string alpha_grid;
  double c = 0.1;
  int jobs = default_jobs();
};

json json_number(double v) {
  if (std::isfinite(v) && std::fabs(v) < 9.0e15 && v == std::trunc(v))
    return static_cast<long long>(v);
  return v;
}

// One table, emitted as CSV or JSON lines.
class Table {
 public:
  explicit Table(std::vector<std::string> cols) : cols_(std::move(cols)) {}
  void add(std::vector<double> row) { rows_.push_back(std::move(row)); }
  void add_text(std::vector<std::string> row) { text_rows_.push_back(std::move(row)); }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "csv") {
      CsvWriter w(os, cols_);
      for (const auto& r : rows_) {
        std::vector<std::string> cells;
        for (double v : r) cells.push_back(format_g17(v));
        w.row(cells);
      }
      for (const auto& r : text_rows_) w.row(r);
    } else {
      for (const auto& r : rows_) {
        json j = json::object();
        for (size_t i = 0; i < cols_.size(); ++i) j[cols_[i]] = json_number(r[i]);
        os << j.dump() << '\n';
      }
      for (const auto& r : text_rows_) {
        json j = json::object();
        for (size_t i = 0; i < cols_.size(); ++i) j[cols_[i]] = r[i];
        os << j.dump() << '\n';
      }
    }
  }

 private:
  std::vector<std::string> cols_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::vector<std::string>> text_rows_;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw IoError("cannot open output file: " + path);
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

NonlinearitySpec require_spec(const Common& c) {
  if (c.spec_path.empty()) throw DomainError("--spec is required for this subcommand");
  return load_spec_file(c.spec_path);
}

FamilyBuilder family_from(const Common& c) {
  if (c.spec_path.empty()) return default_family();
  std::ifstream in(c.spec_path);
  if (!in) throw IoError("cannot open spec file: " + c.spec_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("family template is not valid JSON: ") + e.what());
  }
  if (!doc.contains("family")) throw ParseError("family template needs a \"family\" key");
  if (doc.at("family").is_string()) {
    if (doc.at("family").get<std::string>() != "default")
      throw ParseError("unknown family name");
    return default_family();
  }
  return load_family(doc);
}

UnfoldingContext context_from(const Common& c, double a_eps_hint = 0.0) {
  if (c.eps && (c.N || c.alpha))
    throw DomainError("give either --eps or --N with --alpha, not both");
  if (c.eps) return UnfoldingContext::from_eps(*c.eps, a_eps_hint);
  if (c.N && c.alpha) return UnfoldingContext::from_N_alpha(*c.N, *c.alpha, a_eps_hint);
  throw DomainError("this subcommand needs --eps or --N with --alpha");
}

void check_format(const Common& c) {
  if (c.format != "csv" && c.format != "json")
    throw DomainError("--format must be csv or json");
}

void add_common(CLI::App* sub, Common& c, bool spec, bool ctx) {
  if (spec) sub->add_option("--spec", c.spec_path, "problem spec (JSON)");
  sub->add_option("--out", c.out_path, "output file (default stdout)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  if (ctx) {
    sub->add_option("--eps", c.eps, "unfolding parameter");
    sub->add_option("--N", c.N, "integer part of 1/eps");
    sub->add_option("--alpha", c.alpha, "fractional part of 1/eps");
  }
}

int cmd_center(const Common& c, std::ostream& out, std::ostream& err) {
  check_format(c);
  const NonlinearitySpec spec = require_spec(c);
  const int K = c.K > 0 ? c.K : 120;
  const double tol = c.tol > 0 ? c.tol : 1e-12;
  if (K < 2) throw DomainError("--K must be >= 2");
  const CenterManifoldData d = center_coeffs(spec, K);
  Output o(c.out_path, out);
  Table t({"k", "m_log_abs", "m_sign", "m", "S", "increment"});
  for (int k = 2; k <= K; ++k) {
    const auto& m = d.m[static_cast<size_t>(k)];
    t.add({double(k), m.log_abs, double(m.sign), m.to_double(), d.S[static_cast<size_t>(k)],
           d.increment[static_cast<size_t>(k)]});
  }
  t.write(o.stream(), c.format);
  json summary = {{"S_infty_estimate", d.S_infty_estimate},
                  {"residual", d.residual},
                  {"K", K},
                  {"converged", d.residual <= tol}};
  for (const auto& w : spec.advisories()) summary["advisories"].push_back(w);
  err << json{{"summary", summary}}.dump() << '\n';
  return 0;
}

int cmd_scan(const Common& c, const std::string& f2g, const std::string& pg,
             std::ostream& out, std::ostream& err) {
  check_format(c);
  const FamilyBuilder fam = family_from(c);
  LocusOptions lo;
  lo.K = c.K > 0 ? c.K : 100;
  lo.tol = c.tol > 0 ? c.tol : 1e-12;
  lo.jobs = c.jobs;
  const auto pts = sinfty_scan(fam, parse_grid(f2g), parse_grid(pg), lo);
  Output o(c.out_path, out);
  Table t({"p", "f2", "S", "residual", "flagged"});
  size_t flagged = 0;
  for (const auto& p : pts) {
    t.add({p.p, p.f2, p.S, p.residual, p.flagged ? 1.0 : 0.0});
    flagged += p.flagged;
  }
  t.write(o.stream(), c.format);
  err << json{{"summary", {{"points", pts.size()}, {"flagged", flagged}}}}.dump() << '\n';
  return 0;
}

int cmd_fold(const Common& c, double p_lo, double p_hi, const std::string& window,
             std::ostream& out) {
  const FamilyBuilder fam = family_from(c);
  FoldOptions fo;
  fo.K = c.K > 0 ? c.K : 100;
  if (!window.empty()) {
    const auto w = parse_grid(window + ":2");
    fo.f2_lo = w[0];
    fo.f2_hi = w[1];
  }
  const double tol = c.tol > 0 ? c.tol : 1e-6;
  const FoldResult r = fold_find(fam, p_lo, p_hi, tol, fo);
  Output o(c.out_path, out);
  o.stream() << r.to_json().dump() << '\n';
  return 0;
}

int cmd_unfold(const Common& c, std::ostream& out, std::ostream& err) {
  check_format(c);
  const NonlinearitySpec spec = require_spec(c);
  UnfoldingContext ctx = context_from(c);
  ctx = ctx.with_a(spec.a_at(ctx.eps()));
  const int K = c.K > 0 ? c.K : ctx.N();
  if (K < 2) throw DomainError("--K must be >= 2");
  const WeakManifoldExpansion e = weak_manifold_coeffs(spec, ctx, K);
  Output o(c.out_path, out);
  Table t({"k", "wbar_log_abs", "wbar_sign", "Sbar", "mbar_log_abs", "mbar_sign", "mbar"});
  for (int k = 2; k <= K; ++k) {
    const SignedLogValue w = wbar(e.ctx, k);
    const SignedLogValue& m = e.mbar[static_cast<size_t>(k)];
    t.add({double(k), w.log_abs, double(w.sign), e.Sbar[static_cast<size_t>(k)], m.log_abs,
           double(m.sign), m.to_double()});
  }
  t.write(o.stream(), c.format);
  json summary = {{"eps", ctx.eps()}, {"N", ctx.N()}, {"alpha", ctx.alpha()}, {"K", K}};
  if (ctx.N() >= 2 && K >= ctx.N()) summary["Sbar_N"] = e.Sbar[static_cast<size_t>(ctx.N())];
  for (const auto& w : e.warnings) summary["warnings"].push_back(w);
  err << json{{"summary", summary}}.dump() << '\n';
  return 0;
}

int cmd_vbar(const Common& c, double a, const std::string& xg, std::ostream& out) {
  check_format(c);
  const UnfoldingContext ctx = context_from(c, a);
  const double tol = c.tol > 0 ? c.tol : 1e-14;
  const auto xs = parse_grid(xg);
  Output o(c.out_path, out);
  Table t({"xbar", "Vbar", "Ubar", "T_series", "T_quadrature", "sigma"});
  for (double x : xs) {
    const double qt = (x >= -ctx.eps() && x < 1.0) ? T_monomial_quadrature(ctx, x) : NAN;
    t.add({x, eval_Vbar(ctx, x, tol), eval_Ubar(ctx, x, tol), T_monomial_series(ctx, x, tol),
           qt, sigma_eps(ctx, x)});
  }
  t.write(o.stream(), c.format);
  return 0;
}

int cmd_flap(const Common& c, std::ostream& out, std::ostream& err) {
  check_format(c);
  const NonlinearitySpec spec = require_spec(c);
  if (!c.N) throw DomainError("flap needs --N");
  const std::vector<double> grid =
      c.alpha_grid.empty() ? parse_grid("0.05:0.95:19") : parse_grid(c.alpha_grid);
  const FlapSweep sw = flap_sweep(spec, *c.N, grid, c.c, c.jobs);
  Output o(c.out_path, out);
  if (c.format == "json") {
    for (const auto& r : sw.reports) o.stream() << r.to_json().dump() << '\n';
  } else {
    CsvWriter w(o.stream(), {"N", "alpha", "side", "crossed_line", "predicted_line", "agree",
                             "x_cross", "steps"});
    for (const auto& r : sw.reports)
      w.row({CsvWriter::integer(r.N), format_g17(r.alpha), to_string(r.side),
             to_string(r.crossed_line), to_string(r.predicted_line), r.agree ? "1" : "0",
             format_g17(r.x_cross), CsvWriter::integer(r.steps)});
  }
  json summary = {{"transitions", json::array()}, {"errors", sw.errors}};
  for (const auto& tr : sw.transitions)
    summary["transitions"].push_back({{"alpha_lo", tr.alpha_lo}, {"alpha_hi", tr.alpha_hi}});
  err << json{{"summary", summary}}.dump() << '\n';
  return 0;
}

int cmd_portrait(const Common& c, std::ostream& out) {
  check_format(c);
  const NonlinearitySpec spec = require_spec(c);
  UnfoldingContext ctx = context_from(c);
  ctx = ctx.with_a(spec.a_at(ctx.eps()));
  const double eps = ctx.eps();
  TrackOptions opts;
  opts.keep_trace = true;
  const double S = estimate_S_infty(spec, 120).value;
  opts.s_sign = S > 0 ? 1 : (S < 0 ? -1 : 0);
  Output o(c.out_path, out);
  Table t({"manifold", "xbar", "ybar"});
  auto emit = [&](const char* name, double x, double y) {
    t.add_text({name, format_g17(x), format_g17(y)});
  };
  for (Side side : {Side::left, Side::right}) {
    const FlapReport r = track_wws(spec, ctx, c.c, side, opts);
    const char* name = side == Side::left ? "ws_left" : "ws_right";
    for (const Vec2& s : r.trace) emit(name, s[0] / eps, s[1] / eps);
  }
  const WuResult wu = track_wu(spec, ctx);
  for (size_t i = 0; i < wu.inner.size(); ++i) emit("wu_inner", wu.inner.xs()[i], wu.inner.ys()[i]);
  for (size_t i = 0; i < wu.outer.size(); ++i) emit("wu_outer", wu.outer.xs()[i], wu.outer.ys()[i]);
  const double ylim = c.c / eps;
  for (int i = 0; i <= 20; ++i) {
    const double y = -ylim + 2 * ylim * i / 20;
    emit("ss_node", 0.0, y);
  }
  for (int i = 0; i <= 20; ++i) {
    const double y = -ylim + 2 * ylim * i / 20;
    emit("s_saddle", 1.0, y);
  }
  t.write(o.stream(), c.format);
  return 0;
}

int cmd_baby(const Common& c, const std::string& u_text, const std::string& xg,
             std::ostream& out) {
  check_format(c);
  std::vector<double> u = {0.0, 0.0};
  std::stringstream ss(u_text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      u.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParseError("--u must be a comma-separated list of numbers");
    }
  }
  if (u.size() == 2) throw DomainError("--u needs at least one coefficient");
  const UnfoldingContext ctx = context_from(c);
  Output o(c.out_path, out);
  Table t({"x", "m", "V", "B"});
  for (double x : parse_grid(xg)) {
    const double m = baby_exact(u, ctx, x), v = baby_V(u, ctx, x);
    t.add({x, m, v, m - v});
  }
  t.write(o.stream(), c.format);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saddle-node normal form laboratory"};
  app.require_subcommand(1, 1);
  Common c;
  std::string f2_grid = "0:10:41", p_grid = "0:2:21", x_grid, u_text, window;
  double p_lo = 1.9, p_hi = 2.0, a = 0.0;

  auto* center = app.add_subcommand("center", "center-manifold coefficients and S_infinity");
  add_common(center, c, true, false);
  center->add_option("--K", c.K, "truncation order");
  center->add_option("--tol", c.tol, "convergence tolerance");

  auto* scan = app.add_subcommand("sinfty-scan", "S_infinity over an (f2, p) grid");
  add_common(scan, c, true, false);
  scan->add_option("--K", c.K, "truncation order (>= 100)");
  scan->add_option("--tol", c.tol, "convergence flag threshold");
  scan->add_option("--f2-grid", f2_grid, "f2 grid a:b:n");
  scan->add_option("--p-grid", p_grid, "p grid a:b:n");

  auto* fold = app.add_subcommand("locus-fold", "fold point of the zero locus");
  add_common(fold, c, true, false);
  fold->add_option("--K", c.K, "truncation order");
  fold->add_option("--tol", c.tol, "tolerance in p");
  fold->add_option("--p-lo", p_lo, "lower end of the p bracket");
  fold->add_option("--p-hi", p_hi, "upper end of the p bracket");
  fold->add_option("--f2-window", window, "f2 search window lo:hi");

  auto* unfold = app.add_subcommand("unfold", "weak-stable manifold coefficients");
  add_common(unfold, c, true, true);
  unfold->add_option("--K", c.K, "truncation order (default N)");

  auto* vbar = app.add_subcommand("vbar", "tracking series profiles");
  add_common(vbar, c, false, true);
  vbar->add_option("--a", a, "value of a at this eps");
  vbar->add_option("--tol", c.tol, "relative tail tolerance");
  vbar->add_option("--x-grid", x_grid, "xbar grid a:b:n");

  auto* flap = app.add_subcommand("flap", "flapping sweep by shooting");
  add_common(flap, c, true, false);
  flap->add_option("--N", c.N, "integer part of 1/eps");
  flap->add_option("--alpha-grid", c.alpha_grid, "alpha grid a:b:n");
  flap->add_option("--c", c.c, "line offset y = +-c");

  auto* portrait = app.add_subcommand("portrait", "samples of the four invariant manifolds");
  add_common(portrait, c, true, true);
  portrait->add_option("--c", c.c, "line offset y = +-c");

  auto* baby = app.add_subcommand("baby", "toy node evaluations");
  add_common(baby, c, false, true);
  baby->add_option("--u", u_text, "u_2,u_3,... coefficients")->required();
  baby->add_option("--x-grid", x_grid, "x grid a:b:n");

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << json{{"error", {{"kind", "usage"}, {"message", e.what()}, {"exit_code", 2}}}}.dump()
        << '\n';
    return 2;
  }

  try {
    if (*center) return cmd_center(c, out, err);
    if (*scan) return cmd_scan(c, f2_grid, p_grid, out, err);
    if (*fold) return cmd_fold(c, p_lo, p_hi, window, out);
    if (*unfold) return cmd_unfold(c, out, err);
    if (*vbar) return cmd_vbar(c, a, x_grid.empty() ? "0:0.75:16" : x_grid, out);
    if (*flap) return cmd_flap(c, out, err);
    if (*portrait) return cmd_portrait(c, out);
    if (*baby) return cmd_baby(c, u_text, x_grid.empty() ? "-0.5:0.5:21" : x_grid, out);
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    err << json{{"error", {{"kind", kind_name(e.kind())}, {"message", e.what()},
                           {"exit_code", code}}}}.dump()
        << '\n';
    return code;
  } catch (const std::exception& e) {
    err << json{{"error", {{"kind", "internal"}, {"message", e.what()}, {"exit_code", 1}}}}
               .dump()
        << '\n';
    return 1;
  }
  return 1;
}

}  // namespace snlab
