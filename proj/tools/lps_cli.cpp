// lps: fixture generation and verification front-end.
// Exit codes: 0 all checks pass, 1 violations found, 2 usage or data error.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lps/fixtures.hpp"
#include "lps/geodesic.hpp"
#include "lps/io.hpp"
#include "lps/parallels.hpp"
#include "lps/rigidity.hpp"
#include "lps/sampled.hpp"
#include "lps/splitting.hpp"

using namespace lps;

namespace {

struct Globals {
  Tolerances tol;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  bool seed_given = false;
};

struct Output {
  std::string report;
  std::string plot_dir;
};

struct Loaded {
  Fixture f;
  std::string digest;
};

Loaded load(const std::string& path) {
  const std::string bytes = read_file(path);
  return {load_fixture(path), hex64(fnv1a(bytes))};
}

std::string label(const SampledSpace& s, std::size_t i) {
  return i < s.labels.size() ? s.labels[i] : "#" + std::to_string(i);
}

json num(double v) { return std::isfinite(v) ? json(v) : json(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }

Report start(const std::string& command, const Globals& g, const std::string& digest) {
  Report r;
  r.command = command;
  r.inputs_digest = digest;
  r.tol = g.tol;
  r.threads = g.threads;
  r.seed = g.seed;
  return r;
}

int finish(Report& r, const Output& out, std::chrono::steady_clock::time_point t0) {
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& c : r.checks) std::printf("%s %s %s\n", to_string(c.status), c.name.c_str(), c.data.dump().c_str());
  if (!out.report.empty()) write_file(out.report, report_to_json(r).dump(2) + "\n");
  if (!out.plot_dir.empty()) emit_plotdata(r, out.plot_dir);
  std::printf("%s %s\n", r.pass() ? "PASS" : "FAIL", r.command.c_str());
  return r.pass() ? 0 : 1;
}

std::vector<std::size_t> parse_indices(const std::string& s, std::size_t expected) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
  if (expected && out.size() != expected)
    throw DomainError("expected " + std::to_string(expected) + " comma separated indices");
  return out;
}

BoundDirection parse_direction(const std::string& s) {
  if (s == "above") return BoundDirection::Above;
  if (s == "below") return BoundDirection::Below;
  throw DomainError("direction must be 'above' or 'below'");
}

// ─── gen ────────────────────────────────────────────────────────────────────

struct GenArgs {
  std::string kind, base = "tripod", out;
  std::size_t nt = 21, nx = 21, total = 300, subdivisions = 0, grid_size = 4, points = 6;
  double step = 0.5, window = 8.0, edge = 1.0, distance = 1.0, spacing = 1.0, radius = 1.5;
  double grid_step = 1.0;
};

MetricSampleIn make_base(const GenArgs& a, const Globals& g) {
  if (a.base == "point") return base_point();
  if (a.base == "pair") return base_pair(a.distance);
  if (a.base == "tripod") return base_tripod(a.edge, a.subdivisions);
  if (a.base == "euclid-grid") return base_euclid_grid(a.grid_size, a.spacing);
  if (a.base == "hyperbolic-sample") return base_hyperbolic_sample(a.points, a.radius, g.seed_given ? g.seed : 7);
  if (a.base == "sphere-sample") return base_sphere_sample();
  throw DomainError("unknown base '" + a.base + "'");
}

int run_gen(const GenArgs& a, const Globals& g) {
  Fixture f;
  if (a.kind == "minkowski-grid") {
    f = minkowski_grid(a.nt, a.nx, a.grid_step);
  } else if (a.kind == "desitter-sample") {
    DeSitterSampleOptions o;
    o.total = a.total;
    if (g.seed_given) o.seed = g.seed;
    f = desitter_sample(o);
  } else if (a.kind == "product") {
    f = product_fixture(make_base(a, g), TimeGrid::window(-a.window, a.window, a.step), a.base);
  } else {
    throw DomainError("unknown fixture kind '" + a.kind + "'");
  }
  save_fixture(f, a.out);
  std::printf("wrote %s: %zu points, %zu lines, %zu chains\n", a.out.c_str(), f.space.size(), f.lines.size(),
              f.chains.size());
  return 0;
}

// ─── verification commands ──────────────────────────────────────────────────

void cmd_axioms(Report& r, const Fixture& f, const Globals& g) {
  const auto rep = validate_axioms(f.space, g.tol, 20);
  json w = json::array();
  for (const auto& v : rep.violations) {
    json pts = json::array();
    for (auto i : v.witness) pts.push_back(label(f.space, i));
    w.push_back({{"kind", v.kind}, {"points", pts}, {"amount", v.amount}});
  }
  r.add("axioms", rep.ok(), {{"counts", rep.counts}, {"witnesses", w}, {"points", f.space.size()}});
}

struct CurvatureArgs {
  double k = 0.0;
  std::string direction = "above";
  std::size_t cap = 20000;
};

void cmd_curvature(Report& r, const Fixture& f, const Globals& g, const CurvatureArgs& a) {
  const Kappa kappa(a.k);
  GeodesicFinder finder(f.space, GeodesicOptions{std::numeric_limits<double>::infinity(), g.tol});
  TriangleOptions o;
  o.cap = a.cap;
  o.seed = g.seed;
  o.probes = f.probes;
  o.threads = g.threads;
  const auto set = enumerate_triangles(f.space, finder, kappa, o);
  const auto cert = certify_curvature_bound(f.space, set.triangles, kappa, parse_direction(a.direction), g.tol, g.threads);
  r.params = {{"k", a.k}, {"direction", a.direction}, {"cap", a.cap}};
  json data = {{"triangles_checked", cert.triangles_checked},
               {"triangles_skipped", cert.triangles_skipped + set.skipped_size + set.skipped_deficit},
               {"candidates", set.candidates},
               {"pairs_checked", cert.pairs_checked},
               {"max_slack", cert.max_slack},
               {"worst_margin", num(cert.worst_margin)}};
  if (cert.witness) {
    const auto& w = *cert.witness;
    data["witness"] = {{"triangle", {label(f.space, w.vertices[0]), label(f.space, w.vertices[1]), label(f.space, w.vertices[2])}},
                       {"p", label(f.space, w.p)},
                       {"q", label(f.space, w.q)},
                       {"tau", w.tau},
                       {"tau_bar", w.tau_bar},
                       {"margin", w.margin}};
  }
  if (cert.triangles_checked == 0) {
    r.checks.push_back({"curvature", Status::Skip, data});
  } else {
    r.add("curvature", cert.pass, data);
  }
}

void cmd_angles(Report& r, const Fixture& f, const Globals& g, double k) {
  const Kappa kappa(k);
  AngleOptions opts;
  opts.tol = g.tol;
  const auto& ch = f.chains;
  auto shared = [](const Chain& a, const Chain& b) -> std::optional<std::size_t> {
    for (auto u : {a.front(), a.back()})
      if (u == b.front() || u == b.back()) return u;
    return std::nullopt;
  };
  json est = json::array();
  for (std::size_t i = 0; i < ch.size(); ++i) {
    for (std::size_t j = i + 1; j < ch.size(); ++j) {
      const auto v = shared(ch[i], ch[j]);
      if (!v) continue;
      try {
        const auto e = estimate_angle(f.space, ch[i], ch[j], *v, kappa, opts);
        est.push_back({{"chains", {i, j}}, {"vertex", label(f.space, *v)}, {"angle", num(e.value)}, {"sign", e.sign},
                       {"converged", e.converged}, {"monotone", e.monotone}, {"infinite", e.infinite}});
        Series s{"angle_" + std::to_string(i) + "_" + std::to_string(j), {"rung", "comparison_angle", "bound"}, {}};
        for (std::size_t d = 0; d < e.diagonal.size(); ++d)
          s.rows.push_back({static_cast<double>(d), e.diagonal[d], std::numeric_limits<double>::quiet_NaN()});
        r.series.push_back(std::move(s));
      } catch (const DomainError& e) {
        est.push_back({{"chains", {i, j}}, {"skipped", e.what()}});
      }
    }
  }
  std::vector<Hinge> hinges;
  for (std::size_t a = 0; a < ch.size(); ++a)
    for (std::size_t b = 0; b < ch.size(); ++b)
      for (std::size_t c = 0; c < ch.size(); ++c) {
        if (a == b || b == c || a == c || a > c) continue;
        const auto v = shared(ch[a], ch[b]);
        if (!v || shared(ch[b], ch[c]) != v || shared(ch[a], ch[c]) != v) continue;
        hinges.push_back({*v, ch[a], ch[b], ch[c], false});
      }
  const auto rep = check_angle_inequalities(f.space, hinges, kappa, opts);
  json recs = json::array();
  for (const auto& x : rep.records)
    recs.push_back({{"hinge", x.hinge}, {"relation", x.relation}, {"margin", x.margin}, {"violated", x.violated}});
  r.params = {{"k", k}};
  r.add("angle-estimates", true, {{"pairs", est}});
  r.add("angle-inequalities", rep.ok(), {{"hinges", hinges.size()}, {"records", recs}, {"skipped", rep.skipped.size()}});
}

void cmd_fvf(Report& r, const Fixture& f, const Globals& g, std::size_t chain, std::size_t p, double k) {
  if (chain >= f.chains.size()) throw DomainError("chain index out of range");
  GeodesicFinder finder(f.space, GeodesicOptions{std::numeric_limits<double>::infinity(), g.tol});
  AngleOptions opts;
  opts.tol = g.tol;
  const auto e = fvf_empirical(f.space, f.chains[chain], p, Kappa(k), finder, opts);
  Series s{"fvf", {"t", "quotient", "limit"}, {}};
  for (std::size_t i = 0; i < e.t.size(); ++i) s.rows.push_back({e.t[i], e.quotients[i], e.limit});
  r.series.push_back(std::move(s));
  r.params = {{"chain", chain}, {"p", label(f.space, p)}, {"k", k}};
  r.add("fvf", e.error_decreasing,
        {{"sigma", e.sigma}, {"limit", e.limit}, {"angle", num(e.angle.value)},
         {"smallest_t_error", e.errors.empty() ? json(nullptr) : num(e.errors.front())},
         {"halving_ratios", e.halving_ratios}});
}

void cmd_rigidity(Report& r, const Fixture& f, const Globals& g, double k, std::size_t cap) {
  const Kappa kappa(k);
  GeodesicFinder finder(f.space, GeodesicOptions{std::numeric_limits<double>::infinity(), g.tol});
  TriangleOptions o;
  o.cap = cap;
  o.seed = g.seed;
  o.probes = f.probes;
  o.threads = g.threads;
  const auto set = enumerate_triangles(f.space, finder, kappa, o);
  std::size_t decided = 0, rigid = 0, violations = 0;
  json witness = nullptr;
  for (const auto& t : set.triangles) {
    for (int a = 0; a < 3; ++a) {
      const auto rep = equality_conditions(f.space, t, kappa, g.tol, a, a == 2 ? 0 : 2);
      if (!rep.cond_i.decided || !rep.cond_iii.decided) continue;
      ++decided;
      if (rep.cond_i.holds) ++rigid;
      const bool bad1 = rep.cond_i.holds && !rep.cond_iii.holds;
      const bool bad2 = rep.cond_iii.holds && rep.cond_iv.decided && !rep.cond_iv.holds &&
                        std::isfinite(rep.cond_iv.margin);
      if (bad1 || bad2) {
        ++violations;
        if (witness.is_null())
          witness = {{"triangle", {label(f.space, t.v[0]), label(f.space, t.v[1]), label(f.space, t.v[2])}},
                     {"vertex", a},
                     {"gap", num(rep.angles[a].gap)},
                     {"iii_margin", num(rep.cond_iii.margin)},
                     {"iv_margin", num(rep.cond_iv.margin)}};
      }
    }
  }
  r.params = {{"k", k}, {"cap", cap}};
  r.add("rigidity-implications", violations == 0,
        {{"triangles", set.triangles.size()}, {"decided", decided}, {"angle_equal", rigid}, {"violations", violations},
         {"witness", witness}});
}

void cmd_quadrangle(Report& r, const Fixture& f, const Globals& g, const std::string& pts) {
  const auto p = parse_indices(pts, 4);
  GeodesicFinder finder(f.space, GeodesicOptions{std::numeric_limits<double>::infinity(), g.tol});
  const auto ch = quadrangle_chains(finder, p[0], p[1], p[2], p[3]);
  const auto q = quadrangle_rigidity(f.space, p[0], p[1], p[2], p[3], ch, g.tol);
  json data = {{"angles", {num(q.angles[0]), num(q.angles[1]), num(q.angles[2]), num(q.angles[3])}},
               {"lhs", q.lhs},
               {"rhs", q.rhs},
               {"lhs_minus_rhs", q.lhs_minus_rhs},
               {"flat", q.flat}};
  bool ok = true;
  if (q.fill_in) {
    data["fill_in"] = {{"max_tau_error", q.fill_in->max_tau_error},
                       {"causal_mismatches", q.fill_in->causal_mismatches},
                       {"pairs", q.fill_in->pairs_checked}};
    ok = q.fill_in->within_tol;
  } else if (!q.fill_in_note.empty()) {
    data["fill_in_note"] = q.fill_in_note;
  }
  r.params = {{"points", p}};
  r.add("quadrangle", ok, data);
}

void cmd_lines(Report& r, const Fixture& f, const Globals& g) {
  if (f.lines.empty()) throw MissingChains("fixture has no lines");
  bool all = true;
  json per = json::array();
  for (std::size_t i = 0; i < f.lines.size(); ++i) {
    const auto c = is_line(f.space, f.lines[i], g.tol);
    all = all && c.ok;
    per.push_back({{"line", f.lines[i].label}, {"ok", c.ok}, {"worst", c.worst}});
  }
  r.add("lines", all, {{"lines", per}});
  json pairs = json::array();
  for (std::size_t i = 0; i < f.lines.size(); ++i) {
    for (std::size_t j = i + 1; j < f.lines.size(); ++j) {
      json rec = {{"a", f.lines[i].label}, {"b", f.lines[j].label}};
      try {
        const auto off = weakly_parallel_offset(f.space, f.lines[i], f.lines[j]);
        rec["weakly_parallel"] = off.has_value();
        if (off) rec["offsets"] = {off->ab, off->ba};
        const auto fit = sync_parallel_fit(f.space, f.lines[i], f.lines[j], g.tol);
        rec["synchronised"] = fit.ok;
        if (fit.ok) rec["fit"] = {{"shift", fit.shift}, {"c0", fit.c0}};
      } catch (const WindowExhausted& e) {
        rec["window_exhausted"] = e.what();
      } catch (const ShapeError& e) {
        rec["skipped"] = e.what();
      }
      pairs.push_back(std::move(rec));
    }
  }
  r.add("parallelism", true, {{"pairs", pairs}});
}

void cmd_strip(Report& r, const Fixture& f, const Globals& g, std::size_t a, std::size_t b, double max_offset) {
  if (a >= f.lines.size() || b >= f.lines.size()) throw DomainError("line index out of range");
  const auto& A = f.lines[a];
  const auto& B = f.lines[b];
  std::vector<double> offsets;
  for (std::size_t k = 0; static_cast<double>(k) * A.step <= max_offset + 1e-12; ++k)
    offsets.push_back(static_cast<double>(k) * A.step);
  StripOptions so;
  so.tol = g.tol;
  const auto P = strip_profile(f.space, A, B, offsets, so);
  double dev = 0.0, adev = 0.0, werr = 0.0;
  Series s{"strip", {"c", "F", "Fp"}, {}};
  for (std::size_t k = 0; k < P.offsets.size(); ++k) {
    s.rows.push_back({P.offsets[k], P.F[k], P.Fp[k]});
    if (std::isfinite(P.deviation[k])) dev = std::max(dev, P.deviation[k]);
    if (std::isfinite(P.angle_deviation[k])) adev = std::max(adev, P.angle_deviation[k]);
    if (std::isfinite(P.width[k])) werr = std::max(werr, std::abs(P.width[k] - P.c0));
  }
  r.series.push_back(std::move(s));
  r.params = {{"a", A.label}, {"b", B.label}, {"max_offset", max_offset}};
  r.add("synchronised", P.synchronised, {{"shift", P.shift}, {"c0", P.c0}, {"notes", P.notes}});
  r.add("tau-constancy", dev <= g.tol.tau, {{"max_deviation", dev}});
  r.add("hinge-constancy", adev <= g.tol.angle, {{"max_deviation", adev}});
  r.add("width-identity", werr <= g.tol.angle, {{"max_error", werr}});
  try {
    const auto S = flat_strip_reconstruct(f.space, A, B, g.tol);
    r.add("flat-strip", S.within_tol,
          {{"width", S.width}, {"max_tau_error", S.max_tau_error}, {"causal_mismatches", S.causal_mismatches}});
  } catch (const StripInconsistent& e) {
    r.add("flat-strip", false, {{"error", e.what()}});
  }
}

void cmd_ray(Report& r, const Fixture& f, std::size_t line, std::size_t p, const std::vector<double>& horizon,
             double prefix) {
  if (line >= f.lines.size()) throw DomainError("line index out of range");
  GeodesicFinder finder(f.space);
  RayOptions o;
  o.prefix = prefix;
  const auto ray = asymptotic_ray(f.space, finder, f.lines[line], p, horizon, o);
  Series s{"ray", {"t_n", "drift", "bound"}, {}};
  for (std::size_t n = 0; n < ray.drift.size(); ++n)
    s.rows.push_back({horizon[n], ray.drift[n], n ? ray.drift[n - 1] : std::numeric_limits<double>::quiet_NaN()});
  r.series.push_back(std::move(s));
  json ratios = json::array();
  for (double x : ray.ratio) ratios.push_back(num(x));
  r.params = {{"line", f.lines[line].label}, {"p", label(f.space, p)}, {"horizon", horizon}, {"prefix", num(prefix)}};
  r.add("ray-stabilized", ray.stabilized, {{"ratios", ratios}, {"note", ray.note}, {"prefix", num(ray.prefix)}});
}

// Base midpoints carry over when line i sits over base point i.
std::map<std::pair<std::size_t, std::size_t>, std::size_t> class_midpoints(const Fixture& f, const LineClasses& lc) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> mids;
  if (!f.base || f.base->m != f.lines.size() || lc.classes.size() != f.lines.size()) return mids;
  for (const auto& [yz, m] : f.base->midpoints) mids[{lc.class_of[yz.first], lc.class_of[yz.second]}] = lc.class_of[m];
  return mids;
}

void cmd_split(Report& r, const Fixture& f, const Globals& g, std::size_t reference) {
  if (f.lines.empty()) throw MissingChains("fixture has no lines");
  LineClasses lc;
  try {
    lc = extract_line_classes(f.space, f.lines, reference, g.tol);
  } catch (const NotParallel& e) {
    r.add("line-classes", false, {{"error", e.what()}});
    return;
  }
  r.add("line-classes", true, {{"classes", lc.classes.size()}});
  const auto B = compute_dS(f.space, lc, g.tol, g.threads);
  json dS = json::array();
  for (std::size_t i = 0; i < B.m; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < B.m; ++j) row.push_back(num(B.d(i, j)));
    dS.push_back(row);
  }
  const double h = B.step;
  r.add("base-metric", B.max_asymmetry() <= h && B.max_formula_gap() <= h && B.exhausted_count() == 0,
        {{"step", h}, {"max_asymmetry", B.max_asymmetry()}, {"max_formula_gap", B.max_formula_gap()},
         {"exhausted", B.exhausted_count()}, {"labels", B.labels}, {"dS", dS}});
  const auto C = verify_base_metric_cat0(B, class_midpoints(f, lc));
  json cw = nullptr;
  if (C.triples_checked)
    cw = {B.labels[C.witness[0]], B.labels[C.witness[1]], B.labels[C.witness[2]], B.labels[C.witness[3]]};
  r.add("cat0", C.ok(), {{"triples", C.triples_checked}, {"midpoint_missing", C.midpoint_missing},
                         {"worst_margin", num(C.worst_margin)}, {"max_triangle_excess", C.max_triangle_excess},
                         {"witness", cw}});
  const auto E = verify_embedding(f.space, lc, B, 0.1, g.threads);
  r.add("embedding", E.max_tau_error <= h && E.causal_agreement() == 1.0,
        {{"max_tau_error", E.max_tau_error}, {"bound", h}, {"causal_agreement", E.causal_agreement()},
         {"worst", {label(f.space, E.worst[0]), label(f.space, E.worst[1])}}});
}

void cmd_roundtrip(Report& r, const Fixture& f, const Globals& g) {
  if (!f.base) throw DomainError("fixture carries no base metric");
  RoundTripOptions o;
  o.threads = g.threads;
  o.tol = g.tol;
  const auto rt = round_trip(f.space, f.lines, *f.base, o);
  const double h = rt.step;
  r.add("deviation", rt.max_deviation <= h,
        {{"max_deviation", rt.max_deviation}, {"step", h}, {"worst", {rt.worst[0], rt.worst[1]}}});
  r.add("symmetry", rt.metric.max_asymmetry() <= h, {{"max_asymmetry", rt.metric.max_asymmetry()}});
  r.add("formula-agreement", rt.metric.max_formula_gap() <= h, {{"max_gap", rt.metric.max_formula_gap()}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled Lorentzian spaces: fixtures, curvature certificates, parallel lines and splitting"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--tol-tau", g.tol.tau, "tau tolerance")->capture_default_str();
  app.add_option("--tol-angle", g.tol.angle, "angle tolerance")->capture_default_str();
  app.add_option("--geo-tol", g.tol.geo, "geodesic deficit tolerance")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", g.seed, "seed for sampling and random generators");
  app.fallthrough();

  Output out;
  std::string file;
  std::function<void(Report&, const Fixture&)> action;
  std::string command;

  auto verify = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("fixture", file, "fixture JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", out.report, "report JSON path");
    sub->add_option("--plot-dir", out.plot_dir, "directory for CSV plot series");
    sub->fallthrough();
    return sub;
  };

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a fixture");
  gen_cmd->add_option("kind", gen.kind, "minkowski-grid | desitter-sample | product")->required();
  gen_cmd->add_option("-o,--output", gen.out, "fixture path")->required();
  gen_cmd->add_option("--base", gen.base, "product base: point | pair | tripod | euclid-grid | hyperbolic-sample | sphere-sample")
      ->capture_default_str();
  gen_cmd->add_option("--step", gen.step, "product time step")->capture_default_str();
  gen_cmd->add_option("--window", gen.window, "product time window [-W, W]")->capture_default_str();
  gen_cmd->add_option("--edge", gen.edge, "tripod edge length")->capture_default_str();
  gen_cmd->add_option("--subdivisions", gen.subdivisions, "tripod interior points per leg")->capture_default_str();
  gen_cmd->add_option("--distance", gen.distance, "pair distance")->capture_default_str();
  gen_cmd->add_option("--grid-size", gen.grid_size, "euclid grid side")->capture_default_str();
  gen_cmd->add_option("--spacing", gen.spacing, "euclid grid spacing")->capture_default_str();
  gen_cmd->add_option("--points", gen.points, "hyperbolic sample size")->capture_default_str();
  gen_cmd->add_option("--radius", gen.radius, "hyperbolic sample radius")->capture_default_str();
  gen_cmd->add_option("--nt", gen.nt, "minkowski grid time steps")->capture_default_str();
  gen_cmd->add_option("--nx", gen.nx, "minkowski grid space steps")->capture_default_str();
  gen_cmd->add_option("--grid-step", gen.grid_step, "minkowski grid spacing")->capture_default_str();
  gen_cmd->add_option("--total", gen.total, "de Sitter sample size")->capture_default_str();
  gen_cmd->fallthrough();
  gen_cmd->callback([&] { command = "gen"; });

  verify("axioms", "check the space axioms")->callback([&] {
    command = "axioms";
    action = [&](Report& r, const Fixture& f) { cmd_axioms(r, f, g); };
  });

  CurvatureArgs curv;
  auto* curv_cmd = verify("curvature", "certify a timelike curvature bound");
  curv_cmd->add_option("--k", curv.k, "model curvature")->capture_default_str();
  curv_cmd->add_option("--direction", curv.direction, "above | below")->capture_default_str();
  curv_cmd->add_option("--cap", curv.cap, "triangle cap")->capture_default_str();
  curv_cmd->callback([&] {
    command = "curvature";
    action = [&](Report& r, const Fixture& f) { cmd_curvature(r, f, g, curv); };
  });

  double k = 0.0;
  auto* ang = verify("angles", "angle estimates and triangle inequalities for angles on fixture chains");
  ang->add_option("--k", k, "model curvature")->capture_default_str();
  ang->callback([&] {
    command = "angles";
    action = [&](Report& r, const Fixture& f) { cmd_angles(r, f, g, k); };
  });

  std::size_t chain = 0, point = 0;
  auto* fvf = verify("fvf", "first variation along a fixture chain");
  fvf->add_option("--chain", chain, "chain index")->required();
  fvf->add_option("--p", point, "point index")->required();
  fvf->add_option("--k", k, "model curvature")->capture_default_str();
  fvf->callback([&] {
    command = "fvf";
    action = [&](Report& r, const Fixture& f) { cmd_fvf(r, f, g, chain, point, k); };
  });

  std::size_t cap = 2000;
  auto* rig = verify("rigidity", "equality conditions on sampled triangles");
  rig->add_option("--k", k, "model curvature")->capture_default_str();
  rig->add_option("--cap", cap, "triangle cap")->capture_default_str();
  rig->callback([&] {
    command = "rigidity";
    action = [&](Report& r, const Fixture& f) { cmd_rigidity(r, f, g, k, cap); };
  });

  std::string quad_points;
  auto* quad = verify("quadrangle", "signed angle sum and flat fill-in of a quadrangle");
  quad->add_option("--points", quad_points, "p1,p2,p3,p4 with p1 << p2 << p4 << p3")->required();
  quad->callback([&] {
    command = "quadrangle";
    action = [&](Report& r, const Fixture& f) { cmd_quadrangle(r, f, g, quad_points); };
  });

  verify("lines", "line checks and pairwise parallelism")->callback([&] {
    command = "lines";
    action = [&](Report& r, const Fixture& f) { cmd_lines(r, f, g); };
  });

  std::size_t la = 0, lb = 1;
  double max_offset = 4.0;
  auto* strip = verify("strip", "strip profile and flat strip of two lines");
  strip->add_option("--a", la, "first line index")->capture_default_str();
  strip->add_option("--b", lb, "second line index")->capture_default_str();
  strip->add_option("--max-offset", max_offset, "largest offset c")->capture_default_str();
  strip->callback([&] {
    command = "strip";
    action = [&](Report& r, const Fixture& f) { cmd_strip(r, f, g, la, lb, max_offset); };
  });

  std::size_t ray_line = 0;
  std::vector<double> horizon;
  double prefix = std::numeric_limits<double>::quiet_NaN();
  auto* ray = verify("ray", "asymptotic ray from a point towards a line");
  ray->add_option("--line", ray_line, "line index")->capture_default_str();
  ray->add_option("--p", point, "point index")->required();
  ray->add_option("--horizon", horizon, "increasing parameters t_n")->required()->delimiter(',');
  ray->add_option("--prefix", prefix, "compared prefix length");
  ray->callback([&] {
    command = "ray";
    action = [&](Report& r, const Fixture& f) { cmd_ray(r, f, ray_line, point, horizon, prefix); };
  });

  std::size_t reference = 0;
  auto* split = verify("split", "recover the base from parallel lines and check it");
  split->add_option("--reference", reference, "reference line index")->capture_default_str();
  split->callback([&] {
    command = "split";
    action = [&](Report& r, const Fixture& f) { cmd_split(r, f, g, reference); };
  });

  verify("roundtrip", "compare the recovered base with the fixture base")->callback([&] {
    command = "roundtrip";
    action = [&](Report& r, const Fixture& f) { cmd_roundtrip(r, f, g); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_given = seed_opt->count() > 0;
  try {
    if (command == "gen") return run_gen(gen, g);
    const auto t0 = std::chrono::steady_clock::now();
    const auto in = load(file);
    Report r = start(command, g, in.digest);
    action(r, in.f);
    return finish(r, out, t0);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
