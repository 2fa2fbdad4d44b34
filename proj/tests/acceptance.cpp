// Acceptance run over the eleven primary criteria. One PASS/FAIL line per
// criterion; indented lines below it are diagnostics. Exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "gen.hpp"
#include "lps/fixtures.hpp"
#include "lps/geodesic.hpp"
#include "lps/modelspace.hpp"
#include "lps/parallels.hpp"
#include "lps/rigidity.hpp"
#include "lps/sampled.hpp"
#include "lps/splitting.hpp"

using namespace lps;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// NaN never passes.
bool within(double x, double tol) { return x <= tol; }

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;
};

unsigned threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

const Kappa flat{0.0};

Sigma random_sigma(lps_test::Gen& g) { return g.coin() ? Sigma::Plus : Sigma::Minus; }

// ─── 1 ──────────────────────────────────────────────────────────────────────

Outcome law_of_cosines() {
  lps_test::Gen g(101);
  const auto t0 = Clock::now();
  int realized = 0, draws = 0;
  double worst = 0.0;
  while (realized < 10000 && draws < 1000000) {
    ++draws;
    const Kappa k(g.integer(-1, 1));
    const Sigma s = random_sigma(g);
    double y = g.log_uniform(0.05, 3), t = g.log_uniform(0.05, 3);
    if (s == Sigma::Minus && t > y) std::swap(y, t);
    const double c = g.uniform(1, 10);
    double z = 0.0;
    try {
      z = side_from_hinge(k, y, t, c, s);
    } catch (const DomainError&) {
      continue;
    }
    if (z == 0.0) continue;
    ++realized;
    const double back = angle_from_sides(k, y, t, z, s);
    const double rel = std::abs(back - c) / c;
    if (!(rel <= worst)) worst = rel;
  }
  const double secs = since(t0);
  Outcome o;
  o.pass = realized == 10000 && within(worst, 1e-9) && secs <= 1.0;
  o.detail = fmt("%d realizable of %d draws, max rel error %.2e, %.3f s", realized, draws, worst, secs);
  return o;
}

// ─── 2 ──────────────────────────────────────────────────────────────────────

Outcome flat_limit() {
  // Hinge y = t = 1, cosh = 2, sigma = +1. C was measured on it once
  // (|z_K - z_0| / |K| ~ 0.204) and frozen.
  const double C = 0.25;
  const double z0 = side_from_hinge(flat, 1, 1, 2, Sigma::Plus);
  Outcome o;
  std::string parts;
  for (double sign : {1.0, -1.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double mag : {1e-3, 1e-5}) {
      const double k = sign * mag;
      const double err = std::abs(side_from_hinge(Kappa(k), 1, 1, 2, Sigma::Plus) - z0);
      if (!within(err, C * mag)) o.pass = false;
      if (!(err < prev)) o.pass = false;
      prev = err;
      parts += fmt(" K=%+.0e:%.3e", k, err);
    }
  }
  o.detail = fmt("C=%.2f, |z_K - z_0|", C) + parts;
  return o;
}

// ─── 3 ──────────────────────────────────────────────────────────────────────

Outcome angle_sum() {
  lps_test::Gen g(103);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const PlanePoint a{g.uniform(-5, 5), g.uniform(-5, 5)};
    auto step = [&](PlanePoint from) {
      const double tau = g.uniform(0.05, 3), rap = g.uniform(-2, 2);
      return PlanePoint{from.t + tau * std::cosh(rap), from.x + tau * std::sinh(rap)};
    };
    const PlanePoint b = step(a), c = step(b);
    const double d = std::abs(angle_sum_defect(a, b, c));
    if (!(d <= worst)) worst = d;
  }
  Outcome o;
  o.pass = within(worst, 1e-12);
  o.detail = fmt("10000 triples, max |defect| %.2e", worst);
  return o;
}

// ─── 4 ──────────────────────────────────────────────────────────────────────

// Hinge at v0 = (0, 1, 0) on the quadric, legs along rapidities a1 and a2.
double desitter_side(double y, double t, double a1, double a2, Sigma s) {
  const DeSitterPoint v0{0, 1, 0};
  auto u = [](double a) { return DeSitterPoint{std::cosh(a), 0, std::sinh(a)}; };
  if (s == Sigma::Plus) return ds_tau(ds_geodesic(v0, u(a1), -y), ds_geodesic(v0, u(a2), t)).tau;
  return ds_tau(ds_geodesic(v0, u(a2), t), ds_geodesic(v0, u(a1), y)).tau;
}

Outcome model_fvf() {
  // The bound 2 cosh(theta) t / y dominates the second-order term
  // (cosh^2 - 1) t g_K(y) / 2 (g_0 = 1/y, g_1 = coth y, g_-1 = cot y) only for
  // moderate angles; the sweep stays in y in [0.25, 1], cosh in [1, 2.5].
  lps_test::Gen g(104);
  double worst_ratio = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Kappa k(g.integer(-1, 1));
    const Sigma s = random_sigma(g);
    const double y = g.uniform(0.25, 1.0), c = g.uniform(1.0, 2.5), t = y * g.log_uniform(1e-5, 1e-2);
    const auto r = fvf_model(k, y, s, c, t);
    const double ratio = std::abs(r.quotient - value(s) * c) / (2 * c * t / y);
    if (!(ratio <= worst_ratio)) worst_ratio = ratio;
  }
  double worst_oracle = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Sigma s = random_sigma(g);
    const double y = g.uniform(0.25, 1.0), c = g.uniform(1.0, 2.5), t = y * g.log_uniform(1e-3, 1e-2);
    const double a1 = g.uniform(-1, 1), a2 = a1 + (g.coin() ? 1 : -1) * std::acosh(c);
    const double q = (desitter_side(y, t, a1, a2, s) - y) / t;
    const double d = std::abs(fvf_model(Kappa{1.0}, y, s, c, t).quotient - q);
    if (!(d <= worst_oracle)) worst_oracle = d;
  }
  Outcome o;
  o.pass = within(worst_ratio, 1.0) && within(worst_oracle, 1e-9);
  o.detail = fmt("1000-point sweep, max |q - sigma cosh| / bound %.3f; de Sitter oracle max |dq| %.2e", worst_ratio,
                 worst_oracle);
  // Where the stated bound stops holding.
  int over = 0, tried = 0;
  for (int i = 0; i < 1000; ++i) {
    const Kappa k(g.integer(-1, 1));
    const Sigma s = random_sigma(g);
    const double y = g.uniform(0.25, 1.5), c = g.uniform(1.0, 10.0), t = 1e-2 * y;
    try {
      const auto r = fvf_model(k, y, s, c, t);
      ++tried;
      if (std::abs(r.quotient - value(s) * c) > 2 * c * t / y) ++over;
    } catch (const DomainError&) {
    }
  }
  o.notes.push_back(fmt("outside the sweep (y in [0.25, 1.5], cosh in [1, 10], t/y = 1e-2): %d of %d exceed the bound",
                        over, tried));
  return o;
}

// ─── 5 ──────────────────────────────────────────────────────────────────────

Outcome second_inequality() {
  lps_test::Gen g(105);
  Outcome o;
  for (double kk : {-1.0, 0.0, 1.0}) {
    const Kappa k(kk);
    const double D = k.diameter();
    int n = 0, bad = 0, half = 0, half_bad = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::string wit;
    while (n < 10000) {
      const Sigma s = random_sigma(g);
      double y = g.log_uniform(0.05, 3), t = g.log_uniform(0.05, 3);
      if (s == Sigma::Minus && t > y) std::swap(y, t);
      const double c = g.uniform(1, 10);
      double z = 0.0, m = 0.0;
      try {
        z = side_from_hinge(k, y, t, c, s);
        if (!(z > 0.0) || !(std::max({y, t, z}) < D)) continue;
        m = second_inequality_margin(k, y, t, z, s);
      } catch (const DomainError&) {
        continue;
      }
      ++n;
      const bool in_half = std::max({y, t, z}) <= 0.5 * D;
      if (in_half) ++half;
      if (m < worst) {
        worst = m;
        wit = fmt("y=%.4g t=%.4g cosh=%.4g sigma=%+.0f z=%.4g", y, t, c, value(s), z);
      }
      if (m < -1e-12) {
        ++bad;
        if (in_half) ++half_bad;
      }
    }
    if (bad > 0) o.pass = false;
    o.detail += fmt("%sK=%+g: %d/10000 below -1e-12", o.detail.empty() ? "" : "; ", kk, bad);
    if (bad > 0) {
      o.notes.push_back(fmt("K=%+g worst margin %.4g at %s", kk, worst, wit.c_str()));
      o.notes.push_back(fmt("K=%+g restricted to max side <= D_K/2: %d/%d violations", kk, half_bad, half));
    }
  }
  return o;
}

// ─── 6 ──────────────────────────────────────────────────────────────────────

struct CertRun {
  Certificate above, below;
  std::size_t triangles = 0;
  double seconds = 0.0;
};

CertRun certify(const Fixture& f, const Kappa& k) {
  const auto t0 = Clock::now();
  GeodesicFinder finder(f.space);
  TriangleOptions opt;
  opt.cap = 20000;
  opt.probes = f.probes;
  opt.threads = threads();
  const auto set = enumerate_triangles(f.space, finder, k, opt);
  CertRun r;
  r.triangles = set.triangles.size();
  r.above = certify_curvature_bound(f.space, set.triangles, k, BoundDirection::Above, {}, threads());
  r.below = certify_curvature_bound(f.space, set.triangles, k, BoundDirection::Below, {}, threads());
  r.seconds = since(t0);
  return r;
}

std::string witness(const SampledSpace& s, const Certificate& c) {
  if (!c.witness) return "none";
  const auto& w = *c.witness;
  auto name = [&](std::size_t i) { return i < s.labels.size() ? s.labels[i] : "#" + std::to_string(i); };
  return fmt("triangle (%s, %s, %s), pair (%s, %s): tau %.6g, tau_bar %.6g, margin %.3g", name(w.vertices[0]).c_str(),
             name(w.vertices[1]).c_str(), name(w.vertices[2]).c_str(), name(w.p).c_str(), name(w.q).c_str(), w.tau,
             w.tau_bar, w.margin);
}

Outcome curvature_certification() {
  Outcome o;
  const auto mink = minkowski_grid(21, 21, 1.0);
  const auto m = certify(mink, flat);
  const bool m_ok = m.above.pass && m.below.pass && within(m.above.max_slack, 1e-9) &&
                    within(m.below.max_slack, 1e-9) && m.seconds <= 60;

  const auto trip = product_fixture(base_tripod(1.0, 1), TimeGrid::window(0.0, 4.0, 0.5), "tripod");
  const auto t = certify(trip, flat);
  const bool t_ok = t.above.pass && !t.below.pass && t.below.witness.has_value() && t.seconds <= 60;

  const auto ds = desitter_sample();
  const auto d = certify(ds, flat);
  const bool d_ok = !d.above.pass && d.above.witness.has_value() && d.seconds <= 60;

  o.pass = m_ok && t_ok && d_ok;
  o.detail = fmt("minkowski %s (slack %.1e/%.1e, %zu tri, %.1f s); tripod %s (%.1f s); de Sitter %s (%.1f s)",
                 m_ok ? "ok" : "FAIL", m.above.max_slack, m.below.max_slack, m.triangles, m.seconds,
                 t_ok ? "ok" : "FAIL", t.seconds, d_ok ? "ok" : "FAIL", d.seconds);
  o.notes.push_back("tripod below-by-0 witness: " + witness(trip.space, t.below));
  if (!d_ok) {
    o.notes.push_back(fmt("de Sitter above-by-0 %s, worst margin %.3g over %zu triangles", d.above.pass ? "passes" : "fails",
                          d.above.worst_margin, d.triangles));
    o.notes.push_back("de Sitter below-by-0 witness: " + witness(ds.space, d.below));
    o.notes.push_back("tau on the sample dominates the flat comparison value, the 'below' direction is the one violated");
  }
  if (!m_ok)
    o.notes.push_back(fmt("minkowski above %d below %d", m.above.pass, m.below.pass));
  return o;
}

// ─── 7 ──────────────────────────────────────────────────────────────────────

Outcome quadrangle() {
  // p1 << p2 << p4 << p3 with p3 = (6, 1), p4 = (4, 0); sides and diagonals
  // sampled at fixed fractions.
  std::vector<PlanePoint> pts{{0, 0}, {2, 1}, {6, 1}, {4, 0}};
  auto segment = [&](std::size_t i, std::size_t j) {
    std::vector<std::size_t> idx{i};
    for (double f : {0.125, 0.25, 0.5, 0.75}) {
      pts.push_back(pts[i] + f * (pts[j] - pts[i]));
      idx.push_back(pts.size() - 1);
    }
    idx.push_back(j);
    return idx;
  };
  const auto s12 = segment(0, 1), s23 = segment(1, 2), s43 = segment(3, 2), s14 = segment(0, 3),
             d13 = segment(0, 2), d24 = segment(1, 3);
  const auto space = plane_cloud(pts);
  auto c = [&](const std::vector<std::size_t>& v) { return chain_from_points(space, v); };
  const QuadrangleChains ch{c(s12), c(s23), c(s43), c(s14), c(d13), c(d24)};
  const auto r = quadrangle_rigidity(space, 0, 1, 2, 3, ch);
  const double want = std::acosh(2.0 / std::sqrt(3.0));
  double angle_err = 0.0;
  for (double a : r.angles) angle_err = std::max(angle_err, std::abs(a - want));
  const double fill = r.fill_in ? r.fill_in->max_tau_error : std::numeric_limits<double>::quiet_NaN();
  const bool planar_ok = within(std::abs(r.lhs_minus_rhs), 1e-9) && within(angle_err, 1e-9) && within(fill, 1e-9);

  // Tripod branch: leaf1 @0 << leaf2 @3 << leaf3 @6 << leaf1 @9.
  const auto f = product_fixture(base_tripod(1.0, 1), TimeGrid::window(0.0, 9.0, 0.25), "tripod");
  const std::size_t nt = f.lines[0].size();
  auto at = [&](std::size_t base, double t) { return base * nt + static_cast<std::size_t>(std::lround(t / 0.25)); };
  GeodesicFinder finder(f.space);
  const std::size_t p1 = at(2, 0), p2 = at(4, 3), p4 = at(6, 6), p3 = at(2, 9);
  const auto tr = quadrangle_rigidity(f.space, p1, p2, p3, p4, quadrangle_chains(finder, p1, p2, p3, p4));
  const bool tripod_ok = tr.lhs_minus_rhs <= -0.05;

  Outcome o;
  o.pass = planar_ok && tripod_ok;
  o.detail = fmt("planar |lhs-rhs| %.1e, max angle error %.1e, fill-in %.1e; tripod lhs-rhs %.7f", std::abs(r.lhs_minus_rhs),
                 angle_err, fill, tr.lhs_minus_rhs);
  return o;
}

// ─── 8 ──────────────────────────────────────────────────────────────────────

struct StripTotals {
  double deviation = 0.0, hinge = 0.0, width = 0.0;
  std::size_t offsets = 0, bad = 0;
};

void strip_pair(const Fixture& f, std::size_t a, std::size_t b, StripTotals& T) {
  const auto& A = f.lines[a];
  const auto& B = f.lines[b];
  const auto fit = sync_parallel_fit(f.space, A, B);
  const double h = A.step;
  std::vector<double> offsets;
  // Offsets on the grid strictly beyond c0; F vanishes below it.
  for (double c = h * std::floor(fit.c0 / h + 1e-9) + h; c <= fit.c0 + 2.0 + 1e-9; c += h) offsets.push_back(c);
  const auto P = strip_profile(f.space, A, B, offsets);
  for (std::size_t k = 0; k < P.offsets.size(); ++k) {
    ++T.offsets;
    const double w = std::abs(P.width[k] - P.c0);
    if (!(P.deviation[k] <= 1e-9) || !(P.angle_deviation[k] <= 1e-6) || !(w <= 1e-6)) ++T.bad;
    T.deviation = std::max(T.deviation, std::isnan(P.deviation[k]) ? INFINITY : P.deviation[k]);
    T.hinge = std::max(T.hinge, std::isnan(P.angle_deviation[k]) ? INFINITY : P.angle_deviation[k]);
    T.width = std::max(T.width, std::isnan(w) ? INFINITY : w);
  }
}

Outcome strip_identities() {
  StripTotals T;
  const auto pair = product_fixture(base_pair(1.0), TimeGrid::window(0.0, 12.0, 0.25), "pair");
  strip_pair(pair, 0, 1, T);
  const auto trip = product_fixture(base_tripod(1.0, 1), TimeGrid::window(0.0, 8.0, 0.25), "tripod");
  std::size_t pairs = 1;
  for (std::size_t a = 0; a < trip.lines.size(); ++a)
    for (std::size_t b = a + 1; b < trip.lines.size(); ++b, ++pairs) strip_pair(trip, a, b, T);
  Outcome o;
  o.pass = T.bad == 0 && T.offsets > 0;
  o.detail = fmt("%zu line pairs, %zu offsets: max tau deviation %.1e, hinge deviation %.1e, width error %.1e", pairs,
                 T.offsets, T.deviation, T.hinge, T.width);
  return o;
}

// ─── 9 ──────────────────────────────────────────────────────────────────────

std::map<std::pair<std::size_t, std::size_t>, std::size_t> class_midpoints(const RoundTrip& rt,
                                                                            const MetricSampleIn& base) {
  std::vector<std::size_t> cls(rt.base_index.size());
  for (std::size_t c = 0; c < cls.size(); ++c) cls[rt.base_index[c]] = c;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> mids;
  for (const auto& [yz, mid] : base.midpoints) mids[{cls[yz.first], cls[yz.second]}] = cls[mid];
  return mids;
}

Outcome splitting() {
  struct Case {
    const char* name;
    MetricSampleIn base;
  };
  const std::vector<Case> cases{{"pair", base_pair(1.0)}, {"tripod", base_tripod(1.0, 1)},
                                {"euclid-4x4", base_euclid_grid(4, 1.0)}};
  RoundTripOptions opt;
  opt.threads = threads();
  opt.trim = 0.1;
  const auto grid = TimeGrid::window(-8.0, 8.0, 0.25);
  Outcome o;
  const auto t0 = Clock::now();
  for (const auto& cs : cases) {
    const auto prod = build_product(cs.base, grid);
    const auto rt = round_trip(prod.space, prod.lines, cs.base, opt);
    const auto& B = rt.metric;
    const bool dev = within(rt.max_deviation, 0.25), sym = within(B.max_asymmetry(), 0.25),
               gap = within(B.max_formula_gap(), 0.25) && B.exhausted_count() == 0, cat = rt.cat0.ok(1e-9),
               emb = within(rt.embedding.max_tau_error, 0.25), caus = rt.embedding.causal_agreement() == 1.0;
    const bool ok = dev && sym && gap && cat && emb && caus;
    if (!ok) o.pass = false;
    o.detail += fmt("%s%s %s", o.detail.empty() ? "" : "; ", cs.name, ok ? "ok" : "FAIL");
    std::string fails;
    for (auto [flag, label] : {std::pair{dev, "dS-d"}, {sym, "symmetry"}, {gap, "formulas"}, {cat, "CAT(0)"},
                               {emb, "embedding"}, {caus, "causality"}})
      if (!flag) fails += std::string(" ") + label;
    o.notes.push_back(fmt("%s: max|dS-d| %.3g, asym %.3g, formula gap %.3g, CAT(0) worst %.4g over %zu triples, "
                          "embedding %.3g, causal %.4f%s%s",
                          cs.name, rt.max_deviation, B.max_asymmetry(), B.max_formula_gap(), rt.cat0.worst_margin,
                          rt.cat0.triples_checked, rt.embedding.max_tau_error, rt.embedding.causal_agreement(),
                          fails.empty() ? "" : "; failed:", fails.c_str()));
    if (!cat || !emb) {
      const auto& w = rt.cat0.witness;
      if (!cat)
        o.notes.push_back(fmt("%s: CAT(0) witness x=%s y=%s z=%s m=%s", cs.name, B.labels[w[0]].c_str(),
                              B.labels[w[1]].c_str(), B.labels[w[2]].c_str(), B.labels[w[3]].c_str()));
      // dS is a grid ceiling; the synchronised-fit c0 is not quantized.
      BaseMetric F = B;
      F.dS = F.fit;
      const auto cf = verify_base_metric_cat0(F, class_midpoints(rt, cs.base));
      const auto ef = verify_embedding(prod.space, rt.classes, F, opt.trim, opt.threads);
      o.notes.push_back(fmt("%s with fit c0 in place of dS: CAT(0) worst %.3g, embedding %.3g, causal %.4f", cs.name,
                            cf.worst_margin, ef.max_tau_error, ef.causal_agreement()));
    }
  }
  const double secs = since(t0);
  if (secs > 120) o.pass = false;
  o.detail += fmt(", %.1f s", secs);
  return o;
}

// ─── 10 ─────────────────────────────────────────────────────────────────────

Outcome concatenation() {
  Outcome o;
  double prod_angle = 0.0;
  std::size_t prod_runs = 0;
  bool prod_lines = true;
  for (const auto& f : {product_fixture(base_pair(1.0), TimeGrid::window(0.0, 4.0, 0.5), "pair"),
                        product_fixture(base_tripod(1.0, 1), TimeGrid::window(0.0, 4.0, 0.5), "tripod")}) {
    for (const auto& l : f.lines) {
      const std::size_t mid = l.size() / 2;
      const auto r = concat_angle(f.space, as_chain(slice(l, 0, mid)), as_chain(slice(l, mid, l.size() - 1)),
                                  l.points[mid], flat);
      prod_angle = std::max(prod_angle, std::isnan(r.angle) ? INFINITY : r.angle);
      prod_lines = prod_lines && r.is_line;
      ++prod_runs;
    }
  }
  const auto ds = desitter_sample();
  const std::size_t p = ds.space.meta["p"].get<std::size_t>();
  const auto horizons = ds.space.meta["params"]["horizons"].get<std::vector<double>>();
  const double phi = ds.space.meta["params"]["p_phi"].get<double>();
  double ds_min = INFINITY, oracle_gap = 0.0;
  bool ds_lines = false;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    const auto r = concat_angle(ds.space, ds.chains[2 * h], ds.chains[2 * h + 1], p, Kappa{1.0});
    const double c = std::cos(phi) * std::cosh(horizons[h]);
    const double oracle = std::acosh((std::cosh(2 * horizons[h]) - c * c) / (c * c - 1.0));
    ds_min = std::min(ds_min, std::isnan(r.angle) ? -INFINITY : r.angle);
    oracle_gap = std::max(oracle_gap, std::abs(r.angle - oracle));
    ds_lines = ds_lines || r.is_line;
    o.notes.push_back(fmt("de Sitter T=%g: angle %.9f, oracle %.9f", horizons[h], r.angle, oracle));
  }
  o.pass = within(prod_angle, 1e-6) && prod_lines && ds_min >= 0.1 && !ds_lines;
  o.detail = fmt("products: %zu splits, max angle %.1e, all lines %s; de Sitter: min angle %.4f (>= 0.1), "
                 "oracle gap %.1e, any line %s",
                 prod_runs, prod_angle, prod_lines ? "yes" : "no", ds_min, oracle_gap, ds_lines ? "yes" : "no");
  return o;
}

// ─── 11 ─────────────────────────────────────────────────────────────────────

Outcome ray_convergence() {
  // alpha(t) = (t, 0) for t = 0..128, p = (0, 1), segments [p, alpha(T)]
  // sampled every 0.5 in tau-arclength.
  const std::vector<double> horizon{8, 16, 32, 64, 128};
  std::vector<PlanePoint> pts;
  for (int t = 0; t <= 128; ++t) pts.push_back({static_cast<double>(t), 0.0});
  LineSample alpha;
  alpha.step = 1.0;
  alpha.kind = LineKind::FutureRay;
  for (std::size_t k = 0; k < pts.size(); ++k) alpha.points.push_back(k);
  const PlanePoint p{0.0, 1.0};
  const std::size_t ip = pts.size();
  pts.push_back(p);
  for (double T : horizon) {
    const PlanePoint q{T, 0.0};
    const double len = std::sqrt(T * T - 1.0);
    for (double u = 0.5; u < len - 1e-9; u += 0.5) pts.push_back(p + (u / len) * (q - p));
  }
  const auto space = plane_cloud(pts);
  GeodesicFinder finder(space);
  RayOptions ro;
  ro.prefix = 4.0;
  const auto R = asymptotic_ray(space, finder, alpha, ip, horizon, ro);
  Outcome o;
  o.pass = R.ratio.size() == 3;
  std::string rs;
  for (double r : R.ratio) {
    if (!(r >= 0.4 && r <= 0.6)) o.pass = false;
    rs += fmt(" %.4f", r);
  }
  std::string ds;
  for (double d : R.drift) ds += fmt(" %.3e", d);
  o.detail = "drift" + ds + "; ratios" + rs;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion all[] = {{"law-of-cosines round trip", law_of_cosines},
                           {"flat limit", flat_limit},
                           {"angle-sum identity", angle_sum},
                           {"model first variation", model_fvf},
                           {"second inequality", second_inequality},
                           {"curvature certification", curvature_certification},
                           {"quadrangle rigidity", quadrangle},
                           {"strip identities", strip_identities},
                           {"splitting round trip", splitting},
                           {"zero-angle concatenation", concatenation},
                           {"asymptotic ray convergence", ray_convergence}};
  int failed = 0, n = 0;
  for (const auto& c : all) {
    ++n;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, c.name, o.detail.c_str());
    for (const auto& note : o.notes) std::printf("        %s\n", note.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria pass\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
