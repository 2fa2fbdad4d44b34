#pragma once

// Lorentzian products over finite metric spaces and recovery of the base
// from parallel lines.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lps/errors.hpp"
#include "lps/parallel.hpp"
#include "lps/parallels.hpp"
#include "lps/space.hpp"

namespace lps {

// ─── base generators ────────────────────────────────────────────────────────

namespace detail {

inline void add_exact_midpoints(MetricSampleIn& b, double tol = 1e-12) {
  for (std::size_t i = 0; i < b.m; ++i) {
    for (std::size_t j = i + 1; j < b.m; ++j) {
      const double h = 0.5 * b.d(i, j);
      for (std::size_t k = 0; k < b.m; ++k) {
        if (std::abs(b.d(i, k) - h) <= tol * (1 + h) && std::abs(b.d(k, j) - h) <= tol * (1 + h)) {
          b.midpoints[{i, j}] = k;
          break;
        }
      }
    }
  }
}

inline MetricSampleIn from_points(std::size_t m, const std::function<double(std::size_t, std::size_t)>& d) {
  MetricSampleIn b;
  b.m = m;
  b.dist.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) b.dist[i * m + j] = i == j ? 0.0 : d(i, j);
  return b;
}

}  // namespace detail

inline MetricSampleIn base_point() {
  MetricSampleIn b;
  b.m = 1;
  b.dist = {0.0};
  b.labels = {"o"};
  return b;
}

inline MetricSampleIn base_pair(double d = 1.0) {
  if (!(d > 0.0)) throw DomainError("pair distance must be positive");
  MetricSampleIn b;
  b.m = 2;
  b.dist = {0.0, d, d, 0.0};
  b.labels = {"x0", "x1"};
  return b;
}

/// Center plus three leaves at distance `edge`; each leg may carry
/// `subdivisions` equally spaced interior points. Index 0 is the center, then
/// per leg its interior points outward followed by the leaf.
inline MetricSampleIn base_tripod(double edge = 1.0, std::size_t subdivisions = 0) {
  if (!(edge > 0.0)) throw DomainError("tripod edge must be positive");
  struct Node {
    int leg;
    double r;
  };
  std::vector<Node> nodes{{-1, 0.0}};
  std::vector<std::string> labels{"center"};
  const std::size_t per = subdivisions + 1;
  for (int leg = 0; leg < 3; ++leg) {
    for (std::size_t k = 1; k <= per; ++k) {
      nodes.push_back({leg, edge * static_cast<double>(k) / static_cast<double>(per)});
      labels.push_back(k == per ? "leaf" + std::to_string(leg + 1)
                                : "leg" + std::to_string(leg + 1) + "." + std::to_string(k));
    }
  }
  auto b = detail::from_points(nodes.size(), [&](std::size_t i, std::size_t j) {
    const auto& a = nodes[i];
    const auto& c = nodes[j];
    if (a.leg == c.leg) return std::abs(a.r - c.r);
    return a.r + c.r;
  });
  b.labels = labels;
  detail::add_exact_midpoints(b);
  return b;
}

/// `intervals` + 1 equally spaced points of a segment of the given length.
inline MetricSampleIn base_segment(double length = 1.0, std::size_t intervals = 4) {
  if (!(length > 0.0) || intervals == 0) throw DomainError("segment needs positive length and intervals");
  const double h = length / static_cast<double>(intervals);
  auto b = detail::from_points(intervals + 1, [&](std::size_t i, std::size_t j) {
    return h * std::abs(static_cast<double>(i) - static_cast<double>(j));
  });
  for (std::size_t i = 0; i <= intervals; ++i) b.labels.push_back("s" + std::to_string(i));
  detail::add_exact_midpoints(b);
  return b;
}

/// k x k Euclidean lattice with the given spacing; index = row * k + col.
inline MetricSampleIn base_euclid_grid(std::size_t k = 4, double spacing = 1.0) {
  if (k == 0 || !(spacing > 0.0)) throw DomainError("euclid grid needs k >= 1 and positive spacing");
  auto b = detail::from_points(k * k, [&](std::size_t i, std::size_t j) {
    const double dr = static_cast<double>(i / k) - static_cast<double>(j / k);
    const double dc = static_cast<double>(i % k) - static_cast<double>(j % k);
    return spacing * std::hypot(dr, dc);
  });
  for (std::size_t i = 0; i < k * k; ++i)
    b.labels.push_back("g" + std::to_string(i / k) + "." + std::to_string(i % k));
  detail::add_exact_midpoints(b);
  return b;
}

/// Random points of the hyperbolic plane (curvature -1) inside a disc of the
/// given radius, followed by the midpoints of consecutive pairs so that the
/// sample carries midpoint witnesses.
inline MetricSampleIn base_hyperbolic_sample(std::size_t n = 6, double radius = 1.5, std::uint64_t seed = 7) {
  struct H {
    double x0, x1, x2;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<H> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(U(rng));
    const double phi = 2 * std::numbers::pi * U(rng);
    pts.push_back({std::cosh(r), std::sinh(r) * std::cos(phi), std::sinh(r) * std::sin(phi)});
  }
  auto dist = [](const H& a, const H& b) {
    return std::acosh(std::max(1.0, a.x0 * b.x0 - a.x1 * b.x1 - a.x2 * b.x2));
  };
  std::vector<std::pair<std::size_t, std::size_t>> mids;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const H& a = pts[i];
    const H& b = pts[i + 1];
    // The hyperbolic midpoint is the normalized sum on the hyperboloid.
    const H s{a.x0 + b.x0, a.x1 + b.x1, a.x2 + b.x2};
    const double norm = std::sqrt(s.x0 * s.x0 - s.x1 * s.x1 - s.x2 * s.x2);
    pts.push_back({s.x0 / norm, s.x1 / norm, s.x2 / norm});
    mids.emplace_back(i, i + 1);
  }
  auto b = detail::from_points(pts.size(), [&](std::size_t i, std::size_t j) { return dist(pts[i], pts[j]); });
  for (std::size_t i = 0; i < pts.size(); ++i) b.labels.push_back("h" + std::to_string(i));
  for (std::size_t k = 0; k < mids.size(); ++k) b.midpoints[mids[k]] = n + k;
  return b;
}

/// Five points of the unit sphere: A and B on the equator a quarter turn
/// apart, their midpoint M, the pole N, and the midpoint P of N and A.
inline MetricSampleIn base_sphere_sample() {
  const double s = std::sqrt(0.5);
  const std::vector<std::array<double, 3>> p{{1, 0, 0}, {0, 1, 0}, {s, s, 0}, {0, 0, 1}, {s, 0, s}};
  auto b = detail::from_points(p.size(), [&](std::size_t i, std::size_t j) {
    const double dot = p[i][0] * p[j][0] + p[i][1] * p[j][1] + p[i][2] * p[j][2];
    const double cross = std::hypot(p[i][1] * p[j][2] - p[i][2] * p[j][1], p[i][2] * p[j][0] - p[i][0] * p[j][2],
                                    p[i][0] * p[j][1] - p[i][1] * p[j][0]);
    return std::atan2(cross, dot);
  });
  b.labels = {"A", "B", "M", "N", "P"};
  b.midpoints[{0, 1}] = 2;
  b.midpoints[{0, 3}] = 4;
  return b;
}

// ─── products ───────────────────────────────────────────────────────────────

/// Uniform time grid t_k = t0 + k * step, k < count.
struct TimeGrid {
  double t0 = 0.0;
  double step = 1.0;
  std::size_t count = 1;

  double param(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * step; }

  /// The grid covering [lo, hi] with the given step.
  static TimeGrid window(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw DomainError("time window needs hi >= lo and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    return {lo, step, count};
  }
};

struct Product {
  SampledSpace space;
  std::vector<LineSample> lines;  // one vertical line per base point
  MetricSampleIn base;
  TimeGrid grid;

  std::size_t index(std::size_t x, std::size_t k) const noexcept { return x * grid.count + k; }
};

/// The Lorentzian product of a time grid with a finite metric space:
/// (s,x) <= (t,y) iff t - s >= d(x,y), tau = sqrt((t-s)^2 - d^2). The
/// carried metric is the product metric sqrt((t-s)^2 + d^2).
inline Product build_product(const MetricSampleIn& base, const TimeGrid& grid) {
  validate(base);
  if (grid.count == 0 || !(grid.step > 0.0)) throw ShapeError("time grid must be nonempty with positive step");
  Product out;
  out.base = base;
  out.grid = grid;
  const std::size_t m = base.m, nt = grid.count, n = m * nt;
  SampledSpace s(n);
  std::vector<double> metric(n * n, 0.0);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t k = 0; k < nt; ++k) {
      const std::size_t i = x * nt + k;
      for (std::size_t y = 0; y < m; ++y) {
        const double d = base.d(x, y);
        for (std::size_t l = 0; l < nt; ++l) {
          const std::size_t j = y * nt + l;
          const double dt = (static_cast<double>(l) - static_cast<double>(k)) * grid.step;
          const bool causal = dt >= d;
          const double tau = causal ? std::sqrt((dt - d) * (dt + d)) : 0.0;
          s.set(i, j, tau, causal);
          metric[i * n + j] = std::hypot(dt, d);
        }
      }
    }
  }
  s.set_metric(std::move(metric));
  s.labels.reserve(n);
  for (std::size_t x = 0; x < m; ++x) {
    const std::string name = base.labels.empty() ? "x" + std::to_string(x) : base.labels[x];
    for (std::size_t k = 0; k < nt; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", grid.param(k));
      s.labels.push_back(name + "@" + buf);
    }
  }
  out.space = std::move(s);
  for (std::size_t x = 0; x < m; ++x) {
    LineSample l;
    l.step = grid.step;
    l.t0 = grid.t0;
    l.kind = LineKind::Line;
    l.label = base.labels.empty() ? "x" + std::to_string(x) : base.labels[x];
    for (std::size_t k = 0; k < nt; ++k) l.points.push_back(out.index(x, k));
    out.lines.push_back(std::move(l));
  }
  return out;
}


// ─── line classes ───────────────────────────────────────────────────────────

struct LineClass {
  LineSample line;  // representative, reparametrised to be synchronised with the reference
  std::size_t source = 0;             // input index of the representative
  std::vector<std::size_t> members;   // input indices
  std::vector<double> member_shift;   // member(t) = representative_input(t + shift)
  double shift = 0.0;                 // applied sync shift: line.t0 = input t0 + shift
  double c0 = 0.0;                    // spacelike distance to the reference
};

struct LineClasses {
  std::vector<LineClass> classes;
  std::vector<std::size_t> class_of;  // per input line
  std::size_t reference = 0;
  double step = 0.0;
};

namespace detail {

/// c with b(t) = a(t + c) on at least two overlapping grid values, when the
/// two samples trace the same points.
inline std::optional<double> same_points_shift(const LineSample& a, const LineSample& b) {
  auto try_offset = [&](std::ptrdiff_t k) -> std::optional<double> {
    // b.points[p] == a.points[p + k]
    std::size_t overlap = 0;
    for (std::size_t p = 0; p < b.size(); ++p) {
      const std::ptrdiff_t q = static_cast<std::ptrdiff_t>(p) + k;
      if (q < 0 || q >= static_cast<std::ptrdiff_t>(a.size())) continue;
      if (a.points[static_cast<std::size_t>(q)] != b.points[p]) return std::nullopt;
      ++overlap;
    }
    if (overlap < 2) return std::nullopt;
    return a.t0 - b.t0 + static_cast<double>(k) * a.step;
  };
  for (std::size_t q = 0; q < a.size(); ++q)
    if (a.points[q] == b.points[0]) return try_offset(static_cast<std::ptrdiff_t>(q));
  for (std::size_t p = 0; p < b.size(); ++p)
    if (b.points[p] == a.points[0]) return try_offset(-static_cast<std::ptrdiff_t>(p));
  return std::nullopt;
}

inline std::string line_name(const LineSample& l, std::size_t i) {
  return l.label.empty() ? "line " + std::to_string(i) : "line '" + l.label + "'";
}

}  // namespace detail

/// Groups lines into shift classes and synchronises one representative per
/// class with lines[reference]. NotParallel names the offending line.
inline LineClasses extract_line_classes(const SampledSpace& space, const std::vector<LineSample>& lines,
                                        std::size_t reference = 0, const Tolerances& tol = {},
                                        const WindowOptions& window = {}) {
  if (lines.empty()) throw ShapeError("no lines to classify");
  if (reference >= lines.size()) throw ShapeError("reference line index out of range");
  const auto& ref = lines[reference];
  LineClasses out;
  out.reference = reference;
  out.step = ref.step;
  out.class_of.assign(lines.size(), 0);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    detail::require_same_step(ref, lines[i]);
    const auto c = is_line(space, lines[i], tol);
    if (!c.ok) {
      char buf[160];
      std::snprintf(buf, sizeof buf, " is not a line: deficit %.3g between grid positions %zu and %zu", c.worst,
                    c.i, c.j);
      throw NotParallel(detail::line_name(lines[i], i) + buf);
    }
    if (!weakly_parallel_offset(space, ref, lines[i], window))
      throw NotParallel(detail::line_name(lines[i], i) + " is not weakly parallel to the reference");
  }
  // Shift classes; the longest member represents its class.
  for (std::size_t i = 0; i < lines.size(); ++i) {
    bool placed = false;
    for (std::size_t k = 0; k < out.classes.size() && !placed; ++k) {
      auto& cl = out.classes[k];
      const auto c = detail::same_points_shift(lines[cl.members.front()], lines[i]);
      if (!c) continue;
      cl.members.push_back(i);
      cl.member_shift.push_back(*c);
      out.class_of[i] = k;
      placed = true;
    }
    if (!placed) {
      LineClass cl;
      cl.members = {i};
      cl.member_shift = {0.0};
      out.class_of[i] = out.classes.size();
      out.classes.push_back(std::move(cl));
    }
  }
  for (auto& cl : out.classes) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < cl.members.size(); ++k)
      if (lines[cl.members[k]].size() > lines[cl.members[best]].size()) best = k;
    // Re-express shifts relative to the chosen representative.
    const double base = cl.member_shift[best];
    for (auto& s : cl.member_shift) s -= base;
    cl.source = cl.members[best];
    cl.line = lines[cl.source];
    const auto fit = sync_parallel_fit(space, ref, cl.line, tol);
    if (!fit.ok)
      throw NotParallel(detail::line_name(cl.line, cl.source) + " is weakly parallel but not synchronised: " +
                        fit.note);
    cl.shift = detail::on_grid(fit.shift, out.step) ? std::round(fit.shift / out.step) * out.step : fit.shift;
    cl.c0 = fit.c0;
    cl.line.t0 += cl.shift;
  }
  return out;
}

// ─── base metric ────────────────────────────────────────────────────────────

struct BaseMetric {
  std::size_t m = 0;
  std::vector<double> dS;     // inf (t - s)/2 over beta(s) <= alpha(0) <= beta(t)
  std::vector<double> alt;    // inf (t - s) over alpha(s) <= beta(t)
  std::vector<double> fit;    // c0 of the synchronised fit between representatives (diagnostic)
  std::vector<std::array<double, 2>> witness;  // (t, s) realising dS
  std::vector<char> exhausted;                 // no causal grid pair for the primary formula
  double step = 0.0;
  std::vector<std::string> labels;

  double d(std::size_t i, std::size_t j) const { return dS[i * m + j]; }
  double max_formula_gap() const;
  double max_asymmetry() const;
  std::size_t exhausted_count() const { return static_cast<std::size_t>(std::count(exhausted.begin(), exhausted.end(), 1)); }
};

inline double BaseMetric::max_formula_gap() const {
  double g = 0.0;
  for (std::size_t k = 0; k < dS.size(); ++k)
    if (std::isfinite(dS[k]) && std::isfinite(alt[k])) g = std::max(g, std::abs(dS[k] - alt[k]));
  return g;
}

inline double BaseMetric::max_asymmetry() const {
  double g = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (std::isfinite(d(i, j)) && std::isfinite(d(j, i))) g = std::max(g, std::abs(d(i, j) - d(j, i)));
  return g;
}

/// Both infimum formulas on the sampled grid. Pairs with no causal witness in
/// the window get +inf and an exhausted flag.
inline BaseMetric compute_dS(const SampledSpace& space, const LineClasses& lc, const Tolerances& tol = {},
                             unsigned threads = 1) {
  const std::size_t m = lc.classes.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  BaseMetric B;
  B.m = m;
  B.step = lc.step;
  B.dS.assign(m * m, inf);
  B.alt.assign(m * m, inf);
  B.fit.assign(m * m, std::numeric_limits<double>::quiet_NaN());
  B.witness.assign(m * m, {0.0, 0.0});
  B.exhausted.assign(m * m, 0);
  for (const auto& cl : lc.classes) B.labels.push_back(cl.line.label);
  parallel_for(m * m, threads, [&](std::size_t pair) {
    const auto& A = lc.classes[pair / m].line;
    const auto& Bl = lc.classes[pair % m].line;
    // alpha(0) when sampled, else the middle of alpha's window.
    const std::size_t i0 = detail::position(A, 0.0).value_or(A.size() / 2);
    const std::size_t p = A.points[i0];
    double s_max = -inf, t_min = inf;
    for (std::size_t k = 0; k < Bl.size(); ++k) {
      const double t = Bl.param(k);
      if (space.causal(Bl.points[k], p)) s_max = std::max(s_max, t);
      if (space.causal(p, Bl.points[k])) t_min = std::min(t_min, t);
    }
    if (std::isfinite(s_max) && std::isfinite(t_min)) {
      B.dS[pair] = (t_min - s_max) / 2.0;
      B.witness[pair] = {t_min, s_max};
    } else {
      B.exhausted[pair] = 1;
    }
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t k = 0; k < Bl.size(); ++k)
        if (space.causal(A.points[i], Bl.points[k])) B.alt[pair] = std::min(B.alt[pair], Bl.param(k) - A.param(i));
    const auto f = sync_parallel_fit(space, A, Bl, tol);
    if (f.ok) B.fit[pair] = f.c0;
  });
  return B;
}

// ─── CAT(0) midpoint check ──────────────────────────────────────────────────

/// d(x,m)^2 <= d(x,y)^2/2 + d(x,z)^2/2 - d(y,z)^2/4 for a midpoint m of (y,z);
/// positive margin means the inequality holds strictly.
inline double cat0_margin(double dxy, double dxz, double dyz, double dxm) {
  return 0.5 * dxy * dxy + 0.5 * dxz * dxz - 0.25 * dyz * dyz - dxm * dxm;
}

struct Cat0Report {
  double max_asymmetry = 0.0;
  double max_triangle_excess = 0.0;  // d(i,k) - d(i,j) - d(j,k), positive means violated
  double max_diagonal = 0.0;
  std::size_t infinite = 0;          // pairs with non-finite distance
  std::size_t triples_checked = 0;
  std::size_t midpoint_missing = 0;  // triples skipped for lack of a midpoint
  double worst_margin = std::numeric_limits<double>::infinity();
  std::array<std::size_t, 4> witness{};  // x, y, z, m

  bool ok(double tol = 1e-9) const {
    return infinite == 0 && max_asymmetry <= tol && max_triangle_excess <= tol && max_diagonal <= tol &&
           (triples_checked == 0 || worst_margin >= -tol);
  }
};

/// Metric axioms and the CAT(0) midpoint inequality over an m x m matrix;
/// midpoints maps (y, z) with y < z to the index of a midpoint.
inline Cat0Report verify_cat0(std::size_t m, const std::vector<double>& d,
                              const std::map<std::pair<std::size_t, std::size_t>, std::size_t>& midpoints) {
  if (d.size() != m * m) throw ShapeError("distance matrix must be m x m");
  Cat0Report r;
  auto D = [&](std::size_t i, std::size_t j) { return d[i * m + j]; };
  for (std::size_t i = 0; i < m; ++i) {
    r.max_diagonal = std::max(r.max_diagonal, std::abs(D(i, i)));
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isfinite(D(i, j))) {
        ++r.infinite;
        continue;
      }
      r.max_asymmetry = std::max(r.max_asymmetry, std::abs(D(i, j) - D(j, i)));
      for (std::size_t k = 0; k < m; ++k)
        if (std::isfinite(D(i, k)) && std::isfinite(D(j, k)))
          r.max_triangle_excess = std::max(r.max_triangle_excess, D(i, k) - D(i, j) - D(j, k));
    }
  }
  for (std::size_t y = 0; y < m; ++y) {
    for (std::size_t z = y + 1; z < m; ++z) {
      auto it = midpoints.find({y, z});
      if (it == midpoints.end()) it = midpoints.find({z, y});
      if (it == midpoints.end() || it->second >= m) {
        r.midpoint_missing += m;
        continue;
      }
      const std::size_t mid = it->second;
      for (std::size_t x = 0; x < m; ++x) {
        const double g = cat0_margin(D(x, y), D(x, z), D(y, z), D(x, mid));
        if (!std::isfinite(g)) continue;
        ++r.triples_checked;
        if (g < r.worst_margin) {
          r.worst_margin = g;
          r.witness = {x, y, z, mid};
        }
      }
    }
  }
  return r;
}

inline Cat0Report verify_base_metric_cat0(const BaseMetric& base,
                                          const std::map<std::pair<std::size_t, std::size_t>, std::size_t>& midpoints) {
  return verify_cat0(base.m, base.dS, midpoints);
}

// ─── embedding ──────────────────────────────────────────────────────────────

struct EmbeddingReport {
  double max_tau_error = 0.0;
  std::array<std::size_t, 2> worst{};  // point indices
  std::size_t pairs = 0;
  std::size_t causal_agree = 0;
  std::array<std::size_t, 2> causal_witness{};  // first disagreeing pair
  std::vector<double> pair_error;               // per class pair, max tau residual

  double causal_agreement() const { return pairs ? static_cast<double>(causal_agree) / static_cast<double>(pairs) : 1.0; }
};

/// Compares tau and the causal relation of (s,[alpha]), (t,[beta]) against
/// the product formulas with dS. `trim` drops that fraction of each line's
/// window at both ends.
inline EmbeddingReport verify_embedding(const SampledSpace& space, const LineClasses& lc, const BaseMetric& base,
                                        double trim = 0.0, unsigned threads = 1) {
  const std::size_t m = lc.classes.size();
  if (base.m != m) throw ShapeError("base metric does not match the line classes");
  if (!(trim >= 0.0 && trim < 0.5)) throw DomainError("trim must lie in [0, 0.5)");
  struct Part {
    double err = 0.0;
    std::array<std::size_t, 2> worst{};
    std::size_t pairs = 0, agree = 0;
    bool mismatch = false;
    std::array<std::size_t, 2> cw{};
  };
  std::vector<Part> parts(m * m);
  parallel_for(m * m, threads, [&](std::size_t pair) {
    const auto& A = lc.classes[pair / m].line;
    const auto& Bl = lc.classes[pair % m].line;
    const double d = base.dS[pair];
    auto range = [&](const LineSample& l) {
      const auto cut = static_cast<std::size_t>(std::floor(trim * static_cast<double>(l.size())));
      return std::pair{cut, l.size() - cut};
    };
    const auto [ia, ja] = range(A);
    const auto [ib, jb] = range(Bl);
    auto& P = parts[pair];
    for (std::size_t i = ia; i < ja; ++i) {
      for (std::size_t k = ib; k < jb; ++k) {
        const double dt = Bl.param(k) - A.param(i);
        const std::size_t x = A.points[i], y = Bl.points[k];
        const bool model_causal = dt >= d - 1e-9 * (1.0 + std::abs(d));
        const double model_tau = (std::isfinite(d) && dt > d) ? std::sqrt((dt - d) * (dt + d)) : 0.0;
        const double e = std::abs(space.tau(x, y) - model_tau);
        if (e > P.err) {
          P.err = e;
          P.worst = {x, y};
        }
        ++P.pairs;
        if (model_causal == space.causal(x, y)) {
          ++P.agree;
        } else if (!P.mismatch) {
          P.mismatch = true;
          P.cw = {x, y};
        }
      }
    }
  });
  EmbeddingReport r;
  r.pair_error.resize(m * m);
  bool seen = false;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& P = parts[k];
    r.pair_error[k] = P.err;
    if (P.err > r.max_tau_error) {
      r.max_tau_error = P.err;
      r.worst = P.worst;
    }
    r.pairs += P.pairs;
    r.causal_agree += P.agree;
    if (P.mismatch && !seen) {
      seen = true;
      r.causal_witness = P.cw;
    }
  }
  return r;
}

// ─── round trip ─────────────────────────────────────────────────────────────

struct RoundTripOptions {
  double trim = 0.1;
  unsigned threads = 1;
  Tolerances tol;
};

struct RoundTrip {
  LineClasses classes;
  BaseMetric metric;
  std::vector<std::size_t> base_index;  // class -> base point
  double max_deviation = 0.0;           // max |dS - dist|
  std::array<std::size_t, 2> worst{};   // base indices
  Cat0Report cat0;
  EmbeddingReport embedding;
  double step = 0.0;
};

/// Canonical lines -> classes -> dS, compared entrywise with the base
/// distances; line i sits over base point i and the CAT(0) midpoints come
/// from the base.
inline RoundTrip round_trip(const SampledSpace& space, const std::vector<LineSample>& lines,
                            const MetricSampleIn& base, const RoundTripOptions& o = {}) {
  if (lines.size() != base.m) throw ShapeError("need one line per base point");
  RoundTrip r;
  r.classes = extract_line_classes(space, lines, 0, o.tol);
  r.metric = compute_dS(space, r.classes, o.tol, o.threads);
  r.step = r.classes.step;
  const std::size_t m = r.metric.m;
  if (m != base.m) throw ShapeError("distinct base points produced merged line classes");
  for (const auto& cl : r.classes.classes) r.base_index.push_back(cl.source);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> mids;
  std::vector<std::size_t> class_of_base(m);
  for (std::size_t c = 0; c < m; ++c) class_of_base[r.base_index[c]] = c;
  for (const auto& [yz, mid] : base.midpoints)
    mids[{class_of_base[yz.first], class_of_base[yz.second]}] = class_of_base[mid];
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const double dev = std::abs(r.metric.d(a, b) - base.d(r.base_index[a], r.base_index[b]));
      if (!(dev <= r.max_deviation)) {
        r.max_deviation = dev;
        r.worst = {r.base_index[a], r.base_index[b]};
      }
    }
  }
  r.cat0 = verify_base_metric_cat0(r.metric, mids);
  r.embedding = verify_embedding(space, r.classes, r.metric, o.trim, o.threads);
  return r;
}

/// The same pipeline on build_product(base, grid).
inline RoundTrip round_trip(const MetricSampleIn& base, const TimeGrid& grid, const RoundTripOptions& o = {}) {
  const auto prod = build_product(base, grid);
  return round_trip(prod.space, prod.lines, base, o);
}

}  // namespace lps
