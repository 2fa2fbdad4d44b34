#pragma once

// Fixture container and the non-product generators: Minkowski grid, planar
// point clouds and the de Sitter sample.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "lps/modelspace.hpp"
#include "lps/space.hpp"
#include "lps/splitting.hpp"

namespace lps {

struct Fixture {
  SampledSpace space;
  std::vector<Chain> chains;
  std::vector<LineSample> lines;
  std::optional<MetricSampleIn> base;
  std::vector<std::array<std::size_t, 3>> probes;  // triangles worth certifying
};

inline bool operator==(const Fixture& a, const Fixture& b) {
  const auto& s = a.space;
  const auto& t = b.space;
  if (s.size() != t.size() || s.labels != t.labels || s.meta != t.meta || s.metric_data() != t.metric_data())
    return false;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s.tau(i, j) != t.tau(i, j) || s.causal(i, j) != t.causal(i, j)) return false;
  return a.chains == b.chains && a.lines == b.lines && a.base == b.base && a.probes == b.probes;
}

/// Space over explicit points of the Minkowski plane, with the Euclidean
/// metric of R^2 as d.
inline SampledSpace plane_cloud(const std::vector<PlanePoint>& pts) {
  const std::size_t n = pts.size();
  SampledSpace s(n);
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(pts[i].t) || !std::isfinite(pts[i].x)) throw DomainError("plane point must be finite");
    for (std::size_t j = 0; j < n; ++j) {
      const auto r = tau_plane(pts[i], pts[j]);
      const bool causal = r.relation == Relation::Identical || r.relation == Relation::FutureTimelike ||
                          r.relation == Relation::FutureNull;
      s.set(i, j, r.tau, causal);
      d[i * n + j] = std::hypot(pts[j].t - pts[i].t, pts[j].x - pts[i].x);
    }
  }
  s.set_metric(std::move(d));
  s.meta = {{"generator", "plane-cloud"}, {"claimed_bound", {{"k", 0.0}, {"directions", {"above", "below"}}}}};
  return s;
}

/// nt x nx lattice of the Minkowski plane, t = 0..nt-1 and x centred on 0,
/// scaled by `step`. Index = k * nx + j. Vertical lines are emitted.
inline Fixture minkowski_grid(std::size_t nt = 21, std::size_t nx = 21, double step = 1.0) {
  if (nt == 0 || nx == 0 || !(step > 0.0)) throw DomainError("grid needs positive sizes and step");
  std::vector<PlanePoint> pts;
  const double x0 = -0.5 * static_cast<double>(nx - 1);
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t j = 0; j < nx; ++j) pts.push_back({step * static_cast<double>(k), step * (x0 + static_cast<double>(j))});
  Fixture f;
  f.space = plane_cloud(pts);
  for (const auto& p : pts) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "(%g,%g)", p.t, p.x);
    f.space.labels.push_back(buf);
  }
  f.space.meta = {{"generator", "minkowski-grid"},
                  {"params", {{"nt", nt}, {"nx", nx}, {"step", step}}},
                  {"claimed_bound", {{"k", 0.0}, {"directions", {"above", "below"}}}}};
  for (std::size_t j = 0; j < nx; ++j) {
    LineSample l;
    l.step = step;
    l.t0 = 0.0;
    l.label = "x=" + std::to_string(step * (x0 + static_cast<double>(j)));
    for (std::size_t k = 0; k < nt; ++k) l.points.push_back(k * nx + j);
    f.lines.push_back(std::move(l));
  }
  return f;
}

// ─── de Sitter sample ───────────────────────────────────────────────────────

struct DeSitterSampleOptions {
  std::size_t total = 300;
  std::uint64_t seed = 2024;
  double meridian_step = 0.25;
  double p_phi = 0.5;                     // the point p for the ray construction
  std::vector<double> horizons{2.0, 3.0};  // alpha(+-T) targets on the meridian phi = 0
  double chain_spacing = 0.15;
  std::size_t triangles = 6;
  double side_spacing = 0.2;
};

namespace detail {

/// Unit future timelike tangent at the meridian point (s, phi) with rapidity a
/// relative to the meridian direction.
inline DeSitterPoint ds_tangent(double s, double phi, double a) {
  const DeSitterPoint et{std::cosh(s), std::sinh(s) * std::cos(phi), std::sinh(s) * std::sin(phi)};
  const DeSitterPoint ex{0.0, -std::sin(phi), std::cos(phi)};
  return {std::cosh(a) * et.T + std::sinh(a) * ex.T, std::cosh(a) * et.X + std::sinh(a) * ex.X,
          std::cosh(a) * et.Y + std::sinh(a) * ex.Y};
}

struct DsBuilder {
  std::vector<DeSitterPoint> pts;
  std::vector<std::string> labels;

  std::size_t add(const DeSitterPoint& p, std::string label) {
    pts.push_back(p);
    labels.push_back(std::move(label));
    return pts.size() - 1;
  }

  /// tau and causality from the hyperboloid; d is the ambient Euclidean
  /// distance of R^3.
  SampledSpace space() const {
    const std::size_t n = pts.size();
    SampledSpace s(n);
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto r = ds_tau(pts[i], pts[j]);
        const bool causal = r.relation == Relation::Identical || r.relation == Relation::FutureTimelike ||
                            r.relation == Relation::FutureNull;
        s.set(i, j, r.tau, causal);
        const auto& a = pts[i];
        const auto& c = pts[j];
        d[i * n + j] = std::sqrt((a.T - c.T) * (a.T - c.T) + (a.X - c.X) * (a.X - c.X) + (a.Y - c.Y) * (a.Y - c.Y));
      }
    }
    s.set_metric(std::move(d));
    s.labels = labels;
    return s;
  }

  /// Sampled geodesic from p to q (p << q), endpoints given as indices.
  std::vector<std::size_t> segment(std::size_t ip, std::size_t iq, double spacing, const std::string& tag) {
    const auto p = pts[ip], q = pts[iq];
    const double tau = ds_tau(p, q).tau;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(tau / spacing)));
    std::vector<std::size_t> out{ip};
    for (std::size_t k = 1; k < steps; ++k)
      out.push_back(add(ds_interpolate(p, q, tau * static_cast<double>(k) / static_cast<double>(steps)),
                        tag + "." + std::to_string(k)));
    out.push_back(iq);
    return out;
  }
};

}  // namespace detail

/// Points of the two-dimensional de Sitter space (the K = 1 model), with
///  - the timelike meridians phi = 0 (on [-3, 3]) and phi = pi (on [-1.5, 1.5]),
///  - a point p at phi = p_phi and sampled geodesics [alpha(-T), p], [p, alpha(T)]
///    towards the meridian alpha (phi = 0) for every horizon T,
///  - random timelike triangles with sampled sides (listed as probes),
///  - random fill up to `total` points.
/// tau and causality come from the hyperboloid; d is the ambient Euclidean
/// distance of R^3.
inline Fixture desitter_sample(const DeSitterSampleOptions& o = {}) {
  detail::DsBuilder b;
  Fixture f;
  auto meridian = [&](double phi, double lo, double hi, const std::string& name) {
    LineSample l;
    l.step = o.meridian_step;
    l.t0 = lo;
    l.label = name;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / o.meridian_step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) {
      const double s = lo + static_cast<double>(k) * o.meridian_step;
      char buf[48];
      std::snprintf(buf, sizeof buf, "%s@%g", name.c_str(), s);
      l.points.push_back(b.add(ds_meridian(s, phi), buf));
    }
    f.lines.push_back(l);
    return l;
  };
  const LineSample alpha = meridian(0.0, -3.0, 3.0, "alpha");
  meridian(std::numbers::pi, -1.5, 1.5, "antipode");

  auto on_alpha = [&](double s) {
    const double k = (s - alpha.t0) / alpha.step;
    const auto idx = static_cast<std::size_t>(std::llround(k));
    if (std::abs(k - static_cast<double>(idx)) > 1e-9 || idx >= alpha.size())
      throw DomainError("horizon is not a grid point of the meridian");
    return alpha.points[idx];
  };
  const std::size_t p = b.add(ds_meridian(0.0, o.p_phi), "p");
  for (double T : o.horizons) {
    const std::string tag = "ray" + std::to_string(static_cast<int>(std::lround(T * 100)));
    auto past = b.segment(on_alpha(-T), p, o.chain_spacing, tag + "-");
    auto fut = b.segment(p, on_alpha(T), o.chain_spacing, tag + "+");
    // Chains are stored as point lists; parameters are filled in after tau is known.
    f.chains.push_back(Chain{past, {}, 0.0, false});
    f.chains.push_back(Chain{fut, {}, 0.0, false});
  }

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<std::array<std::size_t, 3>> tri_vertices;
  while (tri_vertices.size() < o.triangles) {
    const double s0 = -1.2 + 0.6 * U(rng), phi0 = 2 * std::numbers::pi * U(rng);
    const DeSitterPoint v0 = ds_meridian(s0, phi0);
    const DeSitterPoint v1 = ds_geodesic(v0, detail::ds_tangent(s0, phi0, -0.8 + 1.6 * U(rng)), 0.4 + 0.6 * U(rng));
    const DeSitterPoint v2 = ds_geodesic(v0, detail::ds_tangent(s0, phi0, -0.8 + 1.6 * U(rng)), 1.2 + 0.8 * U(rng));
    const auto r12 = ds_tau(v1, v2);
    if (r12.relation != Relation::FutureTimelike || r12.tau < 0.3) continue;
    const std::string tag = "tri" + std::to_string(tri_vertices.size());
    const std::size_t i0 = b.add(v0, tag + ".v0"), i1 = b.add(v1, tag + ".v1"), i2 = b.add(v2, tag + ".v2");
    b.segment(i0, i1, o.side_spacing, tag + ".s01");
    b.segment(i1, i2, o.side_spacing, tag + ".s12");
    b.segment(i0, i2, o.side_spacing, tag + ".s02");
    tri_vertices.push_back({i0, i1, i2});
  }
  if (b.pts.size() > o.total) throw DomainError("de Sitter sample: structured points exceed the requested total");
  std::size_t fill = 0;
  while (b.pts.size() < o.total) {
    const double s = -2.0 + 4.0 * U(rng), phi = 2 * std::numbers::pi * U(rng);
    b.add(ds_meridian(s, phi), "fill" + std::to_string(fill++));
  }

  SampledSpace s = b.space();
  s.meta = {{"generator", "desitter-sample"},
            {"params",
             {{"total", o.total},
              {"seed", o.seed},
              {"meridian_step", o.meridian_step},
              {"p_phi", o.p_phi},
              {"horizons", o.horizons},
              {"chain_spacing", o.chain_spacing},
              {"triangles", o.triangles},
              {"side_spacing", o.side_spacing}}},
            {"claimed_bound", {{"k", 1.0}, {"directions", {"above", "below"}}}},
            {"p", p}};
  f.space = std::move(s);
  for (auto& c : f.chains) c = chain_from_points(f.space, c.points);
  f.probes = tri_vertices;
  return f;
}

/// Timelike meridians of de Sitter space at the given angles, each sampled on
/// [lo, hi] with the given step. No other points.
inline Fixture desitter_meridians(const std::vector<double>& phis, double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("meridians need hi >= lo and step > 0");
  detail::DsBuilder b;
  Fixture f;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t m = 0; m < phis.size(); ++m) {
    LineSample l;
    l.step = step;
    l.t0 = lo;
    l.label = "phi=" + std::to_string(phis[m]);
    for (std::size_t k = 0; k < count; ++k) {
      const double s = lo + static_cast<double>(k) * step;
      l.points.push_back(b.add(ds_meridian(s, phis[m]), "m" + std::to_string(m) + "@" + std::to_string(s)));
    }
    f.lines.push_back(std::move(l));
  }
  SampledSpace s = b.space();
  s.meta = {{"generator", "desitter-meridians"},
            {"params", {{"phis", phis}, {"lo", lo}, {"hi", hi}, {"step", step}}},
            {"claimed_bound", {{"k", 1.0}, {"directions", {"above", "below"}}}}};
  f.space = std::move(s);
  return f;
}

/// Product fixture wrapper: space, canonical lines and the base.
inline Fixture product_fixture(const MetricSampleIn& base, const TimeGrid& grid, const std::string& base_name) {
  auto prod = build_product(base, grid);
  Fixture f;
  f.space = std::move(prod.space);
  f.lines = std::move(prod.lines);
  f.base = base;
  f.space.meta = {{"generator", "product"},
                  {"base", base_name},
                  {"grid", {{"t0", grid.t0}, {"step", grid.step}, {"count", grid.count}}},
                  {"claimed_bound", {{"k", 0.0}, {"directions", {"above"}}}}};
  return f;
}

}  // namespace lps
