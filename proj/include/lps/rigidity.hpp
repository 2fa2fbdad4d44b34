#pragma once

// Equality cases of upper curvature bounds: the equivalent rigidity
// conditions for a triangle and the quadrangle flatness criterion, with
// explicit planar fill-ins.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lps/errors.hpp"
#include "lps/geodesic.hpp"
#include "lps/modelspace.hpp"
#include "lps/sampled.hpp"
#include "lps/space.hpp"

namespace lps {

struct FlatFillIn {
  std::vector<PlanePoint> planar_vertices;
  std::map<std::size_t, PlanePoint> grid_map;
  double max_tau_error = 0.0;
  std::size_t causal_mismatches = 0;
  std::size_t pairs_checked = 0;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // pair realizing max_tau_error
  bool within_tol = true;
};

namespace detail {

/// Adds the points of `c` to the map, placed linearly between the images of
/// its endpoints according to their tau-arclength.
inline void map_chain(std::map<std::size_t, PlanePoint>& m, const Chain& c, PlanePoint from, PlanePoint to) {
  const double len = c.length();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double f = len > 0.0 ? (c.params[k] - c.params.front()) / len : 0.0;
    m.emplace(c.points[k], from + f * (to - from));
  }
}

/// tau- and causality-preservation of the planar map over all mapped pairs.
inline void verify_fill_in(const SampledSpace& space, FlatFillIn& f, const Tolerances& tol) {
  double scale = 0.0;
  for (const auto& [i, p] : f.grid_map) scale = std::max({scale, std::abs(p.t), std::abs(p.x)});
  const double err2 = squared_rounding(4 * scale);
  double worst = -1.0;
  for (auto a = f.grid_map.begin(); a != f.grid_map.end(); ++a) {
    for (auto b = f.grid_map.begin(); b != f.grid_map.end(); ++b) {
      if (a == b) continue;
      const PlanePoint d = b->second - a->second;
      const double band = 1e-9 * (1.0 + std::abs(d.t) + std::abs(d.x));
      const double tp = d.t > std::abs(d.x) ? std::sqrt((d.t - std::abs(d.x)) * (d.t + std::abs(d.x))) : 0.0;
      const double tx = space.tau(a->first, b->first);
      const double err = band_distance(tx, tp, err2);
      ++f.pairs_checked;
      if (err > worst) {
        worst = err;
        f.witness = std::make_pair(a->first, b->first);
      }
      if (err > tol.tau_at(tp)) f.within_tol = false;
      const bool plane_causal = d.t > std::abs(d.x) + band;
      const bool plane_not = d.t < std::abs(d.x) - band;
      const bool x_causal = space.causal(a->first, b->first);
      if ((plane_causal && !x_causal) || (plane_not && x_causal)) ++f.causal_mismatches;
    }
  }
  f.max_tau_error = std::max(0.0, worst);
}

}  // namespace detail

// ─── triangle equality conditions ───────────────────────────────────────────

struct ConditionResult {
  bool decided = false;
  bool holds = false;
  double margin = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct VertexAngle {
  bool decided = false;
  double estimated = std::numeric_limits<double>::quiet_NaN();
  double comparison = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();  // estimated - comparison
  std::string note;
};

struct EqualityReport {
  int a = 0, b = 1, c = 2;  // roles as triangle vertex positions
  std::array<VertexAngle, 3> angles;
  ConditionResult cond_i, cond_ii, cond_iii, cond_iv;
  std::size_t points_checked = 0;  // interior points of [a, c]
  std::optional<FlatFillIn> fill_in;
};

namespace detail {

inline TriangleSide side_between(int u, int v) {
  const int lo = std::min(u, v), hi = std::max(u, v);
  if (lo == 0 && hi == 1) return TriangleSide::V0V1;
  if (lo == 1 && hi == 2) return TriangleSide::V1V2;
  if (lo == 0 && hi == 2) return TriangleSide::V0V2;
  throw DomainError("vertex roles must be distinct positions 0, 1, 2");
}

inline const Chain& side_chain(const SampledTriangle& tri, TriangleSide s) {
  switch (s) {
    case TriangleSide::V0V1: return tri.sides[0];
    case TriangleSide::V1V2: return tri.sides[1];
    case TriangleSide::V0V2: return tri.sides[2];
  }
  return tri.sides[0];
}

}  // namespace detail

/// Evaluates the rigidity conditions for the triangle with vertex roles a, c
/// (b is the remaining vertex): (i) the angle at a equals its comparison
/// angle; (ii) reported from (i) through the equivalence; (iii) every
/// sampled interior point x of [a, c] has tau_s(b, x) equal to the model
/// value; (iv) some interior x does, with both values above the positivity
/// floor 10 * tol.tau.
inline EqualityReport equality_conditions(const SampledSpace& space, const SampledTriangle& tri, const Kappa& kappa,
                                          const Tolerances& tol = {}, int a = 0, int c = 2) {
  EqualityReport rep;
  if (a == c || a < 0 || a > 2 || c < 0 || c > 2) throw DomainError("vertex roles must be distinct positions 0, 1, 2");
  rep.a = a;
  rep.c = c;
  rep.b = 3 - a - c;
  const auto& v = tri.v;
  const ModelTriangle model{kappa, space.tau(v[0], v[1]), space.tau(v[1], v[2]), space.tau(v[0], v[2])};
  const ComparisonTriangle ct(model);

  for (int w = 0; w < 3; ++w) {
    auto& va = rep.angles[w];
    const int u1 = (w + 1) % 3, u2 = (w + 2) % 3;
    const Chain& s1 = detail::side_chain(tri, detail::side_between(w, u1));
    const Chain& s2 = detail::side_chain(tri, detail::side_between(w, u2));
    // With a bare side the ladder degenerates to the vertex triple itself and
    // the estimate reproduces the comparison angle trivially.
    if (s1.size() < 3 || s2.size() < 3) {
      va.note = "an adjacent side has no interior sample points";
      continue;
    }
    try {
      va.comparison = std::acosh(std::max(1.0, ct.vertex_cosh(w)));
      va.estimated = estimate_angle(space, s1, s2, v[w], kappa).value;
      va.gap = va.estimated - va.comparison;
      va.decided = true;
    } catch (const DomainError& e) {
      va.note = e.what();
    }
  }
  const auto& at_a = rep.angles[a];
  rep.cond_i.decided = at_a.decided;
  rep.cond_i.note = at_a.note;
  if (at_a.decided) {
    rep.cond_i.margin = std::abs(at_a.gap);
    rep.cond_i.holds = rep.cond_i.margin <= tol.angle;
  }
  rep.cond_ii = rep.cond_i;
  rep.cond_ii.note = "derived from (i)";

  // (iii) / (iv) over interior sample points of [a, c].
  const TriangleSide ac = detail::side_between(a, c);
  const Chain& side = detail::side_chain(tri, ac);
  const double L = std::max({model.t01, model.t12, model.t02});
  const double err2 = detail::squared_rounding(L);
  const double floor = 10.0 * tol.tau;
  const int bpos = rep.b;
  const TriangleSide bside = detail::side_between(bpos, a);
  const double blen = side_length(model, bside);
  // b as a side position: the end of the side [a, b] (or [b, a]) at b.
  const auto ends = endpoints(bside);
  const SidePosition bbar{bside, ends[0] == bpos ? 0.0 : blen};
  double worst = -1.0, best_pos = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < side.size(); ++k) {
    const std::size_t x = side.points[k];
    if (x == v[a] || x == v[c]) continue;
    const double s = std::min(side_length(model, ac), side.params[k] - side.params.front());
    const double tb = ct.tau(bbar, {ac, s}).tau_s;
    const double tx = space.tau_s(v[bpos], x);
    const double gap = detail::band_distance(tx, tb, err2);
    ++rep.points_checked;
    worst = std::max(worst, gap);
    if (tx > floor && tb > floor) best_pos = std::min(best_pos, gap);
  }
  if (rep.points_checked == 0) {
    rep.cond_iii.note = rep.cond_iv.note = "side [a,c] has no interior sample points";
    return rep;
  }
  rep.cond_iii.decided = true;
  rep.cond_iii.margin = worst;
  rep.cond_iii.holds = worst <= tol.tau_at(L);
  rep.cond_iv.decided = true;
  if (std::isfinite(best_pos)) {
    rep.cond_iv.margin = best_pos;
    rep.cond_iv.holds = best_pos <= tol.tau_at(L);
  } else {
    rep.cond_iv.note = "no interior point above the positivity floor";
  }
  return rep;
}

// ─── fill-ins ───────────────────────────────────────────────────────────────

/// Planar fill-in of a triangle from sampled geodesics joining the apex (role
/// `a`) to points of the opposite side. Every side and interior chain is
/// mapped linearly in tau-arclength; tau and causality are then compared on
/// all mapped pairs. K = 0 only.
inline FlatFillIn fill_in_reconstruct(const SampledSpace& space, const SampledTriangle& tri,
                                      const std::vector<Chain>& interior_chains, const Tolerances& tol = {},
                                      int a = 0) {
  if (interior_chains.empty()) throw MissingChains("fill-in needs interior chains from the apex");
  if (a < 0 || a > 2) throw DomainError("apex must be vertex position 0, 1 or 2");
  const auto& v = tri.v;
  const double t01 = space.tau(v[0], v[1]), t12 = space.tau(v[1], v[2]), t02 = space.tau(v[0], v[2]);
  validate(ModelTriangle{Kappa{0.0}, t01, t12, t02});
  const auto P = realize_plane(t01, t12, t02);
  FlatFillIn f;
  f.planar_vertices = {P[0], P[1], P[2]};
  for (int s = 0; s < 3; ++s) {
    const auto e = endpoints(static_cast<TriangleSide>(s));
    detail::map_chain(f.grid_map, tri.sides[s], P[e[0]], P[e[1]]);
  }
  // Opposite side [b, c] and its chain, oriented from the earlier vertex.
  const int b = (a + 1) % 3, c = (a + 2) % 3;
  const int lo = std::min(b, c), hi = std::max(b, c);
  const Chain& opp = detail::side_chain(tri, detail::side_between(lo, hi));
  std::map<std::size_t, PlanePoint> opp_map;
  detail::map_chain(opp_map, opp, P[lo], P[hi]);
  for (const auto& ch : interior_chains) {
    if (ch.size() < 2) throw MissingChains("interior chain has fewer than two points");
    std::size_t far;
    PlanePoint from, to;
    if (ch.front() == v[a]) {
      far = ch.back();
    } else if (ch.back() == v[a]) {
      far = ch.front();
    } else {
      throw DomainError("interior chain does not end at the apex");
    }
    const auto it = opp_map.find(far);
    if (it == opp_map.end()) throw DomainError("interior chain does not reach a sample point of the opposite side");
    if (ch.front() == v[a]) {
      from = P[a];
      to = it->second;
    } else {
      from = it->second;
      to = P[a];
    }
    detail::map_chain(f.grid_map, ch, from, to);
  }
  detail::verify_fill_in(space, f, tol);
  if (!f.within_tol) {
    const auto [i, j] = *f.witness;
    throw RigidityViolated("fill-in is not tau-preserving: |tau error| " + std::to_string(f.max_tau_error) +
                           " at points " + std::to_string(i) + ", " + std::to_string(j));
  }
  return f;
}

// ─── quadrangles ────────────────────────────────────────────────────────────

/// Sides and diagonals of Q = (p1, p2, p3, p4) with p1 << p2 << p4 << p3.
struct QuadrangleChains {
  Chain s12, s23, s43, s14;  // sides, each from the earlier point
  Chain d13, d24;            // diagonals
};

struct QuadrangleReport {
  std::array<std::size_t, 4> p{};
  std::array<double, 4> angles{};  // at p1, p2, p3, p4
  double lhs = 0.0, rhs = 0.0;
  double lhs_minus_rhs = 0.0;
  bool flat = false;
  std::optional<FlatFillIn> fill_in;
  std::string fill_in_note;
};

/// Side and diagonal chains from maximal chains of the finder.
inline QuadrangleChains quadrangle_chains(GeodesicFinder& finder, std::size_t p1, std::size_t p2, std::size_t p3,
                                          std::size_t p4) {
  return {finder.between(p1, p2), finder.between(p2, p3), finder.between(p4, p3),
          finder.between(p1, p4), finder.between(p1, p3), finder.between(p2, p4)};
}

/// Compares angle(p1) + angle(p3) with angle(p2) + angle(p4). When the
/// left side is not smaller (within tol.angle) the quadrangle is flat and a
/// planar quadrangle is built from the comparison triangles of
/// (p1, p2, p4) and (p2, p3, p4) glued along [p2, p4]; its map is checked on
/// all sampled side and diagonal points. K = 0.
inline QuadrangleReport quadrangle_rigidity(const SampledSpace& space, std::size_t p1, std::size_t p2, std::size_t p3,
                                            std::size_t p4, const QuadrangleChains& ch, const Tolerances& tol = {}) {
  for (auto q : {p1, p2, p3, p4}) space.check(q);
  if (!space.chronological(p1, p2) || !space.chronological(p2, p4) || !space.chronological(p4, p3))
    throw OrderViolated("quadrangle needs p1 << p2 << p4 << p3");
  auto check_ends = [](const Chain& c, std::size_t from, std::size_t to) {
    if (c.size() < 2 || c.front() != from || c.back() != to) throw DomainError("quadrangle chain has wrong endpoints");
  };
  check_ends(ch.s12, p1, p2);
  check_ends(ch.s23, p2, p3);
  check_ends(ch.s43, p4, p3);
  check_ends(ch.s14, p1, p4);
  check_ends(ch.d13, p1, p3);
  check_ends(ch.d24, p2, p4);

  const Kappa flat0{0.0};
  QuadrangleReport r;
  r.p = {p1, p2, p3, p4};
  r.angles[0] = estimate_angle(space, ch.s12, ch.s14, p1, flat0).value;
  r.angles[1] = estimate_angle(space, ch.s12, ch.s23, p2, flat0).value;
  r.angles[2] = estimate_angle(space, ch.s23, ch.s43, p3, flat0).value;
  r.angles[3] = estimate_angle(space, ch.s14, ch.s43, p4, flat0).value;
  r.lhs = r.angles[0] + r.angles[2];
  r.rhs = r.angles[1] + r.angles[3];
  r.lhs_minus_rhs = r.lhs - r.rhs;
  r.flat = r.lhs_minus_rhs >= -tol.angle;
  if (!r.flat) return r;

  // (p1, p2, p4) as v0 << v1 << v2, then p3 across the line through p2, p4.
  const double t12 = space.tau(p1, p2), t24 = space.tau(p2, p4), t14 = space.tau(p1, p4);
  const double t23 = space.tau(p2, p3), t43 = space.tau(p4, p3);
  const auto P = realize_plane(t12, t24, t14);
  const PlanePoint b1 = P[0], b2 = P[1], b4 = P[2];
  const PlanePoint e = (1.0 / t24) * (b4 - b2);
  const PlanePoint n{e.x, e.t};
  const double along = (t23 * t23 - t43 * t43 + t24 * t24) / (2.0 * t24);
  const double off2 = along * along - t23 * t23;
  const PlanePoint r1 = b1 - b2;
  const double side1 = e.t * r1.x - e.x * r1.t;  // Euclidean cross product sign
  const double off = std::sqrt(std::max(0.0, off2)) * (side1 > 0 ? -1.0 : 1.0);
  const PlanePoint b3 = b2 + along * e + off * n;

  FlatFillIn f;
  f.planar_vertices = {b1, b2, b3, b4};
  detail::map_chain(f.grid_map, ch.s12, b1, b2);
  detail::map_chain(f.grid_map, ch.s23, b2, b3);
  detail::map_chain(f.grid_map, ch.s43, b4, b3);
  detail::map_chain(f.grid_map, ch.s14, b1, b4);
  detail::map_chain(f.grid_map, ch.d13, b1, b3);
  detail::map_chain(f.grid_map, ch.d24, b2, b4);
  detail::verify_fill_in(space, f, tol);
  if (!f.within_tol) r.fill_in_note = "planar quadrangle is not tau-preserving on the sampled sides";
  r.fill_in = std::move(f);
  return r;
}

}  // namespace lps
