#pragma once

// Exact geometry of the two-dimensional Lorentzian model spaces L2(K).
//
// Sign convention: K > 0 is the de Sitter (cosh) regime, K < 0 the
// anti-de Sitter (trigonometric) regime with finite timelike diameter
// pi / sqrt(|K|), K = 0 the Minkowski plane.
//
// Hinge angles are carried as cosh(theta) >= 1 throughout; theta itself is
// only formed on demand.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lps/errors.hpp"

namespace lps {

struct PlanePoint {
  double t = 0.0;
  double x = 0.0;
};

inline PlanePoint operator+(PlanePoint a, PlanePoint b) { return {a.t + b.t, a.x + b.x}; }
inline PlanePoint operator-(PlanePoint a, PlanePoint b) { return {a.t - b.t, a.x - b.x}; }
inline PlanePoint operator*(double s, PlanePoint a) { return {s * a.t, s * a.x}; }

/// Causal relation of a second point as seen from a first one.
enum class Relation {
  Identical,
  FutureTimelike,
  FutureNull,
  Spacelike,
  PastNull,
  PastTimelike,
};

inline const char* to_string(Relation r) noexcept {
  switch (r) {
    case Relation::Identical: return "identical";
    case Relation::FutureTimelike: return "chronological-future";
    case Relation::FutureNull: return "causal-null-future";
    case Relation::Spacelike: return "spacelike";
    case Relation::PastNull: return "causal-null-past";
    case Relation::PastTimelike: return "chronological-past";
  }
  return "unknown";
}

inline Relation reversed(Relation r) noexcept {
  switch (r) {
    case Relation::FutureTimelike: return Relation::PastTimelike;
    case Relation::PastTimelike: return Relation::FutureTimelike;
    case Relation::FutureNull: return Relation::PastNull;
    case Relation::PastNull: return Relation::FutureNull;
    default: return r;
  }
}

inline bool is_timelike(Relation r) noexcept {
  return r == Relation::FutureTimelike || r == Relation::PastTimelike;
}

inline bool is_null(Relation r) noexcept {
  return r == Relation::FutureNull || r == Relation::PastNull;
}

/// tau is the directed time separation tau(p, q) (zero unless q lies in the
/// causal future of p); tau_s = max(tau(p,q), tau(q,p)).
struct TauResult {
  double tau = 0.0;
  double tau_s = 0.0;
  Relation relation = Relation::Identical;
};

namespace detail {

inline TauResult make_tau(double magnitude, Relation r) {
  const bool future = r == Relation::FutureTimelike;
  const bool timelike = is_timelike(r);
  return {future ? magnitude : 0.0, timelike ? magnitude : 0.0, r};
}

}  // namespace detail

/// Curvature parameter together with its timelike diameter D_K.
class Kappa {
 public:
  explicit Kappa(double k = 0.0) : k_(k) {
    if (!std::isfinite(k)) throw DomainError("curvature must be finite");
  }

  double k() const noexcept { return k_; }
  bool flat() const noexcept { return k_ == 0.0; }
  double scale() const noexcept { return std::sqrt(std::abs(k_)); }

  /// pi / sqrt(|K|) for K < 0, +infinity otherwise.
  double diameter() const noexcept {
    return k_ < 0.0 ? std::numbers::pi / scale() : std::numeric_limits<double>::infinity();
  }

 private:
  double k_;
};

/// +1: the two legs of the hinge have opposite time orientation (b << a << c).
/// -1: same time orientation (a << c << b).
enum class Sigma : int { Plus = 1, Minus = -1 };

inline double value(Sigma s) noexcept { return static_cast<double>(static_cast<int>(s)); }

// ─── Minkowski plane ────────────────────────────────────────────────────────

inline TauResult tau_plane(PlanePoint p, PlanePoint q) noexcept {
  const double dt = q.t - p.t;
  const double dx = q.x - p.x;
  if (dt == 0.0 && dx == 0.0) return {0.0, 0.0, Relation::Identical};
  const double adx = std::abs(dx);
  const double adt = std::abs(dt);
  if (adt > adx) {
    const double tau = std::sqrt((adt - adx) * (adt + adx));
    return detail::make_tau(tau, dt > 0.0 ? Relation::FutureTimelike : Relation::PastTimelike);
  }
  if (adt == adx) return {0.0, 0.0, dt > 0.0 ? Relation::FutureNull : Relation::PastNull};
  return {0.0, 0.0, Relation::Spacelike};
}

/// Hyperbolic angle at `vertex` between the segments to p and q. For legs of
/// opposite time orientation this is the angle between one leg and the
/// reversal of the other.
inline double plane_angle(PlanePoint vertex, PlanePoint p, PlanePoint q) {
  const PlanePoint u = p - vertex;
  const PlanePoint w = q - vertex;
  if (!(std::abs(u.t) > std::abs(u.x)) || !(std::abs(w.t) > std::abs(w.x)))
    throw DomainError("plane_angle: legs must be timelike");
  const double dot = std::abs(u.t * w.t - u.x * w.x);
  const double cross = std::abs(u.t * w.x - u.x * w.t);
  return std::atanh(cross / dot);
}

// ─── law of cosines ─────────────────────────────────────────────────────────

namespace detail {

enum class HingeKind { Timelike, Null, Spacelike, BeyondDiameter };

struct HingeSolve {
  HingeKind kind = HingeKind::Spacelike;
  double z = 0.0;
};

// Third side opposite a hinge with legs y, t and cosh(theta) = c. Every
// regime is written as "cosh z - 1" (resp. "1 - cos z") in half-angle form so
// that nearly collinear and nearly flat inputs keep full precision.
inline HingeSolve solve_hinge(const Kappa& kappa, double y, double t, double c, double sigma) {
  const double cm1 = std::max(0.0, c - 1.0);
  if (kappa.flat()) {
    double zz = 0.0;
    double scale = (y + t) * (y + t);
    if (sigma > 0) {
      zz = (y + t) * (y + t) + 2.0 * y * t * cm1;
    } else {
      zz = (y - t) * (y - t) - 2.0 * y * t * cm1;
    }
    if (std::abs(zz) <= 1e-14 * scale) return {HingeKind::Null, 0.0};
    if (zz < 0.0) return {HingeKind::Spacelike, 0.0};
    return {HingeKind::Timelike, std::sqrt(zz)};
  }
  const double a = kappa.scale();
  const double Y = a * y;
  const double T = a * t;
  if (kappa.k() > 0.0) {
    double r = 0.0;
    double scale = 1.0;
    if (sigma > 0) {
      const double h = std::sinh(0.5 * (Y + T));
      r = 2.0 * h * h + cm1 * std::sinh(Y) * std::sinh(T);
      scale += 2.0 * h * h;
    } else {
      const double h = std::sinh(0.5 * (Y - T));
      r = 2.0 * h * h - cm1 * std::sinh(Y) * std::sinh(T);
      scale += 2.0 * h * h + cm1 * std::sinh(Y) * std::sinh(T);
    }
    if (std::abs(r) <= 1e-14 * scale) return {HingeKind::Null, 0.0};
    if (r < 0.0) return {HingeKind::Spacelike, 0.0};
    return {HingeKind::Timelike, 2.0 * std::asinh(std::sqrt(0.5 * r)) / a};
  }
  // K < 0
  if (sigma > 0 && Y + T >= std::numbers::pi) return {HingeKind::BeyondDiameter, 0.0};
  if (Y >= std::numbers::pi || T >= std::numbers::pi) return {HingeKind::BeyondDiameter, 0.0};
  double r = 0.0;
  if (sigma > 0) {
    const double h = std::sin(0.5 * (Y + T));
    r = 2.0 * h * h + cm1 * std::sin(Y) * std::sin(T);
  } else {
    const double h = std::sin(0.5 * (Y - T));
    r = 2.0 * h * h - cm1 * std::sin(Y) * std::sin(T);
  }
  if (std::abs(r) <= 1e-14) return {HingeKind::Null, 0.0};
  if (r < 0.0) return {HingeKind::Spacelike, 0.0};
  double half = 0.5 * r;
  if (half > 1.0) {
    if (half > 1.0 + 1e-12) return {HingeKind::BeyondDiameter, 0.0};
    half = 1.0;
  }
  return {HingeKind::Timelike, 2.0 * std::asin(std::sqrt(half)) / a};
}

inline void require_length(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) throw DomainError(std::string(what) + " must be finite and nonnegative");
}

}  // namespace detail

/// Third side z of the model-space hinge with legs y, t and angle
/// arccosh(cosh_theta). With sigma = -1 the hinge is a << c << b with
/// y = tau(a,b) the longest side, so t <= y is required and z <= y - t.
inline double side_from_hinge(const Kappa& kappa, double y, double t, double cosh_theta, Sigma sigma) {
  detail::require_length(y, "y");
  detail::require_length(t, "t");
  if (!std::isfinite(cosh_theta) || cosh_theta < 1.0 - 1e-12)
    throw DomainError("cosh(theta) must be finite and >= 1");
  if (sigma == Sigma::Minus && t > y) throw DomainError("sigma=-1 hinge requires t <= y");
  const double dk = kappa.diameter();
  if (y >= dk || t >= dk) throw DomainError("hinge leg exceeds the model-space diameter");
  const auto sol = detail::solve_hinge(kappa, y, t, cosh_theta, value(sigma));
  switch (sol.kind) {
    case detail::HingeKind::Timelike: return sol.z;
    case detail::HingeKind::Null: return 0.0;
    case detail::HingeKind::Spacelike: throw DomainError("hinge is not realizable: third side would be spacelike");
    case detail::HingeKind::BeyondDiameter: throw DomainError("hinge is not realizable: beyond the model-space diameter");
  }
  return sol.z;
}

/// Inverse of side_from_hinge: cosh of the hinge angle at the vertex between
/// legs y and t, given the opposite side z.
inline double angle_from_sides(const Kappa& kappa, double y, double t, double z, Sigma sigma) {
  detail::require_length(y, "y");
  detail::require_length(t, "t");
  detail::require_length(z, "z");
  if (y == 0.0 || t == 0.0) throw DomainError("angle undefined for a zero-length leg");
  const double dk = kappa.diameter();
  if (y >= dk || t >= dk || z >= dk) throw DomainError("triangle violates size bounds");
  const bool plus = sigma == Sigma::Plus;
  double cm1 = 0.0;
  double err_scale = 1.0;
  if (kappa.flat()) {
    if (plus) {
      cm1 = (z - y - t) * (z + y + t) / (2.0 * y * t);
    } else {
      cm1 = (y - t - z) * (y - t + z) / (2.0 * y * t);
    }
    err_scale = std::max(1.0, (y + t + z) * (y + t + z) / (y * t));
  } else {
    const double a = kappa.scale();
    const double Y = a * y, T = a * t, Z = a * z;
    if (kappa.k() > 0.0) {
      const double den = std::sinh(Y) * std::sinh(T);
      if (plus) {
        cm1 = 2.0 * std::sinh(0.5 * (Z - Y - T)) * std::sinh(0.5 * (Z + Y + T)) / den;
      } else {
        cm1 = 2.0 * std::sinh(0.5 * (Y - T - Z)) * std::sinh(0.5 * (Y - T + Z)) / den;
      }
      err_scale = std::max(1.0, std::cosh(Y + T + Z) / den);
    } else {
      const double den = std::sin(Y) * std::sin(T);
      if (plus) {
        cm1 = 2.0 * std::sin(0.5 * (Z - Y - T)) * std::sin(0.5 * (Z + Y + T)) / den;
      } else {
        cm1 = 2.0 * std::sin(0.5 * (Y - T - Z)) * std::sin(0.5 * (Y - T + Z)) / den;
      }
      err_scale = std::max(1.0, 4.0 / den);
    }
  }
  if (!std::isfinite(cm1)) throw DomainError("angle_from_sides: degenerate input");
  if (cm1 < -1e-12 * err_scale) throw DomainError("sides are not realizable as a timelike hinge");
  return 1.0 + std::max(0.0, cm1);
}

// ─── comparison triangles ───────────────────────────────────────────────────

/// Side lengths of a timelike triangle with vertices in time order
/// v0 << v1 << v2: t01 = tau(v0,v1), t12 = tau(v1,v2), t02 = tau(v0,v2).
struct ModelTriangle {
  Kappa kappa;
  double t01 = 0.0;
  double t12 = 0.0;
  double t02 = 0.0;
};

enum class TriangleSide { V0V1, V1V2, V0V2 };

inline std::array<int, 2> endpoints(TriangleSide s) noexcept {
  switch (s) {
    case TriangleSide::V0V1: return {0, 1};
    case TriangleSide::V1V2: return {1, 2};
    case TriangleSide::V0V2: return {0, 2};
  }
  return {0, 0};
}

inline double side_length(const ModelTriangle& tri, TriangleSide s) noexcept {
  switch (s) {
    case TriangleSide::V0V1: return tri.t01;
    case TriangleSide::V1V2: return tri.t12;
    case TriangleSide::V0V2: return tri.t02;
  }
  return 0.0;
}

/// A point on a side, s measured in tau-arclength from the side's past end.
struct SidePosition {
  TriangleSide side = TriangleSide::V0V1;
  double s = 0.0;
};

inline bool satisfies_size_bounds(const ModelTriangle& tri) noexcept {
  return tri.t02 < tri.kappa.diameter();
}

/// Throws DomainError unless the sides are positive, satisfy the reverse
/// triangle inequality t02 >= t01 + t12 and the size bound t02 < D_K.
inline void validate(const ModelTriangle& tri) {
  for (double v : {tri.t01, tri.t12, tri.t02}) {
    if (!std::isfinite(v) || v <= 0.0) throw DomainError("triangle sides must be positive and finite");
  }
  if (tri.t02 < tri.t01 + tri.t12 - 1e-12 * (1.0 + tri.t02))
    throw DomainError("triangle violates the reverse triangle inequality");
  if (!satisfies_size_bounds(tri)) throw DomainError("triangle violates size bounds");
}

/// cosh of the interior angle at vertex 0, 1 or 2 of the comparison triangle.
inline double vertex_cosh(const ModelTriangle& tri, int vertex) {
  switch (vertex) {
    case 0: return angle_from_sides(tri.kappa, tri.t02, tri.t01, tri.t12, Sigma::Minus);
    case 1: return angle_from_sides(tri.kappa, tri.t01, tri.t12, tri.t02, Sigma::Plus);
    case 2: return angle_from_sides(tri.kappa, tri.t02, tri.t12, tri.t01, Sigma::Minus);
    default: throw DomainError("vertex index must be 0, 1 or 2");
  }
}

/// Vertices of the flat comparison triangle with v0 at the origin and v2 on
/// the time axis.
inline std::array<PlanePoint, 3> realize_plane(double t01, double t12, double t02) {
  const double t1 = (t02 * t02 + t01 * t01 - t12 * t12) / (2.0 * t02);
  const double gap = (t02 - t01 - t12) * (t02 - t01 + t12) / (2.0 * t02);
  const double x1 = std::sqrt(std::max(0.0, gap * (t1 + t01)));
  return {PlanePoint{0.0, 0.0}, PlanePoint{t1, x1}, PlanePoint{t02, 0.0}};
}

namespace detail {

inline void check_position(const ModelTriangle& tri, const SidePosition& p) {
  const double len = side_length(tri, p.side);
  if (!(p.s >= -1e-12 * (1.0 + len) && p.s <= len * (1.0 + 1e-12) + 1e-12))
    throw DomainError("side position outside the side");
}

inline PlanePoint plane_position(const std::array<PlanePoint, 3>& v, const ModelTriangle& tri,
                                 const SidePosition& p) {
  const auto [a, b] = endpoints(p.side);
  const double len = side_length(tri, p.side);
  const double f = std::clamp(p.s / len, 0.0, 1.0);
  return v[a] + f * (v[b] - v[a]);
}

struct Arm {
  double r;
  int orient;  // +1 future, -1 past, as seen from the shared vertex
};

inline Arm arm_from(int vertex, const ModelTriangle& tri, const SidePosition& p) {
  const auto [a, b] = endpoints(p.side);
  const double len = side_length(tri, p.side);
  const double s = std::clamp(p.s, 0.0, len);
  if (vertex == a) return {s, +1};
  if (vertex == b) return {len - s, -1};
  throw DomainError("vertex not on side");
}

inline int shared_vertex(TriangleSide s1, TriangleSide s2) {
  const auto e1 = endpoints(s1);
  const auto e2 = endpoints(s2);
  for (int u : e1)
    for (int w : e2)
      if (u == w) return u;
  throw DomainError("sides share no vertex");
}

/// Relation and separation of two points on rays leaving a common vertex.
inline TauResult hinge_tau(const Kappa& kappa, Arm p, Arm q, double c) {
  if (p.r == 0.0 && q.r == 0.0) return {0.0, 0.0, Relation::Identical};
  if (p.orient != q.orient) {
    const auto sol = solve_hinge(kappa, p.r, q.r, c, +1.0);
    if (sol.kind != HingeKind::Timelike) throw DomainError("comparison points beyond the model-space diameter");
    return make_tau(sol.z, q.orient > 0 ? Relation::FutureTimelike : Relation::PastTimelike);
  }
  const auto sol = solve_hinge(kappa, std::max(p.r, q.r), std::min(p.r, q.r), c, -1.0);
  if (sol.kind == HingeKind::BeyondDiameter) throw DomainError("comparison points beyond the model-space diameter");
  if (sol.kind == HingeKind::Spacelike) return {0.0, 0.0, Relation::Spacelike};
  if (p.r == q.r) return {0.0, 0.0, sol.kind == HingeKind::Null ? Relation::Identical : Relation::Spacelike};
  // Along rays of one orientation the later point has the larger radius
  // (future rays) or the smaller one (past rays).
  const bool q_later = (q.r > p.r) == (p.orient > 0);
  if (sol.kind == HingeKind::Null) return {0.0, 0.0, q_later ? Relation::FutureNull : Relation::PastNull};
  return make_tau(sol.z, q_later ? Relation::FutureTimelike : Relation::PastTimelike);
}

/// Comparison-point separation through the law of cosines at the vertex
/// shared by the two sides. Valid for every K.
inline TauResult comparison_point_tau_hinge(const ModelTriangle& tri, const SidePosition& p,
                                            const SidePosition& q) {
  if (p.side == q.side) {
    const double d = q.s - p.s;
    if (d == 0.0) return {0.0, 0.0, Relation::Identical};
    return make_tau(std::abs(d), d > 0.0 ? Relation::FutureTimelike : Relation::PastTimelike);
  }
  const int v = shared_vertex(p.side, q.side);
  return hinge_tau(tri.kappa, arm_from(v, tri, p), arm_from(v, tri, q), vertex_cosh(tri, v));
}

}  // namespace detail

/// A validated comparison triangle with its vertex angles (and, for K = 0,
/// its planar realization) computed once, for repeated point queries.
class ComparisonTriangle {
 public:
  explicit ComparisonTriangle(const ModelTriangle& tri) : tri_(tri) {
    validate(tri_);
    for (int v = 0; v < 3; ++v) cosh_[v] = lps::vertex_cosh(tri_, v);
    if (tri_.kappa.flat()) plane_ = realize_plane(tri_.t01, tri_.t12, tri_.t02);
  }

  const ModelTriangle& triangle() const noexcept { return tri_; }
  double vertex_cosh(int v) const { return cosh_.at(v); }
  const std::array<PlanePoint, 3>& plane() const noexcept { return plane_; }

  /// tau(p_bar, q_bar) and the relation of q_bar as seen from p_bar.
  TauResult tau(const SidePosition& p, const SidePosition& q) const {
    detail::check_position(tri_, p);
    detail::check_position(tri_, q);
    if (p.side == q.side) return detail::comparison_point_tau_hinge(tri_, p, q);
    if (tri_.kappa.flat())
      return tau_plane(detail::plane_position(plane_, tri_, p), detail::plane_position(plane_, tri_, q));
    const int v = detail::shared_vertex(p.side, q.side);
    return detail::hinge_tau(tri_.kappa, detail::arm_from(v, tri_, p), detail::arm_from(v, tri_, q), cosh_[v]);
  }

 private:
  ModelTriangle tri_;
  std::array<double, 3> cosh_{};
  std::array<PlanePoint, 3> plane_{};
};

/// Time separation tau(p_bar, q_bar) of the comparison points of p and q, and
/// the relation of q_bar as seen from p_bar. K = 0 uses the explicit planar
/// realization; K != 0 the law of cosines at the shared vertex.
inline TauResult comparison_point_tau(const ModelTriangle& tri, const SidePosition& p, const SidePosition& q) {
  return ComparisonTriangle(tri).tau(p, q);
}

// ─── polar chronology, angle sum ────────────────────────────────────────────

/// Relation of the point at radius r2 to the point at radius r1, both on
/// future radial geodesics from a common vertex of the Minkowski plane
/// meeting at hyperbolic angle psi. Chronological future iff r2 > r1 e^psi.
inline Relation polar_chronology(double r1, double r2, double psi) {
  if (!(r1 > 0.0) || !(r2 > 0.0) || !(psi >= 0.0) || !std::isfinite(r1 * r2 * psi))
    throw DomainError("polar_chronology: radii must be positive, psi nonnegative");
  if (r1 == r2 && psi == 0.0) return Relation::Identical;
  const double up = r1 * std::exp(psi);
  const double down = r1 * std::exp(-psi);
  const double tol = 1e-12;
  if (std::abs(r2 - up) <= tol * std::max(r2, up)) return Relation::FutureNull;
  if (std::abs(r2 - down) <= tol * std::max(r2, down)) return Relation::PastNull;
  if (r2 > up) return Relation::FutureTimelike;
  if (r2 < down) return Relation::PastTimelike;
  return Relation::Spacelike;
}

struct AngleSum {
  double at_a = 0.0;
  double at_b = 0.0;
  double at_c = 0.0;
  double defect = 0.0;
};

/// For a << b << c in the plane returns the angles and
/// angle_a(b,c) + angle_c(a,b) - angle_b(a,c), which vanishes identically.
inline AngleSum angle_sum(PlanePoint a, PlanePoint b, PlanePoint c) {
  if (tau_plane(a, b).relation != Relation::FutureTimelike || tau_plane(b, c).relation != Relation::FutureTimelike ||
      tau_plane(a, c).relation != Relation::FutureTimelike)
    throw DomainError("angle_sum_defect requires a << b << c");
  AngleSum out;
  out.at_a = plane_angle(a, b, c);
  out.at_b = plane_angle(b, a, c);
  out.at_c = plane_angle(c, a, b);
  out.defect = out.at_a + out.at_c - out.at_b;
  return out;
}

inline double angle_sum_defect(PlanePoint a, PlanePoint b, PlanePoint c) { return angle_sum(a, b, c).defect; }

// ─── first variation in the model space ─────────────────────────────────────

struct FvfModel {
  double quotient = 0.0;
  double limit = 0.0;
};

/// Difference quotient (z(t) - y) / t of the side opposite a hinge with legs
/// y and t, and its limit sigma * cosh(theta) as t -> 0.
inline FvfModel fvf_model(const Kappa& kappa, double y, Sigma sigma, double cosh_theta, double t) {
  if (!(y > 0.0) || !(t > 0.0)) throw DomainError("fvf_model requires y > 0 and t > 0");
  const double z = side_from_hinge(kappa, y, t, cosh_theta, sigma);
  return {(z - y) / t, value(sigma) * cosh_theta};
}

/// sigma * cosh(theta) - (z - y) / t; nonnegative on every realizable
/// triangle with b << a << c (sigma=+1) or a << c << b (sigma=-1).
inline double second_inequality_margin(const Kappa& kappa, double y, double t, double z, Sigma sigma) {
  const double c = angle_from_sides(kappa, y, t, z, sigma);
  return value(sigma) * c - (z - y) / t;
}

// ─── de Sitter oracle (K = +1) ──────────────────────────────────────────────

/// Point of the unit de Sitter quadric -T^2 + X^2 + Y^2 = 1 in R^{1,2}.
struct DeSitterPoint {
  double T = 0.0;
  double X = 1.0;
  double Y = 0.0;
};

inline double minkowski_dot(const DeSitterPoint& p, const DeSitterPoint& q) noexcept {
  return -p.T * q.T + p.X * q.X + p.Y * q.Y;
}

inline bool on_quadric(const DeSitterPoint& p) noexcept {
  const double r = -p.T * p.T + p.X * p.X + p.Y * p.Y;
  return std::isfinite(r) && std::abs(r - 1.0) <= 1e-12 * (1.0 + p.T * p.T + p.X * p.X + p.Y * p.Y);
}

/// The timelike meridian through (0, cos phi, sin phi), at proper time s.
inline DeSitterPoint ds_meridian(double s, double phi) noexcept {
  return {std::sinh(s), std::cosh(s) * std::cos(phi), std::cosh(s) * std::sin(phi)};
}

/// Geodesic from p with unit timelike tangent u (<u,u> = -1, <p,u> = 0).
inline DeSitterPoint ds_geodesic(const DeSitterPoint& p, const DeSitterPoint& u, double s) noexcept {
  const double ch = std::cosh(s), sh = std::sinh(s);
  return {ch * p.T + sh * u.T, ch * p.X + sh * u.X, ch * p.Y + sh * u.Y};
}

inline TauResult ds_tau(const DeSitterPoint& p, const DeSitterPoint& q) {
  if (!on_quadric(p) || !on_quadric(q)) throw DomainError("point off the de Sitter quadric");
  const double dT = q.T - p.T, dX = q.X - p.X, dY = q.Y - p.Y;
  if (dT == 0.0 && dX == 0.0 && dY == 0.0) return {0.0, 0.0, Relation::Identical};
  // <p,q> - 1 = -|q - p|^2 / 2, taken from the chord to avoid cancellation.
  const double neg_chord = dT * dT - (dX * dX + dY * dY);
  const double scale = dT * dT + dX * dX + dY * dY;
  if (std::abs(neg_chord) <= 1e-14 * scale)
    return {0.0, 0.0, dT > 0.0 ? Relation::FutureNull : Relation::PastNull};
  if (neg_chord < 0.0) return {0.0, 0.0, Relation::Spacelike};
  const double tau = 2.0 * std::asinh(0.5 * std::sqrt(neg_chord));
  return detail::make_tau(tau, dT > 0.0 ? Relation::FutureTimelike : Relation::PastTimelike);
}

/// Point at tau-arclength s on the geodesic from p to a chronologically
/// related q.
inline DeSitterPoint ds_interpolate(const DeSitterPoint& p, const DeSitterPoint& q, double s) {
  const double tau = ds_tau(p, q).tau_s;
  if (tau <= 0.0) throw NotChronological("ds_interpolate requires timelike related points");
  const double a = std::sinh(tau - s) / std::sinh(tau);
  const double b = std::sinh(s) / std::sinh(tau);
  return {a * p.T + b * q.T, a * p.X + b * q.X, a * p.Y + b * q.Y};
}

}  // namespace lps
