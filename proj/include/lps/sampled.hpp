#pragma once

// Angles, first variation and curvature certification on sampled spaces.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lps/errors.hpp"
#include "lps/geodesic.hpp"
#include "lps/modelspace.hpp"
#include "lps/parallel.hpp"
#include "lps/space.hpp"

namespace lps {

/// "Above" is the (<= K) comparison condition tau(p,q) >= tau(p_bar,q_bar);
/// "below" is tau(p,q) <= tau(p_bar,q_bar).
enum class BoundDirection { Above, Below };

inline const char* to_string(BoundDirection d) noexcept { return d == BoundDirection::Above ? "above" : "below"; }

// ─── angles ─────────────────────────────────────────────────────────────────

struct AngleOptions {
  /// Direction of the curvature bound the space is claimed to satisfy; sets
  /// which monotonicity the `monotone` flag checks. Unset: flag stays true.
  std::optional<BoundDirection> claimed;
  double converge_tol = 1e-3;
  Tolerances tol{};
};

struct AngleEstimate {
  double value = 0.0;
  bool infinite = false;
  int sign = -1;  // -1 same time orientation, +1 mixed
  std::vector<double> s_ladder;
  std::vector<double> t_ladder;
  std::vector<std::vector<double>> table;  // unsigned comparison angles, NaN where undefined
  std::vector<double> diagonal;
  bool monotone = true;
  bool converged = false;
  double last_delta = std::numeric_limits<double>::quiet_NaN();

  double signed_value() const noexcept { return sign * value; }
};

namespace detail {

struct LadderArm {
  int orient = +1;
  std::vector<std::size_t> pts;  // ordered by decreasing radius
  std::vector<double> r;
};

inline LadderArm arm_of(const Chain& c, std::size_t vertex) {
  if (c.size() < 2) throw DomainError("chain has no point besides the vertex");
  LadderArm a;
  if (c.front() == vertex) {
    a.orient = +1;
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
      a.pts.push_back(c.points[k]);
      a.r.push_back(c.params[k] - c.params.front());
    }
  } else if (c.back() == vertex) {
    a.orient = -1;
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
      a.pts.push_back(c.points[k]);
      a.r.push_back(c.params.back() - c.params[k]);
    }
  } else {
    throw DomainError("chain does not emanate from the vertex");
  }
  return a;
}

/// Indices into the arm for the geometric ladder L, L/2, L/4, ... down to the
/// smallest sampled radius, nearest point per rung, without repeats.
inline std::vector<std::size_t> ladder_indices(const LadderArm& a, double L, double floor_r) {
  std::vector<std::size_t> out;
  for (double s = L; s >= floor_r * (1.0 - 1e-12); s *= 0.5) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < a.r.size(); ++k)
      if (std::abs(a.r[k] - s) < std::abs(a.r[best] - s)) best = k;
    if (out.empty() || out.back() != best) out.push_back(best);
    if (s == 0.0) break;
  }
  // An arm whose finest sample lies beyond L contributes that sample alone.
  if (out.empty()) out.push_back(a.r.size() - 1);
  return out;
}

}  // namespace detail

/// cosh of the K-comparison angle at `vertex` for the hinge through p (on an
/// arm of orientation op) and q (orientation oq); nullopt where undefined.
inline std::optional<double> comparison_angle_cosh(const SampledSpace& s, std::size_t vertex, std::size_t p, int op,
                                                   std::size_t q, int oq, const Kappa& kappa) {
  if (p == q) return 1.0;
  try {
    if (op != oq) {
      const std::size_t past = op < 0 ? p : q;
      const std::size_t fut = op < 0 ? q : p;
      const double y = s.tau(past, vertex), t = s.tau(vertex, fut), z = s.tau(past, fut);
      if (!(y > 0 && t > 0 && z > 0)) return std::nullopt;
      return angle_from_sides(kappa, y, t, z, Sigma::Plus);
    }
    if (op > 0) {
      const double a = s.tau(vertex, p), b = s.tau(vertex, q);
      if (s.tau(p, q) > 0) return angle_from_sides(kappa, b, a, s.tau(p, q), Sigma::Minus);
      if (s.tau(q, p) > 0) return angle_from_sides(kappa, a, b, s.tau(q, p), Sigma::Minus);
      return std::nullopt;
    }
    const double a = s.tau(p, vertex), b = s.tau(q, vertex);
    if (s.tau(p, q) > 0) return angle_from_sides(kappa, a, b, s.tau(p, q), Sigma::Minus);
    if (s.tau(q, p) > 0) return angle_from_sides(kappa, b, a, s.tau(q, p), Sigma::Minus);
    return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

namespace detail {

/// Distance of tx from the interval of square roots compatible with
/// tb^2 +- err2; err2 is the absolute rounding error of the squared value,
/// which the square root amplifies near the light cone.
inline double band_distance(double tx, double tb, double err2) {
  const double lo = std::sqrt(std::max(0.0, tb * tb - err2));
  const double hi = std::sqrt(tb * tb + err2);
  return tx < lo ? lo - tx : (tx > hi ? tx - hi : 0.0);
}

inline double squared_rounding(double scale) { return 16 * std::numeric_limits<double>::epsilon() * scale * scale; }

}  // namespace detail

/// Angle between two chains at a common endpoint, from comparison angles on a
/// halving ladder of sampled points, extrapolated when the ladder converges
/// geometrically.
inline AngleEstimate estimate_angle(const SampledSpace& space, const Chain& alpha, const Chain& beta,
                                    std::size_t vertex, const Kappa& kappa, const AngleOptions& opts = {}) {
  const auto a = detail::arm_of(alpha, vertex);
  const auto b = detail::arm_of(beta, vertex);
  AngleEstimate est;
  est.sign = a.orient == b.orient ? -1 : +1;
  // Both ladders start at the shorter arm's length and run down to each arm's
  // own finest sample.
  const double L = std::min(a.r.front(), b.r.front());
  auto ia = detail::ladder_indices(a, L, a.r.back());
  auto ib = detail::ladder_indices(b, L, b.r.back());

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto fill = [&] {
    bool any = false;
    est.table.assign(ia.size(), std::vector<double>(ib.size(), nan));
    for (std::size_t i = 0; i < ia.size(); ++i) {
      for (std::size_t j = 0; j < ib.size(); ++j) {
        const auto c = comparison_angle_cosh(space, vertex, a.pts[ia[i]], a.orient, b.pts[ib[j]], b.orient, kappa);
        if (c) {
          est.table[i][j] = std::acosh(*c);
          any = true;
        }
      }
    }
    return any;
  };
  if (!fill()) {
    // Widen to every sampled point of both arms.
    ia.resize(a.pts.size());
    ib.resize(b.pts.size());
    for (std::size_t i = 0; i < ia.size(); ++i) ia[i] = i;
    for (std::size_t j = 0; j < ib.size(); ++j) ib[j] = j;
    if (!fill()) throw DomainError("no comparison angle is defined on the sampled arms");
  }
  for (auto i : ia) est.s_ladder.push_back(a.r[i]);
  for (auto j : ib) est.t_ladder.push_back(b.r[j]);

  // Rung k is the shell max(i, j) = k; take its defined entry nearest the
  // diagonal. Equal radii on two same-orientation arms are often spacelike
  // to each other, so (k, k) alone is not enough.
  const std::size_t rungs = std::max(ia.size(), ib.size());
  auto entry = [&](std::size_t i, std::size_t j) {
    return i < ia.size() && j < ib.size() ? est.table[i][j] : nan;
  };
  for (std::size_t k = 0; k < rungs; ++k) {
    double v = entry(k, k);
    for (std::size_t d = 1; d <= k && std::isnan(v); ++d) {
      v = entry(k, k - d);
      if (std::isnan(v)) v = entry(k - d, k);
    }
    if (!std::isnan(v)) est.diagonal.push_back(v);
  }

  const auto& d = est.diagonal;
  const std::size_t m = d.size();
  double value = d.back();
  if (m >= 2) est.last_delta = d[m - 1] - d[m - 2];
  if (m >= 3) {
    const double d1 = d[m - 2] - d[m - 3], d2 = d[m - 1] - d[m - 2];
    if (std::abs(d2) > 1e-12 && std::abs(d1) > 0.0) {
      const double ratio = d2 / d1;
      if (ratio >= 0.3 && ratio <= 0.7) value = d.back() + d2 * ratio / (1.0 - ratio);
      est.infinite = d1 > 0 && d2 > 1e-6 && ratio >= 0.9;
    }
  }
  est.value = std::max(0.0, value);
  est.converged = m >= 2 && std::abs(est.last_delta) <= opts.converge_tol;

  if (opts.claimed) {
    // Under an upper bound the signed comparison angle grows as the points
    // approach the vertex; under a lower bound it shrinks.
    const double dir = *opts.claimed == BoundDirection::Above ? 1.0 : -1.0;
    const double slack = opts.tol.angle;
    auto sv = [&](std::size_t i, std::size_t j) { return est.sign * est.table[i][j]; };
    for (std::size_t i = 0; i < ia.size(); ++i) {
      for (std::size_t j = 0; j < ib.size(); ++j) {
        if (std::isnan(est.table[i][j])) continue;
        if (i + 1 < ia.size() && !std::isnan(est.table[i + 1][j]) && dir * (sv(i + 1, j) - sv(i, j)) < -slack)
          est.monotone = false;
        if (j + 1 < ib.size() && !std::isnan(est.table[i][j + 1]) && dir * (sv(i, j + 1) - sv(i, j)) < -slack)
          est.monotone = false;
      }
    }
  }
  return est;
}

// ─── triangle inequality for angles ─────────────────────────────────────────

struct Hinge {
  std::size_t vertex = 0;
  Chain alpha, beta, gamma;
  /// gamma followed by beta (or beta by gamma) forms one geodesic.
  bool concatenation_geodesic = false;
};

struct AngleInequalityRecord {
  std::size_t hinge = 0;
  std::string relation;  // "i", "ii" or "iii"
  double margin = 0.0;
  double ab = 0.0, bc = 0.0, ac = 0.0;
  bool violated = false;
};

struct AngleInequalityReport {
  std::vector<AngleInequalityRecord> records;
  std::vector<std::pair<std::size_t, std::string>> skipped;

  bool ok() const {
    return std::none_of(records.begin(), records.end(), [](const auto& r) { return r.violated; });
  }
};

inline AngleInequalityReport check_angle_inequalities(const SampledSpace& space, const std::vector<Hinge>& hinges,
                                                      const Kappa& kappa, const AngleOptions& opts = {}) {
  AngleInequalityReport rep;
  for (std::size_t h = 0; h < hinges.size(); ++h) {
    const auto& hg = hinges[h];
    try {
      const int oa = detail::arm_of(hg.alpha, hg.vertex).orient;
      const int ob = detail::arm_of(hg.beta, hg.vertex).orient;
      const int oc = detail::arm_of(hg.gamma, hg.vertex).orient;
      if (oa != ob) {
        rep.skipped.emplace_back(h, "alpha and beta differ in time orientation");
        continue;
      }
      const double ab = estimate_angle(space, hg.alpha, hg.beta, hg.vertex, kappa, opts).value;
      const double bc = estimate_angle(space, hg.beta, hg.gamma, hg.vertex, kappa, opts).value;
      const double ac = estimate_angle(space, hg.alpha, hg.gamma, hg.vertex, kappa, opts).value;
      AngleInequalityRecord r{h, oc == oa ? "i" : "ii", ab + bc - ac, ab, bc, ac, false};
      r.violated = r.margin < -opts.tol.angle;
      rep.records.push_back(r);
      if (oc != oa && hg.concatenation_geodesic) {
        AngleInequalityRecord r3{h, "iii", ab - ac, ab, bc, ac, false};
        r3.violated = r3.margin < -opts.tol.angle;
        rep.records.push_back(r3);
      }
    } catch (const DomainError& e) {
      rep.skipped.emplace_back(h, e.what());
    }
  }
  return rep;
}

// ─── first variation on samples ─────────────────────────────────────────────

struct FvfEmpirical {
  int sigma = 1;
  double limit = 0.0;
  AngleEstimate angle;
  std::vector<double> t;  // ascending
  std::vector<double> quotients;
  std::vector<double> errors;
  std::vector<double> halving_ratios;  // err(t) / err(2t) where the ladder halves
  bool error_decreasing = true;
};

/// l(t) = tau_s(p, gamma(t)); compares (l(t) - l(0)) / t with
/// sigma * cosh of the angle at gamma(0) between gamma and [gamma(0), p].
inline FvfEmpirical fvf_empirical(const SampledSpace& space, const Chain& gamma, std::size_t p, const Kappa& kappa,
                                  GeodesicFinder& finder, const AngleOptions& opts = {}) {
  if (gamma.size() < 2) throw DomainError("gamma needs at least two points");
  const std::size_t a = gamma.front();
  FvfEmpirical out;
  Chain b0;
  if (space.chronological(p, a)) {
    out.sigma = +1;
    b0 = finder.between(p, a);
  } else if (space.chronological(a, p)) {
    out.sigma = -1;
    b0 = finder.between(a, p);
  } else {
    throw NotChronological("p is not chronologically related to gamma(0)");
  }
  if (b0.maximal_only) throw GeodesicDeficit("geodesic between p and gamma(0) has a deficit");
  out.angle = estimate_angle(space, gamma, b0, a, kappa, opts);
  out.limit = out.sigma * std::cosh(out.angle.value);
  const double l0 = space.tau_s(p, a);
  for (std::size_t k = 1; k < gamma.size(); ++k) {
    const double t = gamma.params[k] - gamma.params.front();
    const double q = (space.tau_s(p, gamma.points[k]) - l0) / t;
    out.t.push_back(t);
    out.quotients.push_back(q);
    out.errors.push_back(std::abs(q - out.limit));
  }
  for (std::size_t k = 0; k + 1 < out.t.size(); ++k) {
    if (out.errors[k] > out.errors[k + 1] + opts.tol.tau) out.error_decreasing = false;
    if (std::abs(out.t[k + 1] / out.t[k] - 2.0) < 1e-6 && out.errors[k + 1] > 0.0)
      out.halving_ratios.push_back(out.errors[k] / out.errors[k + 1]);
  }
  return out;
}

// ─── triangles and certification ────────────────────────────────────────────

/// Vertices v0 << v1 << v2 and geodesic sides [v0,v1], [v1,v2], [v0,v2].
struct SampledTriangle {
  std::array<std::size_t, 3> v{};
  std::array<Chain, 3> sides;
};

struct TriangleOptions {
  std::size_t cap = 20000;
  std::uint64_t seed = 1;
  std::vector<std::array<std::size_t, 3>> probes;  // always included first
  unsigned threads = 1;
};

struct TriangleSet {
  std::vector<SampledTriangle> triangles;
  std::size_t candidates = 0;        // chronological triples within size bounds
  std::size_t skipped_size = 0;      // triples beyond D_K
  std::size_t skipped_deficit = 0;   // a side has no exact geodesic
};

/// All chronological triples i << j << k, or a seeded uniform reservoir
/// sample of them when there are more than `cap`, plus the probes.
inline TriangleSet enumerate_triangles(const SampledSpace& space, GeodesicFinder& finder, const Kappa& kappa,
                                       const TriangleOptions& opts = {}) {
  TriangleSet out;
  const std::size_t n = space.size();
  const double dk = kappa.diameter();
  std::vector<std::array<std::size_t, 3>> picked;
  for (const auto& pr : opts.probes) {
    for (auto v : pr) space.check(v);
    if (!space.chronological(pr[0], pr[1]) || !space.chronological(pr[1], pr[2]))
      throw NotChronological("probe triangle is not chronologically ordered");
    picked.push_back(pr);
  }
  const std::size_t room = opts.cap > picked.size() ? opts.cap - picked.size() : 0;
  std::vector<std::array<std::size_t, 3>> reservoir;
  std::mt19937_64 rng(opts.seed);
  std::size_t seen = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!space.chronological(i, j)) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (!space.chronological(j, k)) continue;
        if (!(space.tau(i, k) < dk)) {
          ++out.skipped_size;
          continue;
        }
        ++seen;
        if (reservoir.size() < room) {
          reservoir.push_back({i, j, k});
        } else if (room > 0) {
          const std::size_t r = std::uniform_int_distribution<std::size_t>(0, seen - 1)(rng);
          if (r < room) reservoir[r] = {i, j, k};
        }
      }
    }
  }
  out.candidates = seen;
  std::sort(reservoir.begin(), reservoir.end());
  picked.insert(picked.end(), reservoir.begin(), reservoir.end());

  std::vector<std::size_t> targets;
  for (const auto& t : picked) {
    targets.push_back(t[1]);
    targets.push_back(t[2]);
  }
  finder.prepare(targets, opts.threads);
  const GeodesicFinder& cf = finder;
  std::vector<std::optional<SampledTriangle>> built(picked.size());
  parallel_for(picked.size(), opts.threads, [&](std::size_t idx) {
    const auto& t = picked[idx];
    SampledTriangle tri;
    tri.v = t;
    tri.sides = {cf.between(t[0], t[1]), cf.between(t[1], t[2]), cf.between(t[0], t[2])};
    for (const auto& c : tri.sides)
      if (c.maximal_only) return;
    built[idx] = std::move(tri);
  });
  for (auto& b : built) {
    if (b) {
      out.triangles.push_back(std::move(*b));
    } else {
      ++out.skipped_deficit;
    }
  }
  return out;
}

struct CertificateWitness {
  std::size_t triangle = 0;
  std::array<std::size_t, 3> vertices{};
  std::size_t p = 0, q = 0;
  double tau = 0.0;
  double tau_bar = 0.0;
  double margin = 0.0;
};

struct Certificate {
  BoundDirection direction = BoundDirection::Above;
  double k = 0.0;
  bool pass = true;
  double max_slack = 0.0;     // max distance of tau from the rounding interval of tau_bar
  double raw_slack = 0.0;     // max |tau - tau_bar| without the rounding interval
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<CertificateWitness> witness;
  std::size_t triangles_checked = 0;
  std::size_t triangles_skipped = 0;
  std::size_t pairs_checked = 0;
  double side_step = 0.0;  // largest gap between consecutive side samples
};

namespace detail {

struct TriangleResult {
  bool skipped = false;
  bool pass = true;
  double max_slack = 0.0;
  double raw_slack = 0.0;
  double worst = std::numeric_limits<double>::infinity();
  std::optional<CertificateWitness> violation;  // most negative violating margin
  std::size_t pairs = 0;
  double step = 0.0;
};

inline TriangleResult certify_one(const SampledSpace& space, const SampledTriangle& tri, const Kappa& kappa,
                                  BoundDirection dir, const Tolerances& tol) {
  TriangleResult res;
  std::optional<ComparisonTriangle> ct;
  try {
    ct.emplace(ModelTriangle{kappa, space.tau(tri.v[0], tri.v[1]), space.tau(tri.v[1], tri.v[2]),
                             space.tau(tri.v[0], tri.v[2])});
  } catch (const DomainError&) {
    res.skipped = true;
    return res;
  }
  struct Sample {
    SidePosition pos;
    std::size_t idx;
  };
  const auto& t = ct->triangle();
  const double L = std::max({t.t01, t.t12, t.t02});
  const double err2 = squared_rounding(L);
  std::vector<Sample> samples;
  const TriangleSide names[3] = {TriangleSide::V0V1, TriangleSide::V1V2, TriangleSide::V0V2};
  for (int sd = 0; sd < 3; ++sd) {
    const Chain& c = tri.sides[sd];
    const double len = side_length(ct->triangle(), names[sd]);
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double s = std::min(len, c.params[k] - c.params.front());
      samples.push_back({{names[sd], s}, c.points[k]});
      if (k > 0) res.step = std::max(res.step, c.params[k] - c.params[k - 1]);
    }
  }
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      if (samples[a].idx == samples[b].idx) continue;
      for (int flip = 0; flip < 2; ++flip) {
        const auto& P = flip ? samples[b] : samples[a];
        const auto& Q = flip ? samples[a] : samples[b];
        const double tb = ct->tau(P.pos, Q.pos).tau;
        const double tx = space.tau(P.idx, Q.idx);
        ++res.pairs;
        // tau_bar^2 carries an absolute rounding error of order eps * L^2, which
        // the square root amplifies near the light cone. Compare against the
        // resulting interval instead of the point value.
        const double lo = std::sqrt(std::max(0.0, tb * tb - err2));
        const double hi = std::sqrt(tb * tb + err2);
        const double dev = band_distance(tx, tb, err2);
        res.max_slack = std::max(res.max_slack, dev);
        res.raw_slack = std::max(res.raw_slack, std::abs(tx - tb));
        const double margin = dir == BoundDirection::Above ? tx - lo : hi - tx;
        res.worst = std::min(res.worst, margin);
        if (margin < -tol.tau_at(tb)) {
          res.pass = false;
          if (!res.violation || margin < res.violation->margin)
            res.violation = CertificateWitness{0, tri.v, P.idx, Q.idx, tx, tb, margin};
        }
      }
    }
  }
  return res;
}

}  // namespace detail

/// Checks the triangle comparison inequality on every pair of sampled side
/// points of every triangle. Triangles violating size bounds are skipped and
/// counted. For "above" the margin check also enforces that p_bar << q_bar
/// implies p << q, since tau(p,q) = 0 < tau_bar - tol is a violation.
inline Certificate certify_curvature_bound(const SampledSpace& space, const std::vector<SampledTriangle>& triangles,
                                           const Kappa& kappa, BoundDirection dir, const Tolerances& tol = {},
                                           unsigned threads = 1) {
  std::vector<detail::TriangleResult> res(triangles.size());
  parallel_for(triangles.size(), threads,
               [&](std::size_t i) { res[i] = detail::certify_one(space, triangles[i], kappa, dir, tol); });
  Certificate cert;
  cert.direction = dir;
  cert.k = kappa.k();
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& r = res[i];
    if (r.skipped) {
      ++cert.triangles_skipped;
      continue;
    }
    ++cert.triangles_checked;
    cert.pairs_checked += r.pairs;
    cert.max_slack = std::max(cert.max_slack, r.max_slack);
    cert.raw_slack = std::max(cert.raw_slack, r.raw_slack);
    cert.side_step = std::max(cert.side_step, r.step);
    cert.worst_margin = std::min(cert.worst_margin, r.worst);
    if (r.violation && (!cert.witness || r.violation->margin < cert.witness->margin)) {
      cert.witness = r.violation;
      cert.witness->triangle = i;
    }
    if (!r.pass) cert.pass = false;
  }
  return cert;
}

}  // namespace lps
