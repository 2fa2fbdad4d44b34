#pragma once

// Timelike lines and rays on sampled spaces: parallelism, the strip profile
// F(c), flat strips between parallel lines, asymptotic rays and the
// zero-angle concatenation test.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lps/errors.hpp"
#include "lps/geodesic.hpp"
#include "lps/modelspace.hpp"
#include "lps/rigidity.hpp"
#include "lps/sampled.hpp"
#include "lps/space.hpp"

namespace lps {

// ─── lines ──────────────────────────────────────────────────────────────────

struct LineCheck {
  bool ok = true;
  double worst = 0.0;  // largest |tau - parameter difference|
  std::size_t i = 0, j = 0;  // grid positions of the worst pair
};

/// Geodesic witness on the grid: tau(points[i], points[j]) = (j - i) * step.
inline LineCheck is_line(const SampledSpace& space, const LineSample& line, const Tolerances& tol = {}) {
  if (line.points.empty()) throw ShapeError("line has no points");
  if (!(line.step > 0.0)) throw ShapeError("line step must be positive");
  const auto c = check_chain(space, as_chain(line), tol);
  return {c.ok, c.worst, c.i, c.j};
}

/// The sub-line on grid positions [from, to].
inline LineSample slice(const LineSample& l, std::size_t from, std::size_t to) {
  if (from > to || to >= l.size()) throw ShapeError("line slice out of range");
  LineSample out = l;
  out.t0 = l.param(from);
  out.points.assign(l.points.begin() + static_cast<std::ptrdiff_t>(from),
                    l.points.begin() + static_cast<std::ptrdiff_t>(to) + 1);
  return out;
}

namespace detail {

inline void require_same_step(const LineSample& a, const LineSample& b) {
  if (std::abs(a.step - b.step) > 1e-12 * a.step) throw ShapeError("lines have different grid steps");
}

/// Grid position of parameter t on l, if t is a grid value inside the line.
inline std::optional<std::size_t> position(const LineSample& l, double t) {
  const double k = (t - l.t0) / l.step;
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-9 * (1.0 + std::abs(k)) || r < 0.0 || r >= static_cast<double>(l.size()))
    return std::nullopt;
  return static_cast<std::size_t>(r);
}

inline bool on_grid(double v, double step) {
  const double k = v / step;
  return std::abs(k - std::round(k)) <= 1e-9 * (1.0 + std::abs(k));
}

}  // namespace detail

// ─── weak and synchronised parallelism ──────────────────────────────────────

struct WindowOptions {
  double max_shift = std::numeric_limits<double>::infinity();  // default: the whole fixture window
  std::size_t min_overlap = 2;  // overlapping grid values needed for a shift to count
};

struct ParallelOffsets {
  double ab = 0.0;  // alpha(t) <= beta(t + ab)
  double ba = 0.0;  // beta(t) <= alpha(t + ba)
};

namespace detail {

/// Smallest grid shift s >= 0 with a(t) <= b(t + s) on every overlapping grid
/// value. nullopt once the overlap drops below min_overlap; WindowExhausted
/// when the window ends first.
inline std::optional<double> first_offset(const SampledSpace& space, const LineSample& a, const LineSample& b,
                                          const WindowOptions& w) {
  for (std::size_t k = 0;; ++k) {
    const double s = static_cast<double>(k) * a.step;
    std::size_t overlap = 0;
    bool all = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto j = position(b, a.param(i) + s);
      if (!j) continue;
      ++overlap;
      if (!space.causal(a.points[i], b.points[*j])) all = false;
    }
    if (overlap < w.min_overlap) return std::nullopt;
    if (s > w.max_shift * (1.0 + 1e-12))
      throw WindowExhausted("no parallel shift within the search window; data allows up to larger shifts");
    if (all) return s;
  }
}

}  // namespace detail

/// Smallest grid offsets s with alpha(t) <= beta(t+s) and beta(t) <= alpha(t+s)
/// for all overlapping t; nullopt when one of them does not exist on the data.
inline std::optional<ParallelOffsets> weakly_parallel_offset(const SampledSpace& space, const LineSample& alpha,
                                                             const LineSample& beta, const WindowOptions& w = {}) {
  detail::require_same_step(alpha, beta);
  const auto ab = detail::first_offset(space, alpha, beta, w);
  if (!ab) return std::nullopt;
  const auto ba = detail::first_offset(space, beta, alpha, w);
  if (!ba) return std::nullopt;
  return ParallelOffsets{*ab, *ba};
}

/// Result of fitting alpha(s) <= beta(t) iff (t + shift) - s >= c0 with
/// tau = sqrt(((t + shift) - s)^2 - c0^2).
struct SyncFit {
  bool ok = false;
  double shift = 0.0;
  double c0 = 0.0;
  double worst = 0.0;  // largest tau residual
  std::size_t causal_mismatches = 0;
  std::size_t i = 0, j = 0;  // point indices of the worst pair
  std::size_t pairs = 0;
  std::string note;
};

/// Least-squares fit of D^2 - tau^2 = -2 shift D + (c0^2 - shift^2) over
/// chronologically related pairs (D = raw parameter difference), then a
/// pointwise check of causality and tau on every pair.
inline SyncFit sync_parallel_fit(const SampledSpace& space, const LineSample& alpha, const LineSample& beta,
                                 const Tolerances& tol = {}) {
  detail::require_same_step(alpha, beta);
  SyncFit fit;
  double n = 0, sd = 0, sy = 0, sdd = 0, sdy = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < beta.size(); ++j) {
      const double tau = space.tau_s(alpha.points[i], beta.points[j]);
      if (!(tau > 0.0)) continue;
      const double D = beta.param(j) - alpha.param(i);
      const double y = (D - tau) * (D + tau);
      n += 1;
      sd += D;
      sy += y;
      sdd += D * D;
      sdy += D * y;
    }
  }
  if (n < 1) {
    fit.note = "no chronologically related pairs";
    return fit;
  }
  const double var = sdd - sd * sd / n;
  double slope = 0.0;
  if (var > 1e-12 * (1.0 + sdd)) {
    slope = (sdy - sd * sy / n) / var;
  } else {
    fit.note = "single parameter difference; shift fixed at 0";
  }
  const double icpt = (sy - slope * sd) / n;
  fit.shift = -0.5 * slope;
  const double c2 = icpt + fit.shift * fit.shift;
  fit.c0 = std::sqrt(std::max(0.0, c2));

  double scale = 0.0;
  for (const auto& l : {alpha, beta}) scale = std::max({scale, std::abs(l.param(0)), std::abs(l.param(l.size() - 1))});
  const double err2 = detail::squared_rounding(2 * scale + std::abs(fit.shift) + fit.c0);
  double worst = -1.0;
  bool bad = false;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = 0; j < beta.size(); ++j) {
      const std::size_t a = alpha.points[i], b = beta.points[j];
      const double delta = beta.param(j) + fit.shift - alpha.param(i);
      const double band = tol.tau_at(fit.c0);
      const double model = std::abs(delta) > fit.c0 ? std::sqrt((std::abs(delta) - fit.c0) * (std::abs(delta) + fit.c0)) : 0.0;
      ++fit.pairs;
      // Forward and backward relations, skipping the ambiguous threshold band.
      for (int dir : {+1, -1}) {
        const double d = dir * delta;
        const bool observed = dir > 0 ? space.causal(a, b) : space.causal(b, a);
        if (d >= fit.c0 + band && !observed) ++fit.causal_mismatches;
        if (d <= fit.c0 - band && observed && a != b) ++fit.causal_mismatches;
        const double tx = dir > 0 ? space.tau(a, b) : space.tau(b, a);
        const double want = d > 0 ? model : 0.0;
        const double err = detail::band_distance(tx, want, err2);
        if (err > worst) {
          worst = err;
          fit.i = a;
          fit.j = b;
        }
        if (err > tol.tau_at(want)) bad = true;
      }
    }
  }
  fit.worst = std::max(0.0, worst);
  fit.ok = !bad && fit.causal_mismatches == 0 && c2 >= -tol.tau;
  if (!fit.ok && fit.note.empty()) fit.note = "lines are not synchronised parallel on the sample";
  return fit;
}

// ─── strip profile ──────────────────────────────────────────────────────────

struct StripOptions {
  double trim = 0.1;               // fraction of alpha's window dropped at each end
  std::size_t angle_samples = 5;   // grid values of t used for the hinge angle
  std::size_t hinge_steps = 4;     // grid steps of the future arm along beta
  Tolerances tol{};
};

struct StripProfile {
  bool synchronised = false;
  double shift = 0.0;  // grid-rounded shift applied to beta
  double c0 = std::numeric_limits<double>::quiet_NaN();
  double step = 0.0;
  std::vector<double> offsets;
  std::vector<double> F;           // mean of tau(alpha(t), beta(t + c)) over t
  std::vector<double> deviation;   // max |tau - F| over t
  std::vector<std::size_t> count;  // t values used
  std::vector<double> Fp;          // cosh of the mean hinge angle
  std::vector<double> angle;       // mean hinge angle at beta(t + c)
  std::vector<double> angle_deviation;
  std::vector<double> Fp_stencil;  // one-sided three-point stencil, Richardson-refined when possible
  std::vector<double> width;       // F * sqrt(Fp^2 - 1)
  std::vector<std::string> notes;
};

/// For each synchronised offset c: t -> tau(alpha(t), beta(t + c)) over the
/// trimmed window, and the hinge angle at beta(t + c) between the chord back
/// to alpha(t) and beta's own future, whose cosh is F'(c+).
inline StripProfile strip_profile(const SampledSpace& space, const LineSample& alpha, const LineSample& beta,
                                  const std::vector<double>& offsets, const StripOptions& o = {}) {
  detail::require_same_step(alpha, beta);
  const double h = alpha.step;
  StripProfile P;
  P.step = h;
  const auto fit = sync_parallel_fit(space, alpha, beta, o.tol);
  if (fit.ok) {
    P.c0 = fit.c0;
    if (detail::on_grid(fit.shift, h)) {
      P.synchronised = true;
      P.shift = std::round(fit.shift / h) * h;
    } else {
      P.notes.push_back("fitted shift is not a grid multiple; raw parameters used");
    }
  } else {
    P.notes.push_back("no synchronised fit: " + fit.note);
  }
  const double lo = alpha.param(0), hi = alpha.param(alpha.size() - 1);
  const double cut = o.trim * (hi - lo);

  struct Sample {
    std::size_t i, j;
  };
  auto samples = [&](double c) {
    std::vector<Sample> out;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const double t = alpha.param(i);
      if (t < lo + cut - 1e-12 || t > hi - cut + 1e-12) continue;
      if (const auto j = detail::position(beta, t + c - P.shift)) out.push_back({i, *j});
    }
    return out;
  };
  auto F_at = [&](double c) {
    const auto s = samples(c);
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0;
    for (const auto& x : s) sum += space.tau(alpha.points[x.i], beta.points[x.j]);
    return sum / static_cast<double>(s.size());
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (double c : offsets) {
    if (!detail::on_grid(c, h)) throw DomainError("strip offsets must be grid multiples");
    P.offsets.push_back(c);
    const auto s = samples(c);
    double mean = nan, dev = nan;
    if (!s.empty()) {
      double sum = 0;
      for (const auto& x : s) sum += space.tau(alpha.points[x.i], beta.points[x.j]);
      mean = sum / static_cast<double>(s.size());
      dev = 0;
      for (const auto& x : s) dev = std::max(dev, std::abs(space.tau(alpha.points[x.i], beta.points[x.j]) - mean));
    }
    P.F.push_back(mean);
    P.deviation.push_back(dev);
    P.count.push_back(s.size());

    // Hinge angles at a few evenly spread t.
    std::vector<Sample> usable;
    for (const auto& x : s)
      if (x.j + o.hinge_steps < beta.size() && space.chronological(alpha.points[x.i], beta.points[x.j]))
        usable.push_back(x);
    std::vector<double> angles;
    std::size_t failures = 0;
    const std::size_t want = std::min(o.angle_samples, usable.size());
    for (std::size_t k = 0; k < want; ++k) {
      const auto& x = usable[want == 1 ? 0 : k * (usable.size() - 1) / (want - 1)];
      const std::size_t v = beta.points[x.j];
      const Chain back = chain_from_points(space, {alpha.points[x.i], v});
      const Chain ahead = as_chain(slice(beta, x.j, x.j + o.hinge_steps));
      try {
        angles.push_back(estimate_angle(space, back, ahead, v, Kappa{0.0}).value);
      } catch (const DomainError&) {
        ++failures;
      }
    }
    if (failures > 0)
      P.notes.push_back("offset " + std::to_string(c) + ": " + std::to_string(failures) + " hinge angle(s) undefined");
    if (angles.empty()) {
      P.angle.push_back(nan);
      P.angle_deviation.push_back(nan);
      P.Fp.push_back(nan);
    } else {
      double sum = 0, amin = angles[0], amax = angles[0];
      for (double a : angles) {
        sum += a;
        amin = std::min(amin, a);
        amax = std::max(amax, a);
      }
      const double a = sum / static_cast<double>(angles.size());
      P.angle.push_back(a);
      P.angle_deviation.push_back(amax - amin);
      P.Fp.push_back(std::cosh(a));
    }
    const double fp = P.Fp.back();
    P.width.push_back(std::isfinite(mean) && std::isfinite(fp) ? mean * std::sqrt(std::max(0.0, fp * fp - 1.0)) : nan);

    // (-3 F(c) + 4 F(c+h) - F(c+2h)) / 2h, refined against step 2h.
    auto stencil = [&](double hh) { return (-3 * mean + 4 * F_at(c + hh) - F_at(c + 2 * hh)) / (2 * hh); };
    const double s1 = stencil(h), s2 = stencil(2 * h);
    P.Fp_stencil.push_back(std::isfinite(s2) ? (4 * s1 - s2) / 3 : s1);
  }
  return P;
}

// ─── flat strips ────────────────────────────────────────────────────────────

struct FlatStrip {
  double shift = 0.0;
  double c0 = 0.0;
  double width = 0.0;        // F * sqrt(F'^2 - 1) at the first usable offset
  double width_error = 0.0;  // max |F * sqrt(F'^2 - 1) - c0| over the offsets used
  std::vector<double> offsets_used;
  std::vector<PlanePoint> alpha_map;  // alpha(t) -> (t, 0)
  std::vector<PlanePoint> beta_map;   // beta(t) -> (t + shift, width)
  double max_tau_error = 0.0;
  std::size_t causal_mismatches = 0;
  std::size_t pairs_checked = 0;
  bool within_tol = true;
};

/// Planar strip spanned by two synchronised parallel lines. The width comes
/// from the profile identity F * sqrt(F'^2 - 1) and must match the fitted c0;
/// the map is then checked on every sampled pair of both lines.
inline FlatStrip flat_strip_reconstruct(const SampledSpace& space, const LineSample& alpha, const LineSample& beta,
                                        const Tolerances& tol = {}, std::size_t probe_offsets = 4) {
  const auto fit = sync_parallel_fit(space, alpha, beta, tol);
  if (!fit.ok)
    throw StripInconsistent("lines are not synchronised parallel: residual " + std::to_string(fit.worst) +
                            " at points " + std::to_string(fit.i) + ", " + std::to_string(fit.j));
  const double h = alpha.step;
  if (!detail::on_grid(fit.shift, h)) throw StripInconsistent("fitted shift is not a grid multiple");
  FlatStrip S;
  S.c0 = fit.c0;
  S.shift = std::round(fit.shift / h) * h;
  std::vector<double> offsets;
  const double first = (std::floor(fit.c0 / h + 1e-9) + 1) * h;
  for (std::size_t k = 0; k < probe_offsets; ++k) offsets.push_back(first + static_cast<double>(k) * h);
  StripOptions o;
  o.tol = tol;
  const auto P = strip_profile(space, alpha, beta, offsets, o);
  bool have = false;
  for (std::size_t k = 0; k < P.offsets.size(); ++k) {
    if (!std::isfinite(P.width[k])) continue;
    if (!have) S.width = P.width[k];
    have = true;
    S.offsets_used.push_back(P.offsets[k]);
    S.width_error = std::max(S.width_error, std::abs(P.width[k] - fit.c0));
  }
  if (!have) throw StripInconsistent("no offset above c0 has a defined hinge angle");
  if (S.width_error > tol.angle * (1.0 + fit.c0))
    throw StripInconsistent("width identity fails: |F sqrt(F'^2 - 1) - c0| = " + std::to_string(S.width_error));

  FlatFillIn f;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    S.alpha_map.push_back({alpha.param(i), 0.0});
    f.grid_map.emplace(alpha.points[i], S.alpha_map.back());
  }
  for (std::size_t j = 0; j < beta.size(); ++j) {
    S.beta_map.push_back({beta.param(j) + S.shift, S.width});
    f.grid_map.emplace(beta.points[j], S.beta_map.back());
  }
  detail::verify_fill_in(space, f, tol);
  S.max_tau_error = f.max_tau_error;
  S.causal_mismatches = f.causal_mismatches;
  S.pairs_checked = f.pairs_checked;
  S.within_tol = f.within_tol && f.causal_mismatches == 0;
  return S;
}

// ─── asymptotic rays ────────────────────────────────────────────────────────

struct RayOptions {
  /// Parameters up to this value are compared; default half the shortest
  /// approximant.
  double prefix = std::numeric_limits<double>::quiet_NaN();
  double match_tol = 1e-9;
};

struct AsymptoticRay {
  std::vector<double> horizon;
  std::vector<Chain> approximants;       // [p, alpha(t_n)]
  std::vector<double> drift;             // between approximants n and n+1
  std::vector<std::size_t> matched;      // parameters compared per drift entry
  std::vector<double> ratio;             // drift[n+1] / drift[n]
  double prefix = 0.0;
  bool stabilized = false;
  Chain ray;  // last approximant truncated to the prefix
  std::string note;
};

/// Geodesics [p, alpha(t_n)] for increasing t_n. Successive approximants are
/// compared at equal tau-arclength parameters with the metric d; the drift is
/// the largest such distance within the prefix.
inline AsymptoticRay asymptotic_ray(const SampledSpace& space, GeodesicFinder& finder, const LineSample& alpha,
                                    std::size_t p, const std::vector<double>& horizon, const RayOptions& o = {}) {
  space.check(p);
  if (horizon.empty()) throw DomainError("horizon is empty");
  if (!space.has_metric()) throw MissingMetric("ray drift needs the metric d");
  AsymptoticRay R;
  R.horizon = horizon;
  std::sort(R.horizon.begin(), R.horizon.end());
  for (double t : R.horizon) {
    const auto k = detail::position(alpha, t);
    if (!k) throw DomainError("horizon value is not a grid point of the ray");
    const std::size_t q = alpha.points[*k];
    if (q == p) {
      R.approximants.push_back(chain_from_points(space, {p}));
      continue;
    }
    if (!space.chronological(p, q)) throw NotInPast("p is not in the chronological past of alpha(" + std::to_string(t) + ")");
    R.approximants.push_back(finder.between(p, q));
  }
  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& c : R.approximants) shortest = std::min(shortest, c.length());
  R.prefix = std::isnan(o.prefix) ? 0.5 * shortest : o.prefix;

  for (std::size_t n = 0; n + 1 < R.approximants.size(); ++n) {
    const auto& A = R.approximants[n];
    const auto& B = R.approximants[n + 1];
    double drift = 0.0;
    std::size_t matched = 0;
    for (std::size_t k = 0; k < B.size(); ++k) {
      const double u = B.params[k] - B.params.front();
      if (u > R.prefix * (1.0 + 1e-12)) continue;
      for (std::size_t l = 0; l < A.size(); ++l) {
        const double v = A.params[l] - A.params.front();
        if (std::abs(u - v) <= o.match_tol * (1.0 + u)) {
          drift = std::max(drift, space.metric(A.points[l], B.points[k]));
          ++matched;
          break;
        }
      }
    }
    R.matched.push_back(matched);
    R.drift.push_back(matched > 1 ? drift : std::numeric_limits<double>::quiet_NaN());
  }
  for (std::size_t n = 0; n + 1 < R.drift.size(); ++n)
    R.ratio.push_back(R.drift[n] > 0.0 ? R.drift[n + 1] / R.drift[n] : std::numeric_limits<double>::quiet_NaN());

  R.stabilized = !R.drift.empty();
  for (std::size_t n = 0; n < R.drift.size(); ++n) {
    if (!std::isfinite(R.drift[n])) {
      R.stabilized = false;
      R.note = "approximants share no parameters beyond p inside the prefix";
    } else if (n > 0 && R.drift[n] > R.drift[n - 1] + 1e-12) {
      R.stabilized = false;
      if (R.note.empty()) R.note = "drift does not decrease";
    }
  }
  const auto& last = R.approximants.back();
  std::vector<std::size_t> pts;
  for (std::size_t k = 0; k < last.size(); ++k)
    if (last.params[k] - last.params.front() <= R.prefix * (1.0 + 1e-12)) pts.push_back(last.points[k]);
  R.ray = chain_from_points(space, pts);
  return R;
}

// ─── concatenation ──────────────────────────────────────────────────────────

struct ConcatResult {
  double angle = 0.0;
  bool is_line = false;
  double worst = 0.0;  // largest tau residual of the concatenated chain
  AngleEstimate estimate;
};

/// Angle at p between a chain ending at p and one starting at p, and whether
/// their concatenation is still a geodesic.
inline ConcatResult concat_angle(const SampledSpace& space, const Chain& beta_minus, const Chain& beta_plus,
                                 std::size_t p, const Kappa& kappa, const Tolerances& tol = {}) {
  if (beta_minus.size() < 2 || beta_plus.size() < 2) throw DomainError("concatenation needs two nontrivial chains");
  if (beta_minus.back() != p || beta_plus.front() != p) throw DomainError("chains must meet at p, past one first");
  ConcatResult r;
  r.estimate = estimate_angle(space, beta_minus, beta_plus, p, kappa);
  r.angle = r.estimate.value;
  std::vector<std::size_t> pts = beta_minus.points;
  pts.insert(pts.end(), beta_plus.points.begin() + 1, beta_plus.points.end());
  const auto chk = check_chain(space, chain_from_points(space, pts), tol);
  r.is_line = chk.ok;
  r.worst = chk.worst;
  return r;
}

}  // namespace lps
