#pragma once

// Finite sampled Lorentzian pre-length spaces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lps/errors.hpp"
#include "lps/modelspace.hpp"

namespace lps {

/// Default tolerances. Tau-like quantities use tol * (1 + |value|).
struct Tolerances {
  double tau = 1e-7;
  double angle = 1e-6;
  double geo = 1e-7;

  double tau_at(double v) const noexcept { return tau * (1.0 + std::abs(v)); }
  double geo_at(double v) const noexcept { return geo * (1.0 + std::abs(v)); }
};

/// n points with a time-separation matrix and an explicit causal matrix
/// (null relations cannot be recovered from tau alone). An optional metric
/// d is carried when the generator knows one; it is only used by
/// diagnostics that need a topology, such as ray convergence.
class SampledSpace {
 public:
  SampledSpace() = default;

  explicit SampledSpace(std::size_t n) : n_(n), tau_(n * n, 0.0), causal_(n * n, 0) {
    for (std::size_t i = 0; i < n; ++i) causal_[i * n + i] = 1;
  }

  static SampledSpace from_matrices(const std::vector<std::vector<double>>& tau,
                                    const std::vector<std::vector<bool>>& causal) {
    const std::size_t n = tau.size();
    if (causal.size() != n) throw ShapeError("tau and causal matrices differ in size");
    SampledSpace s(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (tau[i].size() != n || causal[i].size() != n) throw ShapeError("matrix rows must have length n");
      for (std::size_t j = 0; j < n; ++j) {
        s.tau_[i * n + j] = tau[i][j];
        s.causal_[i * n + j] = causal[i][j] ? 1 : 0;
      }
    }
    return s;
  }

  std::size_t size() const noexcept { return n_; }

  double tau(std::size_t i, std::size_t j) const noexcept { return tau_[i * n_ + j]; }
  bool causal(std::size_t i, std::size_t j) const noexcept { return causal_[i * n_ + j] != 0; }
  bool chronological(std::size_t i, std::size_t j) const noexcept { return tau(i, j) > 0.0; }

  /// max(tau(i,j), tau(j,i)).
  double tau_s(std::size_t i, std::size_t j) const noexcept { return std::max(tau(i, j), tau(j, i)); }

  void set(std::size_t i, std::size_t j, double tau, bool causal) {
    check(i);
    check(j);
    tau_[i * n_ + j] = tau;
    causal_[i * n_ + j] = causal ? 1 : 0;
  }

  bool has_metric() const noexcept { return !dist_.empty(); }

  double metric(std::size_t i, std::size_t j) const {
    if (dist_.empty()) throw MissingMetric("space carries no metric d");
    return dist_[i * n_ + j];
  }

  void set_metric(std::vector<double> d) {
    if (!d.empty() && d.size() != n_ * n_) throw ShapeError("metric must be n x n");
    dist_ = std::move(d);
  }

  const std::vector<double>& metric_data() const noexcept { return dist_; }

  std::vector<std::string> labels;
  nlohmann::json meta = nlohmann::json::object();

  void check(std::size_t i) const {
    if (i >= n_) throw ShapeError("point index out of range");
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> tau_;
  std::vector<std::uint8_t> causal_;
  std::vector<double> dist_;
};

/// A tau-arclength parametrised sequence of points. `deficit` is
/// tau(first, last) - total when the chain came from a restricted search.
struct Chain {
  std::vector<std::size_t> points;
  std::vector<double> params;
  double deficit = 0.0;
  bool maximal_only = false;  // true when deficit exceeds geo_tol

  std::size_t front() const { return points.front(); }
  std::size_t back() const { return points.back(); }
  std::size_t size() const noexcept { return points.size(); }
  double length() const { return params.empty() ? 0.0 : params.back() - params.front(); }
};

inline bool operator==(const Chain& a, const Chain& b) {
  return a.points == b.points && a.params == b.params && a.deficit == b.deficit && a.maximal_only == b.maximal_only;
}

/// Chain through the given points with parameters accumulated from tau.
inline Chain chain_from_points(const SampledSpace& space, const std::vector<std::size_t>& pts, double start = 0.0) {
  Chain c;
  c.points = pts;
  c.params.reserve(pts.size());
  double acc = start;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    space.check(pts[k]);
    if (k > 0) acc += space.tau(pts[k - 1], pts[k]);
    c.params.push_back(acc);
  }
  return c;
}

struct ChainCheck {
  bool ok = true;
  double worst = 0.0;  // largest |tau - parameter difference|
  std::size_t i = 0, j = 0;
};

/// Geodesic witness: tau(points[i], points[j]) = params[j] - params[i].
inline ChainCheck check_chain(const SampledSpace& space, const Chain& c, const Tolerances& tol = {}) {
  ChainCheck out;
  if (c.points.size() != c.params.size()) throw ShapeError("chain points and params differ in length");
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double want = c.params[j] - c.params[i];
      const double err = std::abs(space.tau(c.points[i], c.points[j]) - want);
      if (!(want > 0.0) || !space.chronological(c.points[i], c.points[j])) {
        out.ok = false;
        out.worst = std::max(out.worst, std::isfinite(err) ? err : 1e300);
        out.i = i;
        out.j = j;
        continue;
      }
      if (err > out.worst) {
        out.worst = err;
        out.i = i;
        out.j = j;
      }
      if (err > tol.geo_at(want)) out.ok = false;
    }
  }
  return out;
}

/// A line or ray sampled on the uniform grid t_k = t0 + k * step.
enum class LineKind { Line, FutureRay, PastRay };

inline const char* to_string(LineKind k) noexcept {
  switch (k) {
    case LineKind::Line: return "line";
    case LineKind::FutureRay: return "future-ray";
    case LineKind::PastRay: return "past-ray";
  }
  return "line";
}

struct LineSample {
  double step = 1.0;
  double t0 = 0.0;
  std::vector<std::size_t> points;
  LineKind kind = LineKind::Line;
  std::string label;

  double param(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * step; }
  std::size_t size() const noexcept { return points.size(); }
};

inline bool operator==(const LineSample& a, const LineSample& b) {
  return a.step == b.step && a.t0 == b.t0 && a.points == b.points && a.kind == b.kind && a.label == b.label;
}

/// The line's grid as a chain (parameters t0 + k * step).
inline Chain as_chain(const LineSample& l) {
  Chain c;
  c.points = l.points;
  for (std::size_t k = 0; k < l.size(); ++k) c.params.push_back(l.param(k));
  return c;
}

/// A finite metric space given by its distance matrix, with optional
/// midpoint witnesses (i, j) -> m.
struct MetricSampleIn {
  std::size_t m = 0;
  std::vector<double> dist;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoints;
  std::vector<std::string> labels;

  double d(std::size_t i, std::size_t j) const { return dist[i * m + j]; }
};

inline bool operator==(const MetricSampleIn& a, const MetricSampleIn& b) {
  return a.m == b.m && a.dist == b.dist && a.midpoints == b.midpoints && a.labels == b.labels;
}

/// Throws ShapeError/DomainError unless dist is a metric (triangle inequality
/// within tol) and every midpoint index is in range.
inline void validate(const MetricSampleIn& b, double tol = 1e-12) {
  if (b.dist.size() != b.m * b.m) throw ShapeError("base distance matrix must be m x m");
  if (!b.labels.empty() && b.labels.size() != b.m) throw ShapeError("base labels size mismatch");
  for (std::size_t i = 0; i < b.m; ++i) {
    for (std::size_t j = 0; j < b.m; ++j) {
      const double v = b.d(i, j);
      if (!std::isfinite(v) || v < 0.0) throw DomainError("base distances must be finite and nonnegative");
      if ((i == j) != (v == 0.0)) throw DomainError("base distance is zero exactly on the diagonal");
      if (std::abs(v - b.d(j, i)) > tol) throw DomainError("base distance must be symmetric");
      for (std::size_t k = 0; k < b.m; ++k)
        if (b.d(i, k) > v + b.d(j, k) + tol * (1.0 + v)) throw DomainError("base violates the triangle inequality");
    }
  }
  for (const auto& [pair, mid] : b.midpoints)
    if (pair.first >= b.m || pair.second >= b.m || mid >= b.m) throw ShapeError("midpoint index out of range");
}

// ─── axioms ─────────────────────────────────────────────────────────────────

struct AxiomViolation {
  std::string kind;
  std::vector<std::size_t> witness;
  double amount = 0.0;
};

struct AxiomReport {
  std::vector<AxiomViolation> violations;
  std::map<std::string, std::size_t> counts;
  bool truncated = false;

  bool ok() const noexcept { return counts.empty(); }

  void add(std::string kind, std::vector<std::size_t> w, double amount, std::size_t cap) {
    ++counts[kind];
    if (violations.size() < cap) {
      violations.push_back({std::move(kind), std::move(w), amount});
    } else {
      truncated = true;
    }
  }
};

/// Checks every pre-length space invariant by brute force over pairs and
/// ordered triples. All violations are counted; witnesses are kept up to
/// `witness_cap`.
inline AxiomReport validate_axioms(const SampledSpace& s, const Tolerances& tol = {}, std::size_t witness_cap = 1000) {
  AxiomReport r;
  const std::size_t n = s.size();
  if (s.has_metric() && s.metric_data().size() != n * n) throw ShapeError("metric size mismatch");
  if (!s.labels.empty() && s.labels.size() != n) throw ShapeError("labels size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (s.tau(i, i) != 0.0) r.add("tau-diagonal", {i}, s.tau(i, i), witness_cap);
    if (!s.causal(i, i)) r.add("causal-reflexive", {i}, 0.0, witness_cap);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = s.tau(i, j);
      if (!std::isfinite(t) || t < 0.0) r.add("tau-nonnegative", {i, j}, t, witness_cap);
      if (t > 0.0 && !s.causal(i, j)) r.add("chronological-implies-causal", {i, j}, t, witness_cap);
      if (i < j && t > 0.0 && s.tau(j, i) > 0.0) r.add("chronology-antisymmetric", {i, j}, t, witness_cap);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !s.causal(i, j)) continue;
      const double tij = s.tau(i, j);
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j || !s.causal(j, k)) continue;
        const double tjk = s.tau(j, k);
        const double tik = s.tau(i, k);
        if (!s.causal(i, k)) r.add("causal-transitive", {i, j, k}, 0.0, witness_cap);
        if (i == k) continue;
        const double gap = tij + tjk - tik;
        if (gap > tol.tau_at(tik)) r.add("reverse-triangle", {i, j, k}, gap, witness_cap);
        if ((tjk > 0.0 || tij > 0.0) && !(tik > 0.0)) r.add("push-up", {i, j, k}, 0.0, witness_cap);
      }
    }
  }
  return r;
}

}  // namespace lps
