#pragma once

// Tau-maximizing chains: longest paths in the chronological DAG.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "lps/errors.hpp"
#include "lps/parallel.hpp"
#include "lps/space.hpp"

namespace lps {

struct GeodesicOptions {
  /// Edges longer than this (in tau) are not used. With the default every
  /// chronological pair is an edge, so the direct edge always realizes tau.
  double max_step = std::numeric_limits<double>::infinity();
  Tolerances tol{};
};

/// Longest-path tables, one per target point, built on demand. Ties in the
/// total are broken towards more points (the finest sampled chain) and then
/// towards the lexicographically smallest index sequence.
class GeodesicFinder {
 public:
  explicit GeodesicFinder(const SampledSpace& space, GeodesicOptions opts = {})
      : space_(&space), opts_(opts), tables_(space.size()) {}

  const SampledSpace& space() const noexcept { return *space_; }
  const GeodesicOptions& options() const noexcept { return opts_; }

  /// Builds the tables for `targets` up front; afterwards `between` on those
  /// targets is safe to call concurrently.
  void prepare(const std::vector<std::size_t>& targets, unsigned threads = 1) {
    std::vector<std::size_t> todo;
    for (auto y : targets) {
      space_->check(y);
      if (!tables_[y]) todo.push_back(y);
    }
    std::sort(todo.begin(), todo.end());
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
    std::vector<std::unique_ptr<Table>> built(todo.size());
    parallel_for(todo.size(), threads, [&](std::size_t i) { built[i] = std::make_unique<Table>(build(todo[i])); });
    for (std::size_t i = 0; i < todo.size(); ++i) tables_[todo[i]] = std::move(built[i]);
  }

  void prepare_all(unsigned threads = 1) {
    std::vector<std::size_t> all(space_->size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    prepare(all, threads);
  }

  /// Maximal chain from x to y. Throws NotChronological when tau(x,y) = 0
  /// and GeodesicDeficit when no chain obeys max_step.
  Chain between(std::size_t x, std::size_t y) {
    space_->check(y);
    if (!tables_[y]) tables_[y] = std::make_unique<Table>(build(y));
    return extract(x, y, *tables_[y]);
  }

  Chain between(std::size_t x, std::size_t y) const {
    space_->check(y);
    if (!tables_[y]) throw Error("GeodesicFinder: table not prepared for target");
    return extract(x, y, *tables_[y]);
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  struct Table {
    std::vector<double> best;  // -1 where y is unreachable
    std::vector<std::uint32_t> next;
    std::vector<std::uint32_t> count;
  };

  Table build(std::size_t y) const {
    const SampledSpace& s = *space_;
    const std::size_t n = s.size();
    Table t{std::vector<double>(n, -1.0), std::vector<std::uint32_t>(n, kNone), std::vector<std::uint32_t>(n, 0)};

    std::vector<std::size_t> nodes;
    for (std::size_t z = 0; z < n; ++z)
      if (z == y || s.chronological(z, y)) nodes.push_back(z);
    const std::size_t m = nodes.size();
    auto edge = [&](std::size_t a, std::size_t b) {
      const double w = s.tau(nodes[a], nodes[b]);
      return w > 0.0 && w <= opts_.max_step;
    };

    // Kahn's algorithm from the sink: a node is ready once all of its
    // successors inside the past of y are done.
    std::vector<std::uint32_t> outdeg(m, 0);
    std::vector<std::vector<std::uint32_t>> preds(m);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (a != b && edge(a, b)) {
          ++outdeg[a];
          preds[b].push_back(static_cast<std::uint32_t>(a));
        }
      }
    }
    std::vector<std::uint32_t> queue;
    queue.reserve(m);
    for (std::size_t a = 0; a < m; ++a)
      if (outdeg[a] == 0) queue.push_back(static_cast<std::uint32_t>(a));
    std::size_t head = 0;
    while (head < queue.size()) {
      const std::uint32_t w = queue[head++];
      const std::size_t gw = nodes[w];
      if (gw == y) {
        t.best[gw] = 0.0;
        t.count[gw] = 1;
      } else {
        double best = -1.0;
        std::uint32_t next = kNone, count = 0;
        for (std::size_t b = 0; b < m; ++b) {
          if (b == w || !edge(w, b)) continue;
          const std::size_t gb = nodes[b];
          if (t.best[gb] < 0.0) continue;
          const double total = s.tau(gw, gb) + t.best[gb];
          const double tie = 1e-12 * (1.0 + total);
          const std::uint32_t c = t.count[gb] + 1;
          bool take = false;
          if (next == kNone || total > best + tie) {
            take = true;
          } else if (total >= best - tie) {
            take = c > count || (c == count && gb < next);
          }
          if (take) {
            best = total;
            next = static_cast<std::uint32_t>(gb);
            count = c;
          }
        }
        t.best[gw] = best;
        t.next[gw] = next;
        t.count[gw] = count;
      }
      for (auto a : preds[w])
        if (--outdeg[a] == 0) queue.push_back(a);
    }
    if (queue.size() != m) throw ShapeError("chronological relation contains a cycle");
    return t;
  }

  Chain extract(std::size_t x, std::size_t y, const Table& t) const {
    const SampledSpace& s = *space_;
    s.check(x);
    if (!s.chronological(x, y)) throw NotChronological("geodesic_between requires tau(x,y) > 0");
    if (t.best[x] < 0.0) throw GeodesicDeficit("no chain from x to y within max_step");
    std::vector<std::size_t> pts{x};
    while (pts.back() != y) pts.push_back(t.next[pts.back()]);
    Chain c = chain_from_points(s, pts);
    c.deficit = s.tau(x, y) - c.length();
    c.maximal_only = c.deficit > opts_.tol.geo_at(s.tau(x, y));
    return c;
  }

  const SampledSpace* space_;
  GeodesicOptions opts_;
  std::vector<std::unique_ptr<Table>> tables_;
};

inline Chain geodesic_between(const SampledSpace& space, std::size_t x, std::size_t y, GeodesicOptions opts = {}) {
  GeodesicFinder f(space, opts);
  return f.between(x, y);
}

}  // namespace lps
