#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lps/space.hpp"
#include "lps/splitting.hpp"

using namespace lps;

namespace {

double ceil_to(double d, double h) { return std::ceil(d / h - 1e-9) * h; }

// m points in the unit square, pairwise distinct.
MetricSampleIn random_plane_base(std::mt19937_64& rng, std::size_t m, double scale) {
  std::uniform_real_distribution<double> U(0.0, scale);
  std::vector<std::array<double, 2>> p;
  while (p.size() < m) {
    std::array<double, 2> q{U(rng), U(rng)};
    bool far = true;
    for (const auto& r : p) far = far && std::hypot(q[0] - r[0], q[1] - r[1]) > 0.05;
    if (far) p.push_back(q);
  }
  MetricSampleIn b;
  b.m = m;
  b.dist.resize(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) b.dist[i * m + j] = std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
  return b;
}

}  // namespace

// ─── products ───────────────────────────────────────────────────────────────

TEST(BuildProduct, SinglePointIsAChain) {
  const auto P = build_product(base_point(), TimeGrid{0.0, 1.0, 3});
  ASSERT_EQ(P.space.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(P.space.tau(i, j), j > i ? static_cast<double>(j - i) : 0.0);
      EXPECT_EQ(P.space.causal(i, j), j >= i);
    }
  ASSERT_EQ(P.lines.size(), 1u);
  EXPECT_EQ(P.lines[0].points, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(BuildProduct, ClosedFormSeparations) {
  const auto pair = build_product(base_pair(1.0), TimeGrid{0.0, 1.0, 3});
  EXPECT_DOUBLE_EQ(pair.space.tau(pair.index(0, 0), pair.index(1, 2)), std::sqrt(3.0));
  EXPECT_FALSE(pair.space.causal(pair.index(0, 0), pair.index(1, 0)));
  EXPECT_TRUE(pair.space.causal(pair.index(0, 0), pair.index(1, 1)));
  EXPECT_EQ(pair.space.tau(pair.index(0, 0), pair.index(1, 1)), 0.0);

  const auto tri = build_product(base_tripod(1.0), TimeGrid{0.0, 1.0, 4});
  EXPECT_DOUBLE_EQ(tri.space.tau(tri.index(1, 0), tri.index(2, 3)), std::sqrt(5.0));
  EXPECT_EQ(tri.space.labels[tri.index(2, 3)], "leaf2@3");
}

TEST(BuildProduct, Errors) {
  EXPECT_THROW(build_product(base_pair(), TimeGrid{0.0, 1.0, 0}), ShapeError);
  MetricSampleIn bad = base_pair();
  bad.dist[1] = 2.0;  // asymmetric
  EXPECT_THROW(build_product(bad, TimeGrid{0.0, 1.0, 2}), DomainError);
  EXPECT_THROW(TimeGrid::window(0.0, 1.0, 0.0), DomainError);
}

TEST(BaseGenerators, ValidWithExactMidpoints) {
  const std::vector<MetricSampleIn> bases{base_point(),          base_pair(1.5),         base_tripod(1.0, 2),
                                          base_segment(2.0, 4),  base_euclid_grid(4, 1), base_hyperbolic_sample(),
                                          base_sphere_sample()};
  for (const auto& b : bases) {
    EXPECT_NO_THROW(validate(b));
    for (const auto& [yz, mid] : b.midpoints) {
      const double d = b.d(yz.first, yz.second);
      EXPECT_NEAR(b.d(yz.first, mid), d / 2, 1e-12);
      EXPECT_NEAR(b.d(mid, yz.second), d / 2, 1e-12);
    }
  }
  // Tripod: the center is the midpoint of any two leaves.
  const auto t = base_tripod(1.0);
  EXPECT_EQ(t.midpoints.at({1, 2}), 0u);
  EXPECT_EQ(base_euclid_grid(4, 1).midpoints.at({0, 10}), 5u);
}

// Generator soundness: push-up and the reverse triangle inequality hold.
TEST(BuildProduct, GeneratorSoundnessProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> M(1, 4), N(2, 6);
  std::uniform_real_distribution<double> H(0.2, 1.0);
  for (int iter = 0; iter < 40; ++iter) {
    const auto base = random_plane_base(rng, M(rng), 3.0);
    const auto P = build_product(base, TimeGrid{-1.0, H(rng), N(rng)});
    const auto r = validate_axioms(P.space);
    ASSERT_TRUE(r.ok()) << "iteration " << iter << ": " << r.violations.front().kind;
  }
  for (const auto& b : {base_tripod(1.0, 1), base_sphere_sample(), base_hyperbolic_sample(4)}) {
    const auto P = build_product(b, TimeGrid::window(0.0, 2.0, 0.5));
    EXPECT_TRUE(validate_axioms(P.space).ok());
  }
}

// ─── line classes ───────────────────────────────────────────────────────────

TEST(LineClasses, ProductCanonicalLines) {
  const auto P = build_product(base_tripod(1.0), TimeGrid::window(-4.0, 4.0, 0.5));
  const auto lc = extract_line_classes(P.space, P.lines);
  ASSERT_EQ(lc.classes.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(lc.class_of[k], k);
    EXPECT_EQ(lc.classes[k].shift, 0.0);
    EXPECT_NEAR(lc.classes[k].c0, P.base.d(0, k), 1e-9);
  }
}

TEST(LineClasses, ShiftedDuplicateIsMerged) {
  const auto P = build_product(base_pair(1.0), TimeGrid::window(-4.0, 4.0, 0.5));
  auto lines = P.lines;
  auto dup = lines[1];
  dup.t0 -= 1.0;  // dup(t) = line(t + 2h)
  dup.label = "dup";
  lines.push_back(dup);
  const auto lc = extract_line_classes(P.space, lines);
  ASSERT_EQ(lc.classes.size(), 2u);
  EXPECT_EQ(lc.class_of[2], 1u);
  EXPECT_EQ(lc.classes[1].members, (std::vector<std::size_t>{1, 2}));
  EXPECT_DOUBLE_EQ(lc.classes[1].member_shift[1], 1.0);
  // A partial copy is merged too, and the longer line stays representative.
  lines.push_back(slice(lines[0], 3, 10));
  const auto lc2 = extract_line_classes(P.space, lines);
  EXPECT_EQ(lc2.classes[0].source, 0u);
  EXPECT_EQ(lc2.class_of[3], 0u);
}

TEST(LineClasses, ShiftedReferenceIsResynchronised) {
  const auto P = build_product(base_pair(1.0), TimeGrid::window(-4.0, 4.0, 0.5));
  auto lines = P.lines;
  lines[1].t0 += 1.5;  // no longer synchronised with line 0
  const auto lc = extract_line_classes(P.space, lines);
  EXPECT_NEAR(lc.classes[1].shift, -1.5, 1e-9);
  EXPECT_DOUBLE_EQ(lc.classes[1].line.t0, P.lines[1].t0);
  EXPECT_NEAR(lc.classes[1].c0, 1.0, 1e-9);
}

TEST(LineClasses, KinkedPseudoLine) {
  const auto P = build_product(base_pair(1.0), TimeGrid::window(0.0, 4.0, 0.5));
  auto lines = P.lines;
  LineSample kink = P.lines[0];
  for (std::size_t k = 5; k < kink.size(); ++k) kink.points[k] = P.lines[1].points[k];
  kink.label = "kink";
  lines.push_back(kink);
  try {
    extract_line_classes(P.space, lines);
    FAIL() << "expected NotParallel";
  } catch (const NotParallel& e) {
    EXPECT_NE(std::string(e.what()).find("kink"), std::string::npos);
  }
}

TEST(LineClasses, Errors) {
  const auto P = build_product(base_pair(1.0), TimeGrid::window(0.0, 4.0, 0.5));
  EXPECT_THROW(extract_line_classes(P.space, {}), ShapeError);
  EXPECT_THROW(extract_line_classes(P.space, P.lines, 5), ShapeError);
  auto lines = P.lines;
  lines[1].step = 0.25;
  EXPECT_THROW(extract_line_classes(P.space, lines), ShapeError);
}

// ─── dS ─────────────────────────────────────────────────────────────────────

TEST(ComputeDS, PairBothFormulas) {
  const auto P = build_product(base_pair(1.0), TimeGrid::window(-8.0, 8.0, 0.25));
  const auto B = compute_dS(P.space, extract_line_classes(P.space, P.lines));
  EXPECT_EQ(B.d(0, 1), 1.0);
  EXPECT_EQ(B.d(1, 0), 1.0);
  EXPECT_EQ(B.alt[1], 1.0);
  EXPECT_EQ(B.witness[1][0], 1.0);   // t
  EXPECT_EQ(B.witness[1][1], -1.0);  // s
  EXPECT_EQ(B.d(0, 0), 0.0);
  EXPECT_EQ(B.d(1, 1), 0.0);
  EXPECT_EQ(B.exhausted_count(), 0u);
  EXPECT_NEAR(B.fit[1], 1.0, 1e-9);
}

TEST(ComputeDS, TripodGroundTruth) {
  const auto P = build_product(base_tripod(1.0), TimeGrid::window(-8.0, 8.0, 0.25));
  const auto B = compute_dS(P.space, extract_line_classes(P.space, P.lines), {}, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(B.d(i, j), P.base.d(i, j));
      EXPECT_EQ(B.alt[i * 4 + j], P.base.d(i, j));
    }
}

// Irrational distances: both formulas give the grid ceiling.
TEST(ComputeDS, EuclidGridIsGridCeiling) {
  const double h = 0.25;
  const auto P = build_product(base_euclid_grid(4, 1.0), TimeGrid::window(-8.0, 8.0, h));
  const auto B = compute_dS(P.space, extract_line_classes(P.space, P.lines), {}, 4);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) {
      EXPECT_DOUBLE_EQ(B.d(i, j), ceil_to(P.base.d(i, j), h));
      EXPECT_LE(B.d(i, j) - P.base.d(i, j), h);
      EXPECT_NEAR(B.fit[i * 16 + j], P.base.d(i, j), 1e-6);
    }
  EXPECT_LE(B.max_formula_gap(), h);
  EXPECT_LE(B.max_asymmetry(), h);
}

TEST(ComputeDS, ExhaustedWindowIsFlagged) {
  const auto P = build_product(base_pair(3.0), TimeGrid::window(0.0, 4.0, 1.0));
  LineClasses lc;
  lc.step = 1.0;
  for (const auto& l : P.lines) {
    LineClass c;
    c.line = l;
    lc.classes.push_back(c);
  }
  const auto B = compute_dS(P.space, lc);
  EXPECT_TRUE(std::isinf(B.d(0, 1)));
  EXPECT_EQ(B.exhausted[1], 1);
  EXPECT_EQ(B.exhausted_count(), 2u);
  EXPECT_EQ(B.d(0, 0), 0.0);
  // The alternative formula still sees the late pairs.
  EXPECT_EQ(B.alt[1], 3.0);
}

// ─── CAT(0) ─────────────────────────────────────────────────────────────────

TEST(Cat0, SingleTripleMargins) {
  // Euclidean median of an equilateral triangle with side 2.
  EXPECT_NEAR(cat0_margin(2, 2, 2, std::sqrt(3.0)), 0.0, 1e-12);
  // Tripod leaves, midpoint of two leaves is the center at distance 1.
  EXPECT_EQ(cat0_margin(2, 2, 2, 1), 2.0);
  EXPECT_EQ(cat0_margin(1.7, 1.7, 0, 1.7), 0.0);
}

TEST(Cat0, EquilateralWithMidpoint) {
  // x, y, z equilateral with side 2 and m the midpoint of y z.
  const std::vector<std::array<double, 2>> p{{0, std::sqrt(3.0)}, {-1, 0}, {1, 0}, {0, 0}};
  std::vector<double> d(16);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) d[i * 4 + j] = std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
  const auto r = verify_cat0(4, d, {{{1, 2}, 3}});
  EXPECT_EQ(r.triples_checked, 4u);
  EXPECT_EQ(r.midpoint_missing, 5u * 4u);
  EXPECT_NEAR(r.worst_margin, 0.0, 1e-12);
  EXPECT_TRUE(r.ok());
}

TEST(Cat0, TreesAndSpheres) {
  const auto t = base_tripod(1.0);
  const auto rt = verify_cat0(t.m, t.dist, t.midpoints);
  EXPECT_TRUE(rt.ok());
  EXPECT_EQ(rt.midpoint_missing, 3u * 4u);  // leaf-center pairs have no sampled midpoint
  EXPECT_EQ(rt.worst_margin, 0.0);           // x on the segment itself

  const auto s = base_sphere_sample();
  const auto rs = verify_cat0(s.m, s.dist, s.midpoints);
  EXPECT_FALSE(rs.ok());
  // Pole over the equatorial quarter arc: 2 (pi/2)^2 / 2 - (pi/2)^2 / 4 - (pi/2)^2.
  EXPECT_NEAR(rs.worst_margin, -std::numbers::pi * std::numbers::pi / 16, 1e-12);
  EXPECT_EQ(rs.witness[0], 3u);
}

TEST(Cat0, MetricAxiomFailures) {
  std::vector<double> d{0, 1, 3, 1, 0, 1, 3, 1, 0};
  const auto r = verify_cat0(3, d, {});
  EXPECT_DOUBLE_EQ(r.max_triangle_excess, 1.0);
  EXPECT_FALSE(r.ok());
  d[1] = 1.5;
  EXPECT_DOUBLE_EQ(verify_cat0(3, d, {}).max_asymmetry, 0.5);
  EXPECT_THROW(verify_cat0(2, d, {}), ShapeError);
}

// ─── embedding ──────────────────────────────────────────────────────────────

TEST(Embedding, ExactProduct) {
  const auto P = build_product(base_tripod(1.0), TimeGrid::window(-4.0, 4.0, 0.5));
  const auto lc = extract_line_classes(P.space, P.lines);
  const auto B = compute_dS(P.space, lc);
  const auto E = verify_embedding(P.space, lc, B);
  EXPECT_LE(E.max_tau_error, 1e-12);
  EXPECT_EQ(E.causal_agreement(), 1.0);
  EXPECT_EQ(E.pairs, 16u * 17u * 17u);
}

// Residual against an oracle that knows the exact base distances.
TEST(Embedding, QuantizedDistances) {
  const double h = 0.25;
  const auto P = build_product(base_euclid_grid(3, 1.0), TimeGrid::window(-4.0, 4.0, h));
  const auto lc = extract_line_classes(P.space, P.lines);
  const auto B = compute_dS(P.space, lc);
  const auto E = verify_embedding(P.space, lc, B);
  double oracle = 0.0;
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      const double d = P.base.d(i, j), q = ceil_to(d, h);
      for (int k = -32; k <= 32; ++k) {
        const double dt = k * h;
        const double exact = dt >= d ? std::sqrt(dt * dt - d * d) : 0.0;
        const double model = dt > q ? std::sqrt(dt * dt - q * q) : 0.0;
        oracle = std::max(oracle, std::abs(exact - model));
      }
    }
  EXPECT_NEAR(E.max_tau_error, oracle, 1e-12);
  EXPECT_GT(E.max_tau_error, h);  // d = sqrt 8 against 3 at dt = 3
  EXPECT_EQ(E.causal_agreement(), 1.0);
  // With the exact spacelike distances from the synchronised fit the product is recovered.
  auto exact = B;
  exact.dS = B.fit;
  EXPECT_LE(verify_embedding(P.space, lc, exact).max_tau_error, 1e-6);
}

TEST(Embedding, ResidualsAreSymmetric) {
  const auto P = build_product(base_euclid_grid(2, 1.0), TimeGrid::window(-3.0, 3.0, 0.25));
  const auto lc = extract_line_classes(P.space, P.lines);
  const auto E = verify_embedding(P.space, lc, compute_dS(P.space, lc), 0.1, 2);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) EXPECT_NEAR(E.pair_error[a * 4 + b], E.pair_error[b * 4 + a], 1e-12);
}

TEST(Embedding, WrongMetricBreaksCausality) {
  const auto P = build_product(base_pair(1.0), TimeGrid::window(-2.0, 2.0, 0.5));
  const auto lc = extract_line_classes(P.space, P.lines);
  auto B = compute_dS(P.space, lc);
  B.dS[1] = B.dS[2] = 0.5;
  const auto E = verify_embedding(P.space, lc, B);
  EXPECT_LT(E.causal_agreement(), 1.0);
  EXPECT_FALSE(P.space.causal(E.causal_witness[0], E.causal_witness[1]));
  EXPECT_THROW(verify_embedding(P.space, lc, B, 0.5), DomainError);
}

// ─── round trip ─────────────────────────────────────────────────────────────

TEST(RoundTrip, PairAndPoint) {
  const auto r = round_trip(base_pair(1.0), TimeGrid::window(-8.0, 8.0, 0.25));
  EXPECT_LE(r.max_deviation, 0.25);
  EXPECT_EQ(r.max_deviation, 0.0);
  const auto p = round_trip(base_point(), TimeGrid::window(-2.0, 2.0, 0.25));
  ASSERT_EQ(p.metric.m, 1u);
  EXPECT_EQ(p.metric.dS, std::vector<double>{0.0});
}

TEST(RoundTrip, EuclidGrid) {
  RoundTripOptions o;
  o.threads = 4;
  const auto r = round_trip(base_euclid_grid(4, 1.0), TimeGrid::window(-8.0, 8.0, 0.25), o);
  EXPECT_LE(r.max_deviation, 0.25);
  EXPECT_GT(r.max_deviation, 0.0);
  EXPECT_LE(r.metric.max_asymmetry(), 0.25);
  EXPECT_LE(r.metric.max_formula_gap(), 0.25);
  EXPECT_EQ(r.embedding.causal_agreement(), 1.0);
  EXPECT_GT(r.cat0.triples_checked, 0u);
}

TEST(RoundTrip, TripodCat0Margins) {
  const auto r = round_trip(base_tripod(1.0, 1), TimeGrid::window(-8.0, 8.0, 0.25));
  EXPECT_EQ(r.max_deviation, 0.0);
  EXPECT_GE(r.cat0.worst_margin, -1e-9);
  EXPECT_TRUE(r.cat0.ok());
  EXPECT_LE(r.embedding.max_tau_error, 1e-12);
}

// The sphere product is still an exact product; the CAT(0) check is what
// rejects its base.
TEST(RoundTrip, SphereBaseIsNotCat0) {
  const auto r = round_trip(base_sphere_sample(), TimeGrid::window(-4.0, 4.0, 0.25));
  EXPECT_LE(r.max_deviation, 0.25);
  EXPECT_FALSE(r.cat0.ok());
  EXPECT_LT(r.cat0.worst_margin, -0.1);
}

TEST(RoundTrip, RandomBasesProperty) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> M(1, 5);
  for (int iter = 0; iter < 25; ++iter) {
    const auto base = random_plane_base(rng, M(rng), 2.0);
    const auto r = round_trip(base, TimeGrid::window(-4.0, 4.0, 0.25));
    EXPECT_LE(r.max_deviation, 0.25) << iter;
    EXPECT_LE(r.metric.max_formula_gap(), 0.25) << iter;
    EXPECT_LE(r.metric.max_asymmetry(), 0.25) << iter;
    EXPECT_EQ(r.embedding.causal_agreement(), 1.0) << iter;
  }
}
