#include <gtest/gtest.h>

#include <tasep/random.hpp>
#include <tasep/seqcore.hpp>

using namespace tasep;

namespace {

BinarySeq random_bits(Rng& rng, Index lo, std::size_t n, double p = 0.5) {
  std::vector<std::uint8_t> b(n);
  for (auto& x : b) x = bernoulli(rng, p);
  return BinarySeq(lo, std::move(b));
}

PathFn random_path(Rng& rng, double lo, double step, std::size_t n) {
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng);
  return PathFn(lo, step, std::move(v));
}

}  // namespace

TEST(BinarySeq, WindowAndValidation) {
  auto x = BinarySeq::from_string("101100", 1);
  EXPECT_EQ(x.lo(), 1);
  EXPECT_EQ(x.hi(), 6);
  EXPECT_EQ(x.size(), 6u);
  EXPECT_EQ(x.at(3), 1);
  EXPECT_THROW(x.at(0), std::out_of_range);
  EXPECT_THROW(BinarySeq(0, {}), std::invalid_argument);
  EXPECT_THROW(BinarySeq(0, {2}), std::invalid_argument);
  EXPECT_THROW(Window(3, 2), std::invalid_argument);
}

TEST(MultiClassSeq, Validation) {
  EXPECT_NO_THROW(MultiClassSeq(0, {1, 3, kHole, 2}, 3));
  EXPECT_THROW(MultiClassSeq(0, {1, 4}, 3), std::invalid_argument);
  EXPECT_THROW(MultiClassSeq(0, {0}, 3), std::invalid_argument);
}

TEST(Count, Examples) {
  auto x = BinarySeq::from_string("101100", 1);
  EXPECT_EQ(count(x, 1, 6), 3u);
  EXPECT_EQ(count(x, 4, 3), 0u);
  EXPECT_EQ(count(BinarySeq::zeros(Window(-5, 5)), -3, 4), 0u);
  EXPECT_THROW(count(x, 0, 3), std::out_of_range);
  EXPECT_THROW(count(x, 2, 7), std::out_of_range);
}

TEST(Count, Additive) {
  Rng rng = make_rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    auto x = random_bits(rng, -10, 30);
    std::uniform_int_distribution<Index> pick(-10, 19);
    Index i = pick(rng), j = pick(rng), k = pick(rng);
    std::array<Index, 3> v{i, j, k};
    std::sort(v.begin(), v.end());
    if (v[1] == v[2]) continue;
    EXPECT_EQ(count(x, v[0], v[2]), count(x, v[0], v[1]) + count(x, v[1] + 1, v[2]));
  }
}

TEST(HeightMap, Examples) {
  auto ones = BinarySeq::ones(Window(-3, 3));
  auto p = height_map(ones);
  EXPECT_EQ(p.x_lo(), -3);
  EXPECT_EQ(p.x_hi(), 4);
  for (int i = -3; i <= 4; ++i) EXPECT_EQ(p(i), i);

  auto q = height_map(BinarySeq::from_string("10", 0));
  EXPECT_EQ(q(0), 0);
  EXPECT_EQ(q(1), 1);
  EXPECT_EQ(q(2), 0);
  EXPECT_DOUBLE_EQ(q(0.5), 0.5);

  auto r = height_map(BinarySeq::from_string("01", -1));
  EXPECT_EQ(r(-1), 1);

  EXPECT_THROW(height_map(BinarySeq::from_string("1", 1)), std::invalid_argument);
}

TEST(HeightMap, UnitIncrements) {
  Rng rng = make_rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    auto x = random_bits(rng, -20, 45);
    auto p = height_map(x);
    EXPECT_EQ(p(0), 0);
    for (Index i = -20; i <= 24; ++i) {
      EXPECT_EQ(p(static_cast<double>(i + 1)) - p(static_cast<double>(i)), 2.0 * x[i] - 1);
    }
  }
}

TEST(IndicatorLeq, Examples) {
  MultiClassSeq v(0, {1, 3, kHole, 2}, 3);
  EXPECT_EQ(indicator_leq(v, 2).to_string(), "1001");
  EXPECT_EQ(indicator_leq(MultiClassSeq(0, {1, 3, 2}, 3), 3).to_string(), "111");
  EXPECT_EQ(indicator_leq(MultiClassSeq(0, {kHole, kHole}, 3), 3).to_string(), "00");
  EXPECT_THROW(indicator_leq(v, 0), std::out_of_range);
  EXPECT_THROW(indicator_leq(v, 4), std::out_of_range);
}

TEST(IndicatorLeq, MonotoneInK) {
  Rng rng = make_rng(3);
  std::uniform_int_distribution<Label> lab(1, 6);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Label> l(40);
    for (auto& x : l) x = lab(rng) == 6 ? kHole : lab(rng) % 5 + 1;
    MultiClassSeq v(-7, l, 5);
    for (Label k = 1; k < 5; ++k) {
      auto a = indicator_leq(v, k), b = indicator_leq(v, k + 1);
      for (Index i = v.lo(); i <= v.hi(); ++i) EXPECT_LE(a[i], b[i]);
    }
  }
}

TEST(Reflect, Sequences) {
  auto x = BinarySeq::from_string("110", 0);
  auto r = reflect(x);
  EXPECT_EQ(r.lo(), -3);
  EXPECT_EQ(r.hi(), -1);
  EXPECT_EQ(r.to_string(), "011");
  EXPECT_EQ(reflect(r), x);

  MultiClassSeq v(2, {1, kHole, 3}, 3);
  auto rv = reflect(v);
  EXPECT_EQ(rv.lo(), -5);
  EXPECT_EQ(rv[-5], 3u);
  EXPECT_EQ(rv[-3], 1u);
  EXPECT_EQ(reflect(rv), v);
}

TEST(Reflect, Paths) {
  PathFn id(-2, 0.5, {-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2});
  EXPECT_EQ(reflect(id), id);
  Rng rng = make_rng(4);
  auto f = random_path(rng, -1.25, 0.25, 17);
  auto g = reflect(f);
  EXPECT_EQ(reflect(g), f);
  for (double x : {-2.75, -1.1, 0.0, 0.4, 1.25}) EXPECT_NEAR(g(x), -f(-x), 1e-12);
}

TEST(Reflect, CommutesWithHeightMap) {
  // The height map of the mirrored sequence is the mirrored height map.
  Rng rng = make_rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    auto x = random_bits(rng, -12, 30);
    auto lhs = height_map(reflect(x));
    auto rhs = reflect(height_map(x));
    ASSERT_EQ(lhs, rhs);
  }
}

TEST(PathFn, GridValidation) {
  EXPECT_NO_THROW(PathFn(0, 1, 0.25, {0, 0, 0, 0, 0}));
  EXPECT_THROW(PathFn(0, 1, 0.3, {0, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(PathFn(0, 1, 0.25, {0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(PathFn(0, -1.0, {0, 0}), std::invalid_argument);
  PathFn f(0, 1, {0, 2});
  EXPECT_DOUBLE_EQ(f(0.25), 0.5);
  EXPECT_THROW(f(1.5), std::out_of_range);
}

TEST(MetricDn, Examples) {
  PathFn f(-2, 1, {-2, -1, 0, 1, 2});
  PathFn g(-2, 1, {0, 0, 0, 0, 0});
  EXPECT_EQ(metric_dn(f, f, 2), 0);
  EXPECT_EQ(metric_dn(f, g, 2), 2);
  EXPECT_EQ(metric_dn(f, g, 1.5), 1.5);
  EXPECT_THROW(metric_dn(f, g, 3), std::invalid_argument);
}

TEST(MetricDn, MismatchedGridsUseMergedNodes) {
  // The kink of f at 0.3 is not a node of g; the sup is attained there.
  PathFn f(-1, 0.1, {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0});
  PathFn g(-1, 0.5, {0, 0, 0, 0, 0});
  EXPECT_NEAR(metric_dn(f, g, 1), 1.0, 1e-12);
}

TEST(MetricDn, Pseudometric) {
  Rng rng = make_rng(6);
  for (int rep = 0; rep < 100; ++rep) {
    auto f = random_path(rng, -3, 0.25, 25);
    auto g = random_path(rng, -3.5, 0.5, 15);
    auto h = random_path(rng, -4, 0.125, 65);
    double n = 2.5;
    EXPECT_GE(metric_dn(f, g, n), 0);
    EXPECT_DOUBLE_EQ(metric_dn(f, g, n), metric_dn(g, f, n));
    EXPECT_LE(metric_dn(f, h, n), metric_dn(f, g, n) + metric_dn(g, h, n) + 1e-12);
  }
}

TEST(Random, DerivedSeedsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(1, "burke", 3), derive_seed(1, "burke", 3));
  EXPECT_NE(derive_seed(1, "burke", 3), derive_seed(1, "burke", 4));
  EXPECT_NE(derive_seed(1, "burke", 3), derive_seed(1, "fdd", 3));
  EXPECT_NE(derive_seed(1, "burke", 3), derive_seed(2, "burke", 3));
  Rng a = make_rng(9), b = make_rng(9);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}
