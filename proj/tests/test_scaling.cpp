#include <gtest/gtest.h>

#include <tasep/scaling.hpp>

using namespace tasep;

TEST(Scaling, DensityExamples) {
  auto a = densities_for_drifts({0.0}, 1000);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  auto b = densities_for_drifts({-1.0, 1.0}, 1000);
  EXPECT_NEAR(b[0], 0.45, 1e-12);
  EXPECT_NEAR(b[1], 0.1, 1e-12);
  EXPECT_THROW(densities_for_drifts({1.0, 0.5}, 1000), std::invalid_argument);
  EXPECT_THROW(densities_for_drifts({0.0, 20.0}, 1000), std::invalid_argument);
}

TEST(Scaling, HalfWidth) {
  EXPECT_EQ((ScalingParams{1000, {0.0}, 1}.half_width()), 200);
  EXPECT_EQ((ScalingParams{1000, {0.0}, 0.5}.half_width()), 100);
}

TEST(Scaling, HnFromBitsShape) {
  std::uint64_t N = 1000;
  auto ones = BinarySeq::ones(Window(-200, 199));
  auto h = h_n_from_bits(ones, N, 1);
  EXPECT_NEAR(h.x_lo(), -1, 1e-12);
  EXPECT_NEAR(h.x_hi(), 1, 1e-12);
  EXPECT_EQ(h(0), 0);
  for (double x : {-1.0, -0.3, 0.25, 1.0}) EXPECT_NEAR(h(x), 2 * x * 10, 1e-9);
  auto zeros = BinarySeq::zeros(Window(-200, 199));
  EXPECT_NEAR(h_n_from_bits(zeros, N, 1)(0.5), -10, 1e-9);
  EXPECT_THROW(h_n_from_bits(BinarySeq::ones(Window(-199, 199)), N, 1), std::invalid_argument);
}

TEST(Scaling, ReflectionCommutes) {
  Rng rng = make_rng(11);
  auto x = bernoulli_seq(Window(-200, 199), 0.5, rng);
  auto lhs = h_n_from_bits(reflect(x), 1000, 1);
  auto rhs = reflect(h_n_from_bits(x, 1000, 1));
  ASSERT_EQ(lhs.size(), rhs.size());
  for (std::size_t k = 0; k < lhs.size(); ++k) EXPECT_NEAR(lhs.value(k), rhs.value(k), 1e-12);
}

TEST(Scaling, LinesAreOrderedIncrements) {
  // Indicators are nested, so increments of line j dominate those of line j-1.
  ScalingParams p{1000, {-1.0, 0.0, 1.5}, 1};
  Rng rng = make_rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    auto lines = h_n_lines_from_fm(p, rng);
    ASSERT_EQ(lines.size(), 3u);
    for (std::size_t j = 1; j < 3; ++j) {
      for (std::size_t k = 0; k + 1 < lines[j].size(); ++k) {
        double dj = lines[j].value(k + 1) - lines[j].value(k);
        double di = lines[j - 1].value(k + 1) - lines[j - 1].value(k);
        EXPECT_GE(dj, di - 1e-12);
      }
    }
  }
}

TEST(Scaling, MarginalMeansAndVariance) {
  ScalingParams p{1000, {0.0, 1.0}, 1};
  Rng rng = make_rng(13);
  const int reps = 2000;
  double s0 = 0, s1 = 0, q1 = 0;
  for (int r = 0; r < reps; ++r) {
    auto lines = h_n_lines_from_fm(p, rng);
    s0 += lines[0](1);
    s1 += lines[1](1);
    q1 += lines[1](1) * lines[1](1);
  }
  double m1 = s1 / reps;
  EXPECT_NEAR(s0 / reps, 0, 0.15);
  EXPECT_NEAR(m1, 2, 0.15);
  EXPECT_NEAR(q1 / reps - m1 * m1, 2, 0.3);
}

TEST(Scaling, JumpCountSingleDriftIsZero) {
  EXPECT_EQ(jump_count_finite_N(ScalingParams{1000, {0.5}, 1}, 1), 0u);
  EXPECT_EQ(expected_jump_count_finite_N(ScalingParams{1000, {0.5}, 1}), 0.0);
}

TEST(Scaling, UnusedServiceProbabilityLimits) {
  EXPECT_DOUBLE_EQ(unused_service_probability(0.3, 0.2, 0), 0.0);
  // One slot: P(q = 0, no arrival, service) = gamma (1 - alpha) (alpha + beta).
  double g = burke_gamma(0.3, 0.2);
  EXPECT_NEAR(unused_service_probability(0.3, 0.2, 1), g * 0.7 * 0.5, 1e-12);
  EXPECT_NEAR(unused_service_probability(0.3, 0.2, 5000), 1.0, 1e-9);
  double prev = 0;
  for (std::size_t n : {1u, 2u, 5u, 20u, 100u}) {
    double p = unused_service_probability(0.3, 0.05, n);
    EXPECT_GT(p, prev);
    prev = p;
  }
}

TEST(Scaling, JumpCountOracleMatchesSimulation) {
  ScalingParams p{1000, {0.0, 1.0, 2.0}, 1};
  double expect = expected_jump_count_finite_N(p);
  Rng rng = make_rng(14);
  const int reps = 3000;
  double s = 0, q = 0;
  for (int r = 0; r < reps; ++r) {
    double c = static_cast<double>(jump_count_finite_N(p, rng));
    s += c;
    q += c * c;
  }
  double m = s / reps, se = std::sqrt((q / reps - m * m) / reps);
  EXPECT_NEAR(m, expect, 4 * se + 1e-3);
}
