#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include <tasep/horizon.hpp>
#include <tasep/stats.hpp>

using namespace tasep;

namespace {

PathFn from_fn(const Grid& g, const std::function<double(double)>& fn) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(g.x_lo + g.step * static_cast<double>(k));
  return PathFn(g.x_lo, g.step, std::move(v));
}

const PhiOptions kPlain{false, false};

// P(sup_{x<=1} W - sup_{x<=-1} W <= z) for W with drift 2 mu and variance 4 per unit, written as
// P(S <= M + z) with S the running max over [-1, 1] started at 0 and M ~ Exp(mu) the past sup.
double diff_cdf_oracle(double z, double mu) {
  double m = 2 * mu, T = 2, sd = 2 * std::sqrt(T);
  auto s_cdf = [&](double s) {
    return norm_cdf((s - m * T) / sd) - std::exp(m * s / 2) * norm_cdf((-s - m * T) / sd);
  };
  double hi = 60 / mu, h = hi / 200000, acc = 0;
  for (int i = 0; i <= 200000; ++i) {
    double u = i * h;
    double w = (i == 0 || i == 200000) ? 0.5 : 1;
    acc += w * mu * std::exp(-mu * u) * s_cdf(u + z);
  }
  return acc * h;
}

}  // namespace

TEST(Grid, Validation) {
  EXPECT_NO_THROW((Grid{-1, 1, 0.25}.validate()));
  EXPECT_THROW((Grid{0.5, 1, 0.25}.validate()), std::invalid_argument);
  EXPECT_THROW((Grid{-1, 1, 0.3}.validate()), std::invalid_argument);
  EXPECT_EQ((Grid{-1, 2, 0.25}.size()), 13u);
}

TEST(SampleBm, AnchoredWithDriftAndVariance) {
  Grid g{-2, 2, 1.0 / 64};
  Rng rng = make_rng(21);
  const int reps = 4000;
  double sp = 0, sm = 0, qp = 0, qm = 0;
  for (int r = 0; r < reps; ++r) {
    auto b = sample_bm(BrownianSpec{0.75, g}, rng);
    ASSERT_EQ(b(0), 0);
    sp += b(1), qp += b(1) * b(1);
    sm += b(-2), qm += b(-2) * b(-2);
  }
  double mp = sp / reps, mm = sm / reps;
  EXPECT_NEAR(mp, 1.5, 0.1);
  EXPECT_NEAR(qp / reps - mp * mp, 2, 0.2);
  EXPECT_NEAR(mm, -3, 0.15);
  EXPECT_NEAR(qm / reps - mm * mm, 4, 0.4);
  EXPECT_EQ(sample_bm(BrownianSpec{0, g}, 5), sample_bm(BrownianSpec{0, g}, 5));
}

TEST(Phi, Examples) {
  Grid g{-2, 2, 0.25};
  Rng rng = make_rng(22);
  auto id = from_fn(g, [](double x) { return x; });
  auto neg = from_fn(g, [](double x) { return -x; });
  auto zero = from_fn(g, [](double) { return 0.0; });
  // g - f nondecreasing: the running sup sits at the right end, so Phi(f, g) = g.
  auto a = phi(neg, id, 1, rng, kPlain);
  auto b = phi(zero, id, 1, rng, kPlain);
  // g - f nonincreasing: the sup is pinned at the left edge, so Phi(f, g) = f.
  auto c = phi(zero, neg, 1, rng, kPlain);
  for (std::size_t k = 0; k < g.size(); ++k) {
    double y = g.x_lo + g.step * static_cast<double>(k);
    EXPECT_NEAR(a.value(k), y, 1e-12);
    EXPECT_NEAR(b.value(k), y, 1e-12);
    EXPECT_NEAR(c.value(k), 0, 1e-12);
  }
  // A bump: g - f = -|x + 1| peaks at -1, left of 0.
  auto bump = from_fn(g, [](double x) { return -std::abs(x + 1) + 1; });
  auto d = phi(zero, bump, 1, rng, kPlain);
  for (std::size_t k = 0; k < g.size(); ++k) {
    double y = g.x_lo + g.step * static_cast<double>(k);
    double sup = y <= -1 ? -std::abs(y + 1) + 1 : 1;
    EXPECT_NEAR(d.value(k), sup - 1, 1e-12);
  }
}

TEST(Phi, Validation) {
  Grid g{-1, 1, 0.25};
  auto z = from_fn(g, [](double) { return 0.0; });
  auto off = from_fn(g, [](double x) { return x + 1; });
  auto other = from_fn(Grid{-1, 1, 0.5}, [](double) { return 0.0; });
  EXPECT_THROW(phi(z, z, 0, 1), std::invalid_argument);
  EXPECT_THROW(phi(z, off, 1, 1), std::invalid_argument);
  EXPECT_THROW(phi(z, other, 1, 1), std::invalid_argument);
}

TEST(Phi, DifferenceIsNondecreasingAndVanishesAtZero) {
  Grid g{-3, 3, 1.0 / 32};
  Rng rng = make_rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    auto f = sample_bm(BrownianSpec{0, g}, rng);
    auto h = sample_bm(BrownianSpec{0.5, g}, rng);
    for (const PhiOptions& o : {PhiOptions{}, kPlain}) {
      auto out = phi(f, h, 0.5, rng, o);
      EXPECT_NEAR(out(0), 0, 1e-12);
      for (std::size_t k = 0; k + 1 < out.size(); ++k) {
        EXPECT_LE(out.value(k) - f.value(k), out.value(k + 1) - f.value(k + 1) + 1e-12);
      }
      // Phi - f = M(y) - M(0) with M the running sup, so it has the sign of y.
      for (std::size_t k = 0; k < out.size(); ++k) {
        double d = out.value(k) - f.value(k);
        if (out.x(k) >= 0) EXPECT_GE(d, -1e-12);
        else EXPECT_LE(d, 1e-12);
      }
    }
  }
}

TEST(PhiK, StructureAndMonotoneDifferences) {
  Grid g{-2, 2, 1.0 / 64};
  std::vector<double> mu{-1, 0, 0.5, 2};
  Rng rng = make_rng(24);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<PathFn> fs;
    for (double m : mu) fs.push_back(sample_bm(BrownianSpec{m, g}, rng));
    auto out = phi_k(fs, mu, rng, kPlain);
    ASSERT_EQ(out.size(), 4u);
    EXPECT_EQ(out[0], fs[0]);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        for (std::size_t k = 0; k + 1 < g.size(); ++k) {
          EXPECT_LE(out[j].value(k) - out[i].value(k), out[j].value(k + 1) - out[i].value(k + 1) + 1e-9);
        }
      }
    }
  }
  std::vector<double> bad{0, 0};
  std::vector<PathFn> two{sample_bm(BrownianSpec{0, g}, 1), sample_bm(BrownianSpec{0, g}, 2)};
  EXPECT_THROW(phi_k(two, bad, rng), std::invalid_argument);
}

TEST(SampleSh, ModesAndShape) {
  Grid g{-1, 1, 1.0 / 64};
  std::vector<double> two{0, 1}, three{0, 1, 2};
  auto a = sample_sh(two, g, 31);
  EXPECT_EQ(a.mode, ShMode::exact_pair);
  EXPECT_EQ(a.tail_draws.size(), 1u);
  EXPECT_GT(a.tail_draws[0], 0);
  auto b = sample_sh(three, g, 31);
  EXPECT_EQ(b.mode, ShMode::long_grid);
  EXPECT_EQ(b.left_extension, 32);
  ASSERT_EQ(b.lines.size(), 3u);
  for (const auto& l : b.lines) {
    EXPECT_NEAR(l.x_lo(), -1, 1e-12);
    EXPECT_NEAR(l.x_hi(), 1, 1e-12);
    EXPECT_NEAR(l(0), 0, 1e-12);
  }
  EXPECT_THROW(sample_sh(three, g, 1, ShOptions{ShMode::exact_pair, 0}), std::invalid_argument);
  EXPECT_THROW(sample_sh(std::vector<double>{1, 0}, g, 1), std::invalid_argument);
  EXPECT_EQ(sample_sh(three, g, 7).lines, sample_sh(three, g, 7).lines);
}

TEST(SampleSh, MarginalIsDriftedBrownian) {
  Grid g{-1, 1, 1.0 / 64};
  std::vector<double> mu{-0.5, 1.0};
  Rng rng = make_rng(32);
  const int reps = 3000;
  std::array<double, 2> s{}, q{};
  for (int r = 0; r < reps; ++r) {
    auto sh = sample_sh(mu, g, rng, ShOptions{ShMode::long_grid, 16});
    for (int j = 0; j < 2; ++j) {
      double v = sh.lines[static_cast<std::size_t>(j)](1);
      s[static_cast<std::size_t>(j)] += v;
      q[static_cast<std::size_t>(j)] += v * v;
    }
  }
  for (std::size_t j = 0; j < 2; ++j) {
    double m = s[j] / reps;
    EXPECT_NEAR(m, 2 * mu[j], 0.12);
    EXPECT_NEAR(q[j] / reps - m * m, 2, 0.25);
  }
}

TEST(DiffCdf, Values) {
  EXPECT_NEAR(diff_cdf(0, 1, 1), 0.0567901237, 1e-9);
  EXPECT_NEAR(diff_cdf(1, 1, 0.5), 0.4271095536, 1e-9);
  EXPECT_NEAR(diff_cdf(3, 1, 1e-9), 1, 1e-6);
  EXPECT_NEAR(diff_cdf(200, 1, 1), 1, 1e-12);
  EXPECT_THROW(diff_cdf(-1, 1, 1), std::domain_error);
  EXPECT_THROW(diff_cdf(0, 0, 1), std::domain_error);
  double prev = 0;
  for (double z = 0; z < 30; z += 0.25) {
    double c = diff_cdf(z, 1, 1);
    EXPECT_GE(c, prev - 1e-15);
    prev = c;
  }
  for (double z = 0; z < 40; z += 0.1) {
    double c = diff_cdf(z, 2, 3);
    EXPECT_TRUE(std::isfinite(c));
  }
}

TEST(DiffCdf, MatchesIndependentOracle) {
  for (double mu : {0.25, 0.5, 1.0, 2.0}) {
    for (double z : {0.0, 0.3, 1.0, 2.5, 6.0, 12.0}) {
      EXPECT_NEAR(diff_cdf(z, 1, mu), diff_cdf_oracle(z, mu), 1e-6) << "mu=" << mu << " z=" << z;
    }
  }
}

TEST(DiffCdf, MatchesExactPairSampler) {
  Grid g{-1, 1, 1.0 / 256};
  std::vector<double> mu{0, 1};
  Rng rng = make_rng(33);
  const int reps = 4000;
  std::vector<double> d;
  for (int r = 0; r < reps; ++r) {
    auto sh = sample_sh(mu, g, rng, ShOptions{ShMode::exact_pair, 0});
    d.push_back(increment_difference(sh.lines[0], sh.lines[1], 1));
  }
  double ks = stats::ks_one_sample(d, [](double z) { return diff_cdf_right(z, 1, 1); },
                                    [](double z) { return diff_cdf_left(z, 1, 1); })
                  .statistic;
  EXPECT_LT(ks, 0.03);
}

TEST(ExpectedJumps, Values) {
  EXPECT_NEAR(expected_jumps(0, 1, -1, 1), 4 / std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_NEAR(expected_jumps(-1, 1, -1, 1), 8 / std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_EQ(expected_jumps(0.5, 0.5, -1, 1), 0);
  EXPECT_EQ(expected_jumps(0, 1, 0.5, 0.5), 0);
  EXPECT_THROW(expected_jumps(1, 0, -1, 1), std::domain_error);
  EXPECT_THROW(expected_jumps(0, 1, 1, -1), std::domain_error);
}
