#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "horizon.hpp"
#include "parallel.hpp"
#include "queueing.hpp"
#include "random.hpp"
#include "report.hpp"
#include "scaling.hpp"
#include "seqcore.hpp"
#include "stats.hpp"
#include "tasep_sim.hpp"

namespace tasep {

namespace detail {

inline BinarySeq bits_from_mask(std::uint32_t mask, std::size_t len, Index lo = 0) {
  std::vector<std::uint8_t> b(len);
  for (std::size_t i = 0; i < len; ++i) b[i] = (mask >> i) & 1u;
  return BinarySeq(lo, std::move(b));
}

// A stream with its own random intensity, so sparse, dense and balanced inputs all occur.
inline BinarySeq random_stream(Rng& rng, std::size_t len, Index lo = 0) {
  double p = 0.05 + 0.9 * uniform01(rng);
  std::vector<std::uint8_t> b(len);
  for (auto& x : b) x = bernoulli(rng, p);
  return BinarySeq(lo, std::move(b));
}

inline std::size_t random_len(Rng& rng, std::size_t max_len) {
  return 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(max_len));
}

inline std::vector<BinarySeq> random_streams(Rng& rng, std::size_t n, std::size_t len, Index lo = 0) {
  std::vector<BinarySeq> xs;
  for (std::size_t k = 0; k < n; ++k) xs.push_back(random_stream(rng, len, lo));
  return xs;
}

inline bool preceq(const BinarySeq& x, const BinarySeq& y) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x.bits()[k] > y.bits()[k]) return false;
  }
  return true;
}

// D^n with D^1(x_1) = x_1.
inline BinarySeq tandem(std::span<const BinarySeq> xs) { return xs.size() == 1 ? xs[0] : tandem_depart(xs); }

inline TestReport exact_report(const std::string& name, std::uint64_t mismatches, std::uint64_t exhaustive,
                               std::uint64_t random, std::uint64_t seed) {
  TestReport r = TestReport::from_stat(name, static_cast<double>(mismatches), 0);
  r.with("mismatches", mismatches).with("exhaustive_cases", exhaustive).with("random_cases", random).with("seed", seed);
  return r;
}

}  // namespace detail

struct ExactOptions {
  std::size_t random_reps = 1000;
  std::size_t max_len = 200;
  std::size_t exhaustive_len = 8;
};

// Regrouping D^n(x) = D^{k+1}(D^{n-k}(x_1..x_{n-k}), x_{n-k+1}..x_n) and the pair swap
// D^n(x) = D^n(x_1..x_{k-1}, R(x_k, x_{k+1}), D(x_k, x_{k+1}), x_{k+2}..x_n), truncated windows.
// Exhaustive part: n = 3, every triple of length <= exhaustive_len, on the raw kernel.
inline TestReport interchange_suite(std::uint64_t seed, const ExactOptions& opt = {}) {
  std::uint64_t bad = 0, ex = 0;
  std::array<std::uint8_t, 32> x1{}, x2{}, x3{}, d12{}, lhs{}, r23{}, d23{}, t{}, rhs{};
  for (std::size_t L = 1; L <= std::min<std::size_t>(opt.exhaustive_len, 10); ++L) {
    std::uint32_t M = 1u << L;
    auto sp = [L](const std::array<std::uint8_t, 32>& a) { return std::span<const std::uint8_t>(a.data(), L); };
    for (std::uint32_t a = 0; a < M; ++a) {
      for (std::size_t i = 0; i < L; ++i) x1[i] = (a >> i) & 1u;
      for (std::uint32_t b = 0; b < M; ++b) {
        for (std::size_t i = 0; i < L; ++i) x2[i] = (b >> i) & 1u;
        serve_kernel(sp(x1), sp(x2), 0, d12.data());
        for (std::uint32_t c = 0; c < M; ++c) {
          for (std::size_t i = 0; i < L; ++i) x3[i] = (c >> i) & 1u;
          serve_kernel(sp(d12), sp(x3), 0, lhs.data());
          serve_kernel(sp(x2), sp(x3), 0, d23.data(), nullptr, r23.data());
          serve_kernel(sp(x1), sp(r23), 0, t.data());
          serve_kernel(sp(t), sp(d23), 0, rhs.data());
          ++ex;
          if (!std::equal(lhs.begin(), lhs.begin() + static_cast<std::ptrdiff_t>(L), rhs.begin())) ++bad;
        }
      }
    }
  }
  Rng rng = make_rng(derive_seed(seed, "interchange", 0));
  for (std::size_t rep = 0; rep < opt.random_reps; ++rep) {
    std::size_t n = 3 + static_cast<std::size_t>(uniform01(rng) * 3);
    auto xs = detail::random_streams(rng, n, detail::random_len(rng, opt.max_len));
    BinarySeq full = tandem_depart(xs);
    std::span<const BinarySeq> all(xs);
    for (std::size_t k = 1; k <= n - 1; ++k) {
      std::vector<BinarySeq> re{detail::tandem(all.first(n - k))};
      for (std::size_t i = n - k; i < n; ++i) re.push_back(xs[i]);
      if (detail::tandem(re) != full) ++bad;
    }
    for (std::size_t k = 2; k <= n - 1; ++k) {
      auto sw = xs;
      auto res = serve(xs[k - 1], xs[k]);
      sw[k - 1] = res.duals;
      sw[k] = res.departures;
      if (tandem_depart(sw) != full) ++bad;
    }
  }
  return detail::exact_report("interchange", bad, ex, opt.random_reps, seed);
}

// Cls_j(fm_construct(x)) = D(x_j..x_n) for all j. Exhaustive: n = 2 up to exhaustive_len and
// n = 3 up to min(exhaustive_len, 6).
inline TestReport lemma_cl_suite(std::uint64_t seed, const ExactOptions& opt = {}) {
  std::uint64_t bad = 0, ex = 0;
  for (std::size_t L = 1; L <= opt.exhaustive_len; ++L) {
    std::uint32_t M = 1u << L;
    for (std::uint32_t a = 0; a < M; ++a) {
      for (std::uint32_t b = 0; b < M; ++b) {
        std::array<BinarySeq, 2> xs{detail::bits_from_mask(a, L), detail::bits_from_mask(b, L)};
        ++ex;
        if (!lemma_cl_check(xs)) ++bad;
      }
    }
  }
  for (std::size_t L = 1; L <= std::min<std::size_t>(opt.exhaustive_len, 6); ++L) {
    std::uint32_t M = 1u << L;
    for (std::uint32_t a = 0; a < M; ++a) {
      for (std::uint32_t b = 0; b < M; ++b) {
        for (std::uint32_t c = 0; c < M; ++c) {
          std::array<BinarySeq, 3> xs{detail::bits_from_mask(a, L), detail::bits_from_mask(b, L),
                                      detail::bits_from_mask(c, L)};
          ++ex;
          if (!lemma_cl_check(xs)) ++bad;
        }
      }
    }
  }
  Rng rng = make_rng(derive_seed(seed, "lemma-cl", 0));
  for (std::size_t rep = 0; rep < opt.random_reps; ++rep) {
    std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 6);
    auto xs = detail::random_streams(rng, n, detail::random_len(rng, opt.max_len));
    if (!lemma_cl_check(xs)) ++bad;
  }
  return detail::exact_report("lemma-cl", bad, ex, opt.random_reps, seed);
}

// Two empty queues in tandem against the last-passage formula. Exhaustive over triples of
// length <= exhaustive_len.
inline TestReport minplus_suite(std::uint64_t seed, const ExactOptions& opt = {}) {
  std::uint64_t bad = 0, ex = 0;
  for (std::size_t L = 1; L <= std::min<std::size_t>(opt.exhaustive_len, 10); ++L) {
    std::uint32_t M = 1u << L;
    for (std::uint32_t a = 0; a < M; ++a) {
      auto x1 = detail::bits_from_mask(a, L);
      for (std::uint32_t b = 0; b < M; ++b) {
        auto x2 = detail::bits_from_mask(b, L);
        for (std::uint32_t c = 0; c < M; ++c) {
          auto x3 = detail::bits_from_mask(c, L);
          ++ex;
          if (tandem_depart({x1, x2, x3}) != tandem_minplus_oracle(x1, x2, x3)) ++bad;
        }
      }
    }
  }
  Rng rng = make_rng(derive_seed(seed, "minplus", 0));
  for (std::size_t rep = 0; rep < opt.random_reps; ++rep) {
    auto xs = detail::random_streams(rng, 3, detail::random_len(rng, opt.max_len), -37);
    if (tandem_depart(xs) != tandem_minplus_oracle(xs[0], xs[1], xs[2])) ++bad;
  }
  return detail::exact_report("minplus", bad, ex, opt.random_reps, seed);
}

// Height function of D(a, s) against the reflected-walk formula, windows straddling 0.
inline TestReport walk_oracle_suite(std::uint64_t seed, const ExactOptions& opt = {}) {
  std::uint64_t bad = 0, ex = 0;
  auto check = [&](const BinarySeq& a, const BinarySeq& s) {
    return height_map(depart(a, s)) == depart_walk_oracle(a, s);
  };
  for (std::size_t L = 1; L <= opt.exhaustive_len; ++L) {
    std::uint32_t M = 1u << L;
    for (Index lo : {Index(0), -static_cast<Index>(L / 2), -static_cast<Index>(L) + 1}) {
      for (std::uint32_t a = 0; a < M; ++a) {
        for (std::uint32_t b = 0; b < M; ++b) {
          ++ex;
          if (!check(detail::bits_from_mask(a, L, lo), detail::bits_from_mask(b, L, lo))) ++bad;
        }
      }
    }
  }
  Rng rng = make_rng(derive_seed(seed, "walk-oracle", 0));
  for (std::size_t rep = 0; rep < opt.random_reps; ++rep) {
    std::size_t L = detail::random_len(rng, opt.max_len);
    Index lo = -static_cast<Index>(uniform01(rng) * static_cast<double>(L));
    auto xs = detail::random_streams(rng, 2, L, lo);
    if (!check(xs[0], xs[1])) ++bad;
  }
  return detail::exact_report("walk-oracle", bad, ex, opt.random_reps, seed);
}

// d <= s and a <= r coordinatewise; cumulative truncated tandem departures nondecreasing under
// single-bit upgrades of any input; truncated departures <= departures with initial queues.
inline TestReport monotonicity_suite(std::uint64_t seed, const ExactOptions& opt = {}) {
  std::uint64_t bad = 0, ex = 0;
  auto cum_leq = [](const BinarySeq& x, const BinarySeq& y) {
    std::int64_t cx = 0, cy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      cx += x.bits()[k], cy += y.bits()[k];
      if (cx > cy) return false;
    }
    return true;
  };
  auto check = [&](const std::vector<BinarySeq>& xs, std::span<const std::uint64_t> inits) {
    bool ok = true;
    auto res = serve(xs[0], xs[1], inits.empty() ? 0 : inits[0]);
    ok &= detail::preceq(res.departures, xs[1]);
    ok &= detail::preceq(xs[0], res.duals);
    BinarySeq base = tandem_depart(xs);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      for (Index i = xs[j].lo(); i <= xs[j].hi(); ++i) {
        if (xs[j][i]) continue;
        auto up = xs;
        std::vector<std::uint8_t> b(up[j].bits().begin(), up[j].bits().end());
        b[static_cast<std::size_t>(i - up[j].lo())] = 1;
        up[j] = BinarySeq(up[j].lo(), std::move(b));
        ok &= cum_leq(base, tandem_depart(up));
      }
    }
    if (!inits.empty()) ok &= detail::preceq(base, tandem_depart(xs, inits));
    return ok;
  };
  static const std::array<std::uint64_t, 1> kOne{2};
  for (std::size_t L = 1; L <= opt.exhaustive_len; ++L) {
    std::uint32_t M = 1u << L;
    for (std::uint32_t a = 0; a < M; ++a) {
      for (std::uint32_t b = 0; b < M; ++b) {
        std::vector<BinarySeq> xs{detail::bits_from_mask(a, L), detail::bits_from_mask(b, L)};
        ++ex;
        if (!check(xs, kOne)) ++bad;
      }
    }
  }
  Rng rng = make_rng(derive_seed(seed, "monotone", 0));
  for (std::size_t rep = 0; rep < opt.random_reps; ++rep) {
    std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 3);
    // Upgrades are checked at every zero bit, so random instances are kept shorter.
    auto xs = detail::random_streams(rng, n, detail::random_len(rng, std::min<std::size_t>(opt.max_len, 60)));
    std::vector<std::uint64_t> inits(n - 1);
    for (auto& q : inits) q = static_cast<std::uint64_t>(uniform01(rng) * 6);
    if (!check(xs, inits)) ++bad;
  }
  return detail::exact_report("monotone", bad, ex, opt.random_reps, seed);
}

inline std::vector<TestReport> exact_suites(std::uint64_t seed, const ExactOptions& opt = {}) {
  return {interchange_suite(seed, opt), lemma_cl_suite(seed, opt), minplus_suite(seed, opt),
          walk_oracle_suite(seed, opt), monotonicity_suite(seed, opt)};
}

// Applies a Bonferroni floor to every p-valued report in the list.
inline void apply_bonferroni(std::vector<TestReport>& rs, double alpha) {
  std::size_t m = 0;
  for (const auto& r : rs) m += r.p_value.has_value();
  double floor = stats::bonferroni(alpha, m);
  for (auto& r : rs) {
    if (!r.p_value) continue;
    r.threshold = floor;
    r.passed = *r.p_value > floor;
  }
}

struct BurkeOptions {
  bool stationary_init = true;  // false: empty queue at the left edge (negative control)
  double alpha = 0.01;          // family-wise floor for p-valued checks
  double sigma = 4;             // marginal frequencies must lie within this many sd
  std::size_t max_lag = 5;
  unsigned threads = 0;
};

// Stationary queue with Bernoulli(alpha) arrivals and Bernoulli(alpha+beta) services.
inline std::vector<TestReport> burke_suite(double alpha, double beta, std::size_t n, std::size_t reps,
                                           std::uint64_t seed, const BurkeOptions& opt = {}) {
  if (!(alpha > 0 && beta > 0 && alpha + beta < 1)) throw std::domain_error("burke_suite: need 0 < alpha < alpha+beta < 1");
  if (n < 4 * (opt.max_lag + 1) || reps < 3) throw std::invalid_argument("burke_suite: need n >= 4 (max_lag+1), reps >= 3");
  double gamma = burke_gamma(alpha, beta);
  std::size_t H = opt.max_lag;
  struct Rep {
    double d_sum = 0, r_sum = 0;
    std::uint64_t q_final = 0;
    std::vector<double> ac_d, ac_r, cc_dr, cc_rd, cq_d, cq_r;
    std::array<double, 64> patterns{};
    std::array<double, 4> stat_dr{}, stat_as{};
  };
  // Pattern statistics compared with fresh inputs: ones, adjacent 11, adjacent 10, joint 11 count.
  auto pattern_stats = [](const BinarySeq& x, const BinarySeq& y) {
    std::array<double, 4> s{};
    auto xb = x.bits(), yb = y.bits();
    for (std::size_t k = 0; k < xb.size(); ++k) {
      s[0] += xb[k];
      s[3] += xb[k] & yb[k];
      if (k + 1 < xb.size()) {
        s[1] += xb[k] & xb[k + 1];
        s[2] += xb[k] & !xb[k + 1];
      }
    }
    return s;
  };
  std::vector<Rep> out(reps);
  parallel_for(reps, opt.threads, [&](std::size_t r) {
    Rng rng = make_rng(derive_seed(seed, "burke", r));
    Window w(0, static_cast<Index>(n) - 1);
    auto a = bernoulli_seq(w, alpha, rng);
    auto s = bernoulli_seq(w, alpha + beta, rng);
    std::uint64_t q0 = opt.stationary_init ? stationary_queue_init(alpha, beta, rng) : 0;
    auto res = serve(a, s, q0);
    Rep& o = out[r];
    std::vector<double> d(n), rr(n), q(n);
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = res.departures.bits()[k];
      rr[k] = res.duals.bits()[k];
      q[k] = static_cast<double>(res.qlen[k]);
      o.d_sum += d[k];
      o.r_sum += rr[k];
    }
    o.q_final = res.q_final;
    for (std::size_t h = 1; h <= H; ++h) {
      o.ac_d.push_back(stats::autocorrelation(d, h));
      o.ac_r.push_back(stats::autocorrelation(rr, h));
      o.cc_rd.push_back(stats::cross_correlation(rr, d, h));
    }
    for (std::size_t h = 0; h <= H; ++h) {
      o.cc_dr.push_back(stats::cross_correlation(d, rr, h));
      // Q_j is independent of the past d and r: corr(d_t, Q_{t+h}) = 0 for h >= 0.
      o.cq_d.push_back(stats::cross_correlation(d, q, h));
      o.cq_r.push_back(stats::cross_correlation(rr, q, h));
    }
    for (std::size_t k = 0; k + 3 <= n; k += 3) {
      std::size_t code = 0;
      for (std::size_t t = k; t < k + 3; ++t) code = code * 4 + static_cast<std::size_t>(2 * d[t] + rr[t]);
      o.patterns[code] += 1;
    }
    o.stat_dr = pattern_stats(res.departures, res.duals);
    auto fa = bernoulli_seq(w, alpha, rng);
    auto fs = bernoulli_seq(w, alpha + beta, rng);
    o.stat_as = pattern_stats(fa, fs);
  });

  std::vector<TestReport> rs;
  double total = static_cast<double>(n * reps);
  double dsum = 0, rsum = 0;
  for (const auto& o : out) dsum += o.d_sum, rsum += o.r_sum;
  auto zd = stats::binomial_z_test(dsum, total, alpha);
  rs.push_back(TestReport::from_stat("burke/departure-frequency", std::abs(zd.statistic), opt.sigma)
                   .with("frequency", dsum / total).with("target", alpha));
  auto zr = stats::binomial_z_test(rsum, total, alpha + beta);
  rs.push_back(TestReport::from_stat("burke/dual-frequency", std::abs(zr.statistic), opt.sigma)
                   .with("frequency", rsum / total).with("target", alpha + beta));

  // q_final against Geom(gamma), tail lumped into the last bin.
  {
    std::uint64_t qmax = 0;
    for (const auto& o : out) qmax = std::max(qmax, o.q_final);
    std::size_t bins = static_cast<std::size_t>(qmax) + 2;
    std::vector<double> obs(bins, 0), exp(bins, 0);
    for (const auto& o : out) obs[static_cast<std::size_t>(o.q_final)] += 1;
    for (std::size_t k = 0; k + 1 < bins; ++k) exp[k] = static_cast<double>(reps) * gamma * std::pow(1 - gamma, static_cast<double>(k));
    exp[bins - 1] = static_cast<double>(reps) * std::pow(1 - gamma, static_cast<double>(bins - 1));
    stats::merge_small_bins(obs, exp, 5);
    double mean_q = 0;
    for (const auto& o : out) mean_q += static_cast<double>(o.q_final) / static_cast<double>(reps);
    if (obs.size() >= 2) {
      auto c = stats::chi_square_gof(obs, exp);
      rs.push_back(TestReport::from_p("burke/q-final-geometric", c.statistic, c.p_value, opt.alpha)
                       .with("gamma", gamma).with("bins", obs.size()).with("mean", mean_q)
                       .with("target_mean", (1 - gamma) / gamma));
    }
  }

  auto across = [&](const std::string& name, auto field, std::size_t h0) {
    std::size_t m = (out[0].*field).size();
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> v(reps);
      for (std::size_t r = 0; r < reps; ++r) v[r] = (out[r].*field)[i];
      auto t = stats::t_test(v);
      rs.push_back(TestReport::from_p(name + "[lag=" + std::to_string(i + h0) + "]", t.statistic, t.p_value, opt.alpha)
                       .with("mean", stats::mean(v)));
    }
  };
  across("burke/autocorr-d", &Rep::ac_d, 1);
  across("burke/autocorr-r", &Rep::ac_r, 1);
  across("burke/crosscorr-d-r", &Rep::cc_dr, 0);
  across("burke/crosscorr-r-d", &Rep::cc_rd, 1);
  across("burke/corr-d-then-q", &Rep::cq_d, 0);
  across("burke/corr-r-then-q", &Rep::cq_r, 0);

  {
    std::array<double, 64> pooled{};
    for (const auto& o : out) {
      for (std::size_t c = 0; c < 64; ++c) pooled[c] += o.patterns[c];
    }
    double blocks = 0;
    for (double v : pooled) blocks += v;
    std::array<double, 4> p1{(1 - alpha) * (1 - alpha - beta), (1 - alpha) * (alpha + beta), alpha * (1 - alpha - beta),
                             alpha * (alpha + beta)};
    std::vector<double> obs(pooled.begin(), pooled.end()), exp(64);
    for (std::size_t c = 0; c < 64; ++c) exp[c] = blocks * p1[c / 16] * p1[(c / 4) % 4] * p1[c % 4];
    // Sort by expected count so merging only lumps the rarest patterns.
    std::vector<std::size_t> ord(64);
    for (std::size_t i = 0; i < 64; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(), [&](std::size_t x, std::size_t y) { return exp[x] > exp[y]; });
    std::vector<double> o2, e2;
    for (auto i : ord) o2.push_back(obs[i]), e2.push_back(exp[i]);
    stats::merge_small_bins(o2, e2, 5);
    auto c = stats::chi_square_gof(o2, e2);
    rs.push_back(TestReport::from_p("burke/pattern-3block", c.statistic, c.p_value, opt.alpha).with("bins", o2.size()));
  }

  const std::array<const char*, 4> names{"ones", "adjacent-11", "adjacent-10", "joint-11"};
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> x(reps), y(reps);
    for (std::size_t r = 0; r < reps; ++r) x[r] = out[r].stat_dr[i], y[r] = out[r].stat_as[i];
    auto k = stats::ks_two_sample(x, y);
    rs.push_back(TestReport::from_p(std::string("burke/fixed-point-") + names[i], k.statistic, k.p_value, opt.alpha));
  }
  apply_bonferroni(rs, opt.alpha);
  for (auto& r : rs) {
    r.with("alpha", alpha).with("beta", beta).with("n", n).with("reps", reps).with("seed", seed)
        .with("stationary_init", opt.stationary_init);
  }
  return rs;
}

struct FddOptions {
  double alpha = 0.01;
  double two_point_ks = 0.05;  // KS distance allowance for the two-point CDF
  double sh_two_point_ks = 0.02;
  bool fm_leg = true;          // finite-N FM lines; off for the null configuration
  bool cross_validate = true;  // rerun the tests on sample_sh output
  std::size_t sh_reps = 0;     // 0: same as reps
  double sh_step = 1.0 / 256;
  unsigned threads = 0;
};

struct FddData {
  std::vector<double> xs;                          // evaluation points (grid-snapped for FM lines)
  std::vector<std::vector<std::vector<double>>> marginal;  // [drift][x] -> values
  std::vector<std::vector<std::vector<double>>> two_point; // [pair][x] -> differences
};

struct FddResult {
  std::vector<TestReport> reports;
  FddData fm;
  FddData sh;
};

namespace detail {

// Line values on a lattice with spacing delta: compare against the normal law with a
// continuity correction so the discreteness is not mistaken for a misfit.
inline stats::TestResult lattice_normal_ks(std::vector<double> v, double mean, double var, double delta) {
  double sd = std::sqrt(var);
  auto right = [=](double z) { return stats::normal_cdf((z + delta / 2 - mean) / sd); };
  auto left = [=](double z) { return stats::normal_cdf((z - delta / 2 - mean) / sd); };
  if (delta <= 0) return stats::ks_one_sample(std::move(v), right);
  // Paths summed in different orders give the same lattice point up to rounding; merge them
  // into one atom so ties are grouped.
  std::sort(v.begin(), v.end());
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] - v[i - 1] < delta / 4) v[i] = v[i - 1];
  }
  return stats::ks_one_sample(std::move(v), right, left);
}

inline void fdd_tests(const std::string& tag, const FddData& data, const std::vector<double>& drifts, double delta,
                      double ks_cap, double alpha, std::vector<TestReport>& rs) {
  for (std::size_t j = 0; j < drifts.size(); ++j) {
    for (std::size_t i = 0; i < data.xs.size(); ++i) {
      double x = data.xs[i];
      if (x == 0) continue;
      auto k = lattice_normal_ks(data.marginal[j][i], 2 * drifts[j] * x, 2 * std::abs(x), delta);
      rs.push_back(TestReport::from_p(tag + "/marginal[mu=" + std::to_string(drifts[j]) + ",x=" + std::to_string(x) + "]",
                                      k.statistic, k.p_value, alpha));
    }
  }
  for (std::size_t j = 0; j + 1 < drifts.size(); ++j) {
    double mu = drifts[j + 1] - drifts[j];
    for (std::size_t i = 0; i < data.xs.size(); ++i) {
      double x = std::abs(data.xs[i]);
      if (x == 0) continue;
      auto k = stats::ks_one_sample(data.two_point[j][i], [=](double z) { return diff_cdf_right(z, x, mu); },
                                    [=](double z) { return diff_cdf_left(z, x, mu); });
      TestReport r = TestReport::from_stat(
          tag + "/two-point[mu0=" + std::to_string(drifts[j]) + ",mu=" + std::to_string(mu) + ",x=" + std::to_string(x) + "]",
          k.statistic, ks_cap);
      r.with("p_value_info", k.p_value);
      rs.push_back(std::move(r));
    }
  }
}

}  // namespace detail

// Finite-N lines from the FM construction against the SH limit law: marginal KS vs
// Normal(2 mu x, 2x) and the two-point difference CDF vs diff_cdf. Points are snapped to the
// lattice grid k / (2 N^{2/3}).
inline FddResult fdd_suite(const std::vector<double>& drifts, std::uint64_t N, const std::vector<double>& xs,
                           std::size_t reps, std::uint64_t seed, const FddOptions& opt = {}) {
  if (xs.empty() || reps < 10) throw std::invalid_argument("fdd_suite: need points and reps >= 10");
  double x0 = 0;
  for (double x : xs) x0 = std::max(x0, std::abs(x));
  if (!(x0 > 0)) throw std::invalid_argument("fdd_suite: need a nonzero point");
  ScalingParams p{N, drifts, x0};
  p.validate();
  double step = 1 / (2 * p.n13() * p.n13());
  FddResult res;
  auto init = [&](FddData& d, const std::vector<double>& pts, std::size_t n) {
    d.xs = pts;
    d.marginal.assign(drifts.size(), std::vector<std::vector<double>>(pts.size(), std::vector<double>(n)));
    d.two_point.assign(drifts.size() - 1, std::vector<std::vector<double>>(pts.size(), std::vector<double>(n)));
  };
  auto fill = [&](FddData& d, std::size_t r, const std::vector<PathFn>& lines) {
    for (std::size_t i = 0; i < d.xs.size(); ++i) {
      for (std::size_t j = 0; j < lines.size(); ++j) d.marginal[j][i][r] = lines[j](d.xs[i]);
      for (std::size_t j = 0; j + 1 < lines.size(); ++j) {
        d.two_point[j][i][r] = d.xs[i] == 0 ? 0.0 : increment_difference(lines[j], lines[j + 1], std::abs(d.xs[i]));
      }
    }
  };
  std::vector<double> snapped;
  for (double x : xs) snapped.push_back(std::round(x / step) * step);
  // The snapped points must stay inside the lattice window [-x0, x0].
  for (double& x : snapped) x = std::clamp(x, -static_cast<double>(p.half_width()) * step, static_cast<double>(p.half_width()) * step);
  if (opt.fm_leg) {
    init(res.fm, snapped, reps);
    parallel_for(reps, opt.threads, [&](std::size_t r) {
      Rng rng = make_rng(derive_seed(seed, "fdd-fm", r));
      fill(res.fm, r, h_n_lines_from_fm(p, rng));
    });
    double delta = 2 / p.n13();
    detail::fdd_tests("fdd-fm", res.fm, drifts, delta, opt.two_point_ks, opt.alpha, res.reports);
  }
  if (opt.cross_validate) {
    std::size_t n = opt.sh_reps ? opt.sh_reps : reps;
    double hi = std::ceil(x0 / opt.sh_step) * opt.sh_step;
    Grid g{-hi, hi, opt.sh_step};
    std::vector<double> pts;
    for (double x : xs) pts.push_back(std::round(x / opt.sh_step) * opt.sh_step);
    init(res.sh, pts, n);
    parallel_for(n, opt.threads, [&](std::size_t r) {
      Rng rng = make_rng(derive_seed(seed, "fdd-sh", r));
      fill(res.sh, r, sample_sh(drifts, g, rng).lines);
    });
    detail::fdd_tests("fdd-sh", res.sh, drifts, 0, opt.sh_two_point_ks, opt.alpha, res.reports);
  }
  apply_bonferroni(res.reports, opt.alpha);
  for (auto& r : res.reports) r.with("N", N).with("reps", reps).with("seed", seed);
  return res;
}

struct ShSelfCheck {
  TestReport report;
  std::vector<double> samples;
};

// Two-line sample_sh: the sup-difference over [-x, x] against diff_cdf.
inline ShSelfCheck sh_two_point_check(double mu0, double mu, double x, std::size_t reps, std::uint64_t seed,
                                      const Grid& grid, const ShOptions& sh = {}, double ks_cap = 0.02,
                                      unsigned threads = 0) {
  if (!(mu > 0 && x > 0)) throw std::invalid_argument("sh_two_point_check: need mu > 0 and x > 0");
  std::vector<double> drifts{mu0, mu0 + mu}, d(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    Rng rng = make_rng(derive_seed(seed, "sh-two-point", r));
    auto s = sample_sh(drifts, grid, rng, sh);
    d[r] = increment_difference(s.lines[0], s.lines[1], x);
  });
  auto k = stats::ks_one_sample(d, [=](double z) { return diff_cdf_right(z, x, mu); },
                                [=](double z) { return diff_cdf_left(z, x, mu); });
  TestReport rep = TestReport::from_stat("sh-two-point", k.statistic, ks_cap);
  rep.with("p_value_info", k.p_value).with("mu0", mu0).with("mu", mu).with("x", x).with("reps", reps)
      .with("seed", seed).with("step", grid.step).with("mode", to_string(sh.mode)).with("left_extension", sh.left_extension);
  return {rep, d};
}

struct JumpsResult {
  TestReport report;
  std::vector<double> counts;
  double mean = 0;
  double target = 0;
  double finite_n_expectation = 0;
};

// Number of distinct consecutive-drift jumps of the FM lines on [-x0, x0] for a uniform drift grid.
inline JumpsResult jumps_suite(double lo, double hi, double grid_step, std::uint64_t N, double x0, std::size_t reps,
                               std::uint64_t seed, double tolerance = 0.10, unsigned threads = 0) {
  if (!(hi > lo && grid_step > 0)) throw std::invalid_argument("jumps_suite: need lo < hi and step > 0");
  std::vector<double> drifts;
  auto k = static_cast<std::size_t>(std::llround((hi - lo) / grid_step));
  for (std::size_t i = 0; i <= k; ++i) drifts.push_back(lo + grid_step * static_cast<double>(i));
  ScalingParams p{N, drifts, x0};
  p.validate();
  JumpsResult res;
  res.counts.resize(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    Rng rng = make_rng(derive_seed(seed, "jumps", r));
    res.counts[r] = static_cast<double>(jump_count_finite_N(p, rng));
  });
  res.mean = stats::mean(res.counts);
  res.target = expected_jumps(lo, hi, -x0, x0);
  res.finite_n_expectation = expected_jump_count_finite_N(p);
  double rel = std::abs(res.mean - res.target) / res.target;
  res.report = TestReport::from_stat("jump-count", rel, tolerance);
  res.report.with("mean", res.mean).with("target", res.target).with("finite_N_expectation", res.finite_n_expectation)
      .with("N", N).with("grid_step", grid_step).with("x0", x0).with("reps", reps).with("seed", seed);
  if (reps >= 2) res.report.with("standard_error", std::sqrt(stats::variance(res.counts) / static_cast<double>(reps)));
  return res;
}

// Class of speed u under cutoffs c_1 < ... < c_k: j for c_{j-1} < u <= c_j, HOLE above c_k.
// Estimates outside [-1, 1] are finite-T noise and are clamped first.
inline Label speed_class(double u, std::span<const double> cutoffs) {
  u = std::clamp(u, -1.0, 1.0);
  for (std::size_t j = 0; j < cutoffs.size(); ++j) {
    if (u <= cutoffs[j]) return static_cast<Label>(j + 1);
  }
  return kHole;
}

// lambda_1 = (1 + c_1)/2, lambda_j = (c_j - c_{j-1})/2: the law of F(U) for U ~ Uniform[-1, 1].
inline std::vector<double> densities_for_cutoffs(std::span<const double> cutoffs) {
  if (cutoffs.empty()) throw std::invalid_argument("densities_for_cutoffs: no cutoffs");
  std::vector<double> lam;
  for (std::size_t j = 0; j < cutoffs.size(); ++j) {
    if (!(cutoffs[j] > -1 && cutoffs[j] <= 1) || (j > 0 && !(cutoffs[j] > cutoffs[j - 1]))) {
      throw std::invalid_argument("densities_for_cutoffs: need -1 < c_1 < ... < c_k <= 1");
    }
    lam.push_back(j == 0 ? (1 + cutoffs[0]) / 2 : (cutoffs[j] - cutoffs[j - 1]) / 2);
  }
  return lam;
}

// Reflected FM sample on [0, L-1] with the cutoff densities. A last cutoff at 1 leaves no holes:
// that class is sampled as the holes of the first k-1 classes.
inline std::vector<Label> projected_fm_sample(std::span<const double> cutoffs, std::size_t L, Rng& rng) {
  auto lam = densities_for_cutoffs(cutoffs);
  auto k = static_cast<Label>(lam.size());
  bool full = cutoffs.back() == 1;
  if (full) lam.pop_back();
  if (lam.empty()) return std::vector<Label>(L, 1);
  auto v = reflect(sample_fm(DensityVector(lam), Window(0, static_cast<Index>(L) - 1), rng).v);
  std::vector<Label> out(v.labels().begin(), v.labels().end());
  if (full) {
    for (auto& l : out) l = l == kHole ? k : l;
  }
  return out;
}

// Statistics on the central block of v compared between projected speeds and FM samples:
// class densities, adjacent label pairs, and class counts on the middle fifth of the block.
inline std::vector<std::pair<std::string, double>> window_statistics(const std::vector<Label>& v, Label m,
                                                                     std::size_t block) {
  std::vector<std::pair<std::string, double>> out;
  auto name = [&](Label j) { return j == m ? std::string("H") : std::to_string(j + 1); };
  auto idx = [&](Label l) { return l == kHole ? m : l - 1; };
  block = std::clamp<std::size_t>(block, 2, v.size());
  std::size_t b0 = (v.size() - block) / 2, c = m + 1;
  std::vector<double> dens(c, 0), pairs(c * c, 0), sub(c, 0);
  for (std::size_t i = b0; i < b0 + block; ++i) {
    dens[idx(v[i])] += 1.0 / static_cast<double>(block);
    if (i + 1 < b0 + block) pairs[idx(v[i]) * c + idx(v[i + 1])] += 1.0 / static_cast<double>(block - 1);
  }
  std::size_t s = std::max<std::size_t>(1, block / 5), s0 = b0 + (block - s) / 2;
  for (std::size_t i = s0; i < s0 + s; ++i) sub[idx(v[i])] += 1;
  for (Label j = 0; j < c; ++j) out.emplace_back("density[" + name(j) + "]", dens[j]);
  for (Label a = 0; a < c; ++a) {
    for (Label b = 0; b < c; ++b) out.emplace_back("pair[" + name(a) + "," + name(b) + "]", pairs[a * c + b]);
  }
  for (Label j = 0; j < c; ++j) out.emplace_back("count[" + name(j) + "]", sub[j]);
  return out;
}

// Local statistics of u_hat settle on scales up to about T^{2/3}; longer windows stay too regular.
inline std::size_t default_projection_block(double T) {
  return static_cast<std::size_t>(std::max(10.0, std::floor(std::pow(T, 2.0 / 3.0) / 2)));
}

struct SpeedOptions {
  double uniform_ks = 0.05;  // KS distance allowed for the pooled speed marginal
  double alpha = 0.001;      // family-wise floor for the projection two-sample tests
  bool null_mode = false;    // replace the projected speeds by an independent FM sample
  std::size_t block = 0;     // 0: default_projection_block(T)
  unsigned threads = 0;
};

struct SpeedResult {
  std::vector<TestReport> reports;
  std::vector<double> speeds;  // pooled estimates, replicate-major
};

// Speed-process marginal against Uniform[-1, 1], and F(u_hat) on a central block against the
// reflected FM measure (the right-jump stationary law) at the matching densities.
inline SpeedResult speed_projection_suite(const std::vector<double>& cutoffs, std::size_t L, double T, std::size_t reps,
                                          std::uint64_t seed, const SpeedOptions& opt = {}) {
  if (reps < 5 || L < 10) throw std::invalid_argument("speed_projection_suite: need reps >= 5 and L >= 10");
  densities_for_cutoffs(cutoffs);
  auto m = static_cast<Label>(cutoffs.size());
  std::size_t block = opt.block ? opt.block : default_projection_block(T);
  SpeedResult res;
  res.speeds.assign(reps * L, 0);
  std::vector<std::vector<std::pair<std::string, double>>> sp(reps), fm(reps);
  parallel_for(reps, opt.threads, [&](std::size_t r) {
    std::vector<Label> proj(L);
    if (opt.null_mode) {
      Rng rng = make_rng(derive_seed(seed, "speed-null", r));
      proj = projected_fm_sample(cutoffs, L, rng);
    } else {
      auto est = speed_process_estimate(L, T, derive_seed(seed, "speed", r));
      for (std::size_t i = 0; i < L; ++i) {
        res.speeds[r * L + i] = est[i].u;
        proj[i] = speed_class(est[i].u, cutoffs);
      }
    }
    sp[r] = window_statistics(proj, m, block);
    Rng rng = make_rng(derive_seed(seed, "speed-fm", r));
    fm[r] = window_statistics(projected_fm_sample(cutoffs, L, rng), m, block);
  });
  if (!opt.null_mode) {
    auto k = stats::ks_one_sample(res.speeds, [](double u) { return std::clamp((u + 1) / 2, 0.0, 1.0); });
    TestReport r = TestReport::from_stat("speed/uniform-marginal", k.statistic, opt.uniform_ks);
    r.with("samples", res.speeds.size());
    res.reports.push_back(std::move(r));
    // Antisymmetry: u_i against -u_{L-1-i}, thinned to every 50th site to weaken dependence.
    std::vector<double> a, b;
    for (std::size_t rr = 0; rr < reps; ++rr) {
      for (std::size_t i = 0; i < L; i += 50) {
        a.push_back(res.speeds[rr * L + i]);
        b.push_back(-res.speeds[rr * L + (L - 1 - i)]);
      }
    }
    auto ka = stats::ks_two_sample(a, b);
    res.reports.push_back(TestReport::from_p("speed/antisymmetry", ka.statistic, ka.p_value, 0.01));
  }
  std::vector<TestReport> proj;
  for (std::size_t i = 0; i < sp[0].size(); ++i) {
    std::vector<double> x(reps), y(reps);
    for (std::size_t r = 0; r < reps; ++r) x[r] = sp[r][i].second, y[r] = fm[r][i].second;
    auto k = stats::ks_two_sample(x, y);
    proj.push_back(TestReport::from_p("projection/" + sp[0][i].first, k.statistic, k.p_value, opt.alpha));
  }
  apply_bonferroni(proj, opt.alpha);
  for (auto& r : proj) res.reports.push_back(std::move(r));
  for (auto& r : res.reports) {
    r.with("L", L).with("T", T).with("reps", reps).with("seed", seed).with("null_mode", opt.null_mode).with("block", block);
  }
  return res;
}

}  // namespace tasep
