#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "queueing.hpp"
#include "seqcore.hpp"

namespace tasep {

struct ScalingParams {
  std::uint64_t N = 1;
  std::vector<double> drifts;
  double x0 = 1;

  void validate() const {
    if (N == 0) throw std::invalid_argument("ScalingParams: N must be positive");
    if (drifts.empty()) throw std::invalid_argument("ScalingParams: no drifts");
    for (std::size_t i = 1; i < drifts.size(); ++i) {
      if (!(drifts[i] > drifts[i - 1])) throw std::invalid_argument("ScalingParams: drifts must be strictly increasing");
    }
    double bound = std::max(std::pow(std::abs(drifts.front()), 3), std::pow(std::abs(drifts.back()), 3));
    if (!(static_cast<double>(N) > bound)) throw std::invalid_argument("ScalingParams: need N > |mu_1|^3 v |mu_k|^3");
    if (!(x0 > 0)) throw std::invalid_argument("ScalingParams: x0 must be positive");
  }
  double n13() const { return std::cbrt(static_cast<double>(N)); }
  // Number of lattice sites per unit of x on one side: [-x0, x0] maps to [-half_width, half_width).
  Index half_width() const { return static_cast<Index>(std::ceil(2 * x0 * n13() * n13() - 1e-9)); }
};

// lambda_1 = (1 + mu_1 N^{-1/3})/2, lambda_j = (mu_j - mu_{j-1}) N^{-1/3}/2.
inline DensityVector densities_for_drifts(const std::vector<double>& drifts, std::uint64_t N) {
  ScalingParams p{N, drifts, 1};
  p.validate();
  double s = 1 / p.n13();
  std::vector<double> lam(drifts.size());
  lam[0] = (1 + drifts[0] * s) / 2;
  for (std::size_t j = 1; j < drifts.size(); ++j) lam[j] = (drifts[j] - drifts[j - 1]) * s / 2;
  return DensityVector(std::move(lam));
}

// x -> N^{-1/3} P[bits](2 x N^{2/3}) on the lattice grid k/(2N^{2/3}), |k| <= K, K = ceil(2 x0 N^{2/3}).
inline PathFn h_n_from_bits(const BinarySeq& bits, std::uint64_t N, double x0) {
  if (N == 0 || !(x0 > 0)) throw std::invalid_argument("h_n_from_bits: need N > 0 and x0 > 0");
  ScalingParams p{N, {0.0}, x0};
  Index K = p.half_width();
  if (!bits.contains(-K) || !bits.contains(K - 1)) throw std::invalid_argument("h_n_from_bits: window too small");
  double scale = 1 / p.n13();
  double step = 1 / (2 * p.n13() * p.n13());
  std::vector<double> v(static_cast<std::size_t>(2 * K + 1));
  std::size_t zero = static_cast<std::size_t>(K);
  for (Index i = 0; i < K; ++i) {
    auto k = zero + static_cast<std::size_t>(i);
    v[k + 1] = v[k] + (bits[i] ? scale : -scale);
  }
  for (Index i = -1; i >= -K; --i) {
    auto k = zero + static_cast<std::size_t>(i);
    v[k] = v[k + 1] - (bits[i] ? scale : -scale);
  }
  return PathFn(-static_cast<double>(K) * step, step, std::move(v));
}

// Lattice window behind the scaled lines. The FM sampler is exactly stationary on any window,
// so no settling margin is needed.
inline Window fm_window(const ScalingParams& p) { return Window(-p.half_width(), p.half_width() - 1); }

// One k-tuple of scaled lines targeting (G_{mu_1}, ..., G_{mu_k}).
inline std::vector<PathFn> h_n_lines_from_fm(const ScalingParams& p, Rng& rng) {
  p.validate();
  DensityVector lam = densities_for_drifts(p.drifts, p.N);
  FmSample s = sample_fm(lam, fm_window(p), rng);
  std::vector<PathFn> lines;
  lines.reserve(p.drifts.size());
  for (Label j = 1; j <= lam.size(); ++j) lines.push_back(h_n_from_bits(reflect(indicator_leq(s.v, j)), p.N, p.x0));
  return lines;
}

inline std::vector<PathFn> h_n_lines_from_fm(const ScalingParams& p, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return h_n_lines_from_fm(p, rng);
}

// Values at one x of every line; avoids building full paths in hot loops.
inline std::vector<double> h_n_values_from_fm(const ScalingParams& p, std::span<const double> xs, Rng& rng) {
  auto lines = h_n_lines_from_fm(p, rng);
  std::vector<double> out;
  for (const auto& l : lines) {
    for (double x : xs) out.push_back(l(x));
  }
  return out;
}

// Number of classes j >= 2 present in v on [lo, hi]. Classes j-1 and j have different
// indicator projections there iff class j occurs.
inline std::uint64_t classes_present(const MultiClassSeq& v, Index lo, Index hi) {
  std::vector<std::uint8_t> seen(v.num_classes() + 1, 0);
  for (Index i = lo; i <= hi; ++i) {
    Label c = v.at(i);
    if (c != kHole) seen[c] = 1;
  }
  std::uint64_t n = 0;
  for (Label c = 2; c <= v.num_classes(); ++c) n += seen[c];
  return n;
}

inline std::uint64_t jump_count_finite_N(const ScalingParams& p, Rng& rng) {
  p.validate();
  if (p.drifts.size() == 1) return 0;
  DensityVector lam = densities_for_drifts(p.drifts, p.N);
  FmSample s = sample_fm(lam, fm_window(p), rng);
  return classes_present(s.v, -p.half_width(), p.half_width() - 1);
}

inline std::uint64_t jump_count_finite_N(const ScalingParams& p, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return jump_count_finite_N(p, rng);
}

// Probability that a stationary queue (arrivals alpha, services alpha+beta) has an unused
// service somewhere in n consecutive slots. Forward recursion on the queue-length law with
// the unused event absorbing; starts above n cannot reach an empty queue in time.
inline double unused_service_probability(double alpha, double beta, std::size_t n) {
  double g = burke_gamma(alpha, beta);
  double p = alpha + beta;
  std::size_t Q = n + 2;
  std::vector<double> cur(Q), nxt(Q);
  for (std::size_t q = 0; q < Q; ++q) cur[q] = g * std::pow(1 - g, static_cast<double>(q));
  double up = alpha * (1 - p), down = (1 - alpha) * p, stay = 1 - up - down;
  for (std::size_t t = 0; t < n; ++t) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    nxt[0] += cur[0] * (alpha * p + (1 - alpha) * (1 - p));
    nxt[1] += cur[0] * up;
    for (std::size_t q = 1; q + 1 < Q; ++q) {
      nxt[q + 1] += cur[q] * up;
      nxt[q - 1] += cur[q] * down;
      nxt[q] += cur[q] * stay;
    }
    nxt[Q - 2] += cur[Q - 1] * down;
    nxt[Q - 1] += cur[Q - 1] * (1 - down);
    std::swap(cur, nxt);
  }
  double alive = std::pow(1 - g, static_cast<double>(Q));
  for (double c : cur) alive += c;
  return std::clamp(1 - alive, 0.0, 1.0);
}

// Exact finite-N mean of jump_count_finite_N. By the relabel lemma, classes (j-1, j) of the
// k-type measure have the two-type law, whose class 2 marks the unused services of one
// stationary queue.
inline double expected_jump_count_finite_N(const ScalingParams& p) {
  p.validate();
  DensityVector lam = densities_for_drifts(p.drifts, p.N);
  auto n = static_cast<std::size_t>(2 * p.half_width());
  double sum = 0;
  for (std::size_t j = 2; j <= lam.size(); ++j) {
    double alpha = lam.cumulative(j - 1);
    sum += unused_service_probability(alpha, lam[j - 1], n);
  }
  return sum;
}

}  // namespace tasep
