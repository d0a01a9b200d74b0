#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "queueing.hpp"
#include "random.hpp"
#include "report.hpp"
#include "seqcore.hpp"
#include "stats.hpp"

namespace tasep {

enum class Geometry { ring, segment };
enum class Direction { left, right };

inline std::string to_string(Direction d) { return d == Direction::left ? "left" : "right"; }

// Sites 0..L-1. Lower label = higher priority; kHole ranks below every particle.
struct TasepState {
  Geometry geometry = Geometry::ring;
  Direction direction = Direction::right;
  double time = 0;
  std::vector<Label> labels;
  std::vector<std::uint64_t> ids;             // identity of the occupant of each site
  std::vector<std::int64_t> displacement;     // net displacement per identity

  TasepState() = default;
  TasepState(std::vector<Label> l, Geometry g = Geometry::ring, Direction d = Direction::right)
      : geometry(g), direction(d), labels(std::move(l)), ids(labels.size()), displacement(labels.size(), 0) {
    if (labels.empty()) throw std::invalid_argument("TasepState: no sites");
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  }
  static TasepState from_seq(const MultiClassSeq& v, Geometry g = Geometry::ring, Direction d = Direction::right) {
    return TasepState(std::vector<Label>(v.labels().begin(), v.labels().end()), g, d);
  }

  std::size_t size() const { return labels.size(); }
  MultiClassSeq to_seq(Label m, Index lo = 0) const { return MultiClassSeq(lo, labels, m); }

  // One clock ring at site x.
  void ring_at(std::size_t x) {
    std::size_t n = labels.size(), y;
    if (direction == Direction::right) {
      if (x + 1 < n) {
        y = x + 1;
      } else if (geometry == Geometry::ring) {
        y = 0;
      } else {
        return;
      }
    } else {
      if (x > 0) {
        y = x - 1;
      } else if (geometry == Geometry::ring) {
        y = n - 1;
      } else {
        return;
      }
    }
    if (!(labels[x] < labels[y])) return;
    std::swap(labels[x], labels[y]);
    std::swap(ids[x], ids[y]);
    std::int64_t step = direction == Direction::right ? 1 : -1;
    displacement[ids[y]] += step;
    displacement[ids[x]] -= step;
  }
};

struct ClockEvent {
  double time;
  std::size_t site;
};

// Superposition of L independent rate-1 Poisson clocks: Exp(L) gaps, each ring at a uniform site.
// Mirrored streams report site L-1-x, which drives the reflected system with the same events.
class ClockStream {
 public:
  ClockStream(std::uint64_t seed, std::size_t sites, bool mirrored = false)
      : rng_(make_rng(seed)), sites_(sites), mirrored_(mirrored), pick_(0, sites - 1) {
    if (sites == 0) throw std::invalid_argument("ClockStream: no sites");
    advance();
  }
  std::size_t sites() const { return sites_; }
  const ClockEvent& peek() const { return next_; }
  ClockEvent pop() {
    ClockEvent e = next_;
    advance();
    return e;
  }

 private:
  void advance() {
    t_ += -std::log1p(-uniform01(rng_)) / static_cast<double>(sites_);
    std::size_t x = pick_(rng_);
    next_ = ClockEvent{t_, mirrored_ ? sites_ - 1 - x : x};
  }
  Rng rng_;
  std::size_t sites_;
  bool mirrored_;
  std::uniform_int_distribution<std::size_t> pick_;
  double t_ = 0;
  ClockEvent next_{};
};

inline void run(TasepState& state, ClockStream& clocks, double T) {
  if (!(T >= state.time)) throw std::invalid_argument("run: T must be >= state time");
  if (clocks.sites() != state.size()) throw std::invalid_argument("run: clock stream size mismatch");
  while (clocks.peek().time <= T) state.ring_at(clocks.pop().site);
  state.time = T;
}

// Every profile sees the same event list.
inline void run_basic_coupling(std::vector<TasepState>& states, ClockStream& clocks, double T) {
  if (states.empty()) return;
  const auto& s0 = states.front();
  for (const auto& s : states) {
    if (s.size() != s0.size() || s.geometry != s0.geometry || s.direction != s0.direction || s.time != s0.time) {
      throw std::invalid_argument("run_basic_coupling: states must share geometry, direction and time");
    }
  }
  if (!(T >= s0.time)) throw std::invalid_argument("run_basic_coupling: T must be >= state time");
  if (clocks.sites() != s0.size()) throw std::invalid_argument("run_basic_coupling: clock stream size mismatch");
  while (clocks.peek().time <= T) {
    std::size_t x = clocks.pop().site;
    for (auto& s : states) s.ring_at(x);
  }
  for (auto& s : states) s.time = T;
}

struct SpeedEstimate {
  Index site;
  double u;
  double T;
};

// Buffer on each side so that no information from the ring closure reaches the reported block:
// the influence front moves at most one site per clock ring.
inline std::size_t speed_buffer(double T) { return static_cast<std::size_t>(std::ceil(T + 8 * std::sqrt(T) + 10)); }

// Starts eta_0(i) = i on a ring of L + 2B sites, runs RIGHT jumps to T, and reports
// (X_T(i) - i) / T for the central L particles i = 0..L-1.
inline std::vector<SpeedEstimate> speed_process_estimate(std::size_t L, double T, std::uint64_t seed,
                                                         long long buffer = -1) {
  if (L == 0) throw std::invalid_argument("speed_process_estimate: L must be positive");
  if (!(T >= 0)) throw std::invalid_argument("speed_process_estimate: T must be nonnegative");
  std::size_t B = buffer < 0 ? speed_buffer(T) : static_cast<std::size_t>(buffer);
  std::size_t n = L + 2 * B;
  std::vector<Label> labels(n);
  for (std::size_t s = 0; s < n; ++s) labels[s] = static_cast<Label>(s + 1);
  TasepState st(std::move(labels), Geometry::ring, Direction::right);
  ClockStream clocks(seed, n);
  run(st, clocks, T);
  std::vector<SpeedEstimate> out(L);
  for (std::size_t i = 0; i < L; ++i) {
    double d = static_cast<double>(st.displacement[B + i]);
    out[i] = SpeedEstimate{static_cast<Index>(i), T > 0 ? d / T : 0.0, T};
  }
  return out;
}

// Adjacent label-pair frequencies on a ring; classes 1..m and holes (index m).
inline std::vector<double> ring_pair_frequencies(const std::vector<Label>& labels, Label m) {
  std::size_t c = m + 1, n = labels.size();
  auto idx = [&](Label l) { return l == kHole ? m : l - 1; };
  std::vector<double> f(c * c, 0.0);
  for (std::size_t x = 0; x < n; ++x) f[idx(labels[x]) * c + idx(labels[(x + 1) % n])] += 1;
  for (auto& v : f) v /= static_cast<double>(n);
  return f;
}

inline std::vector<double> class_densities(const std::vector<Label>& labels, Label m) {
  std::vector<double> f(m + 1, 0.0);
  for (Label l : labels) f[l == kHole ? m : l - 1] += 1;
  for (auto& v : f) v /= static_cast<double>(labels.size());
  return f;
}

// Statistics compared by the stationarity probe: class densities, joint adjacent label pairs,
// and adjacent (1,1) pairs of each indicator_leq(., k) projection.
inline std::vector<std::pair<std::string, double>> ring_statistics(const std::vector<Label>& labels, Label m) {
  std::vector<std::pair<std::string, double>> out;
  auto name = [&](Label j) { return j == m ? std::string("H") : std::to_string(j + 1); };
  auto dens = class_densities(labels, m);
  for (Label j = 0; j <= m; ++j) out.emplace_back("density[" + name(j) + "]", dens[j]);
  auto pairs = ring_pair_frequencies(labels, m);
  for (Label a = 0; a <= m; ++a) {
    for (Label b = 0; b <= m; ++b) out.emplace_back("pair[" + name(a) + "," + name(b) + "]", pairs[a * (m + 1) + b]);
  }
  std::size_t n = labels.size();
  for (Label k = 1; k <= m; ++k) {
    double c = 0;
    for (std::size_t x = 0; x < n; ++x) c += (labels[x] <= k && labels[(x + 1) % n] <= k);
    out.emplace_back("ind_pair11[" + std::to_string(k) + "]", c / static_cast<double>(n));
  }
  return out;
}

struct StationarityOptions {
  Direction direction = Direction::left;  // the FM construction is stationary for left jumps
  double alpha = 0.01;
  unsigned threads = 0;
};

// Samples the FM measure on [0, L-1], wraps it to a ring, runs to T, and paired-t-tests each
// statistic of ring_statistics between time 0 and time T across replicates (Bonferroni).
// Densities are conserved on the ring, so their tests pass identically.
inline TestReport stationarity_probe(const DensityVector& lambdas, std::size_t L, double T, std::size_t reps,
                                     std::uint64_t seed, const StationarityOptions& opt = {},
                                     std::vector<TestReport>* details = nullptr) {
  if (L < 2 || reps < 2) throw std::invalid_argument("stationarity_probe: need L >= 2 and reps >= 2");
  if (!(T >= 0)) throw std::invalid_argument("stationarity_probe: T must be nonnegative");
  auto m = static_cast<Label>(lambdas.size());
  std::vector<std::vector<std::pair<std::string, double>>> s0(reps), s1(reps);
  parallel_for(reps, opt.threads, [&](std::size_t r) {
    Rng rng = make_rng(derive_seed(seed, "stationarity", r));
    FmSample fm = sample_fm(lambdas, Window(0, static_cast<Index>(L) - 1), rng);
    TasepState st = TasepState::from_seq(fm.v, Geometry::ring, opt.direction);
    s0[r] = ring_statistics(st.labels, m);
    ClockStream clocks(derive_seed(seed, "stationarity-clocks", r), L);
    run(st, clocks, T);
    s1[r] = ring_statistics(st.labels, m);
  });
  std::size_t k = s0[0].size();
  double floor = stats::bonferroni(opt.alpha, k);
  double min_p = 1;
  std::string worst;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> a(reps), b(reps);
    for (std::size_t r = 0; r < reps; ++r) a[r] = s0[r][i].second, b[r] = s1[r][i].second;
    auto t = stats::paired_t_test(b, a);
    if (details) details->push_back(TestReport::from_p("stationarity/" + s0[0][i].first, t.statistic, t.p_value, floor));
    if (t.p_value < min_p) min_p = t.p_value, worst = s0[0][i].first;
  }
  TestReport rep = TestReport::from_p("stationarity", min_p, min_p, floor);
  rep.with("L", L).with("T", T).with("reps", reps).with("seed", seed).with("direction", to_string(opt.direction));
  rep.with("statistics", k).with("worst", worst);
  return rep;
}

}  // namespace tasep
