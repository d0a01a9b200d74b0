#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "random.hpp"
#include "seqcore.hpp"

namespace tasep {

class DensityVector {
 public:
  explicit DensityVector(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
    if (lambdas_.empty()) throw std::invalid_argument("DensityVector: empty");
    double sum = 0;
    for (double l : lambdas_) {
      if (!(l > 0 && l < 1)) throw std::invalid_argument("DensityVector: each lambda must lie in (0, 1)");
      sum += l;
    }
    if (sum > 1 + 1e-12) throw std::invalid_argument("DensityVector: sum of lambdas exceeds 1");
  }
  std::size_t size() const { return lambdas_.size(); }
  std::span<const double> lambdas() const { return lambdas_; }
  double operator[](std::size_t i) const { return lambdas_[i]; }
  // lambda_1 + ... + lambda_k, k is 1-based; cumulative(0) = 0.
  double cumulative(std::size_t k) const {
    double s = 0;
    for (std::size_t i = 0; i < k; ++i) s += lambdas_[i];
    return std::min(s, 1.0);
  }

 private:
  std::vector<double> lambdas_;
};

struct QueueResult {
  BinarySeq departures;
  BinarySeq unused;
  BinarySeq duals;
  std::vector<std::uint64_t> qlen;  // Q_i after time i, one per window index
  std::uint64_t q_final = 0;
};

// Core recursion on raw bits: d = s & (q > 0 | a), u = s & (q == 0 & !a), r = a | u.
// Output pointers may be null; returns the final queue length.
inline std::uint64_t serve_kernel(std::span<const std::uint8_t> a, std::span<const std::uint8_t> s,
                                  std::uint64_t q, std::uint8_t* d, std::uint8_t* u = nullptr,
                                  std::uint8_t* r = nullptr, std::uint64_t* qlen = nullptr) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    std::uint8_t busy = static_cast<std::uint8_t>(q > 0) | a[k];
    std::uint8_t dk = s[k] & busy;
    std::uint8_t uk = s[k] & static_cast<std::uint8_t>(!busy);
    q = q + a[k] - dk;
    if (d) d[k] = dk;
    if (u) u[k] = uk;
    if (r) r[k] = a[k] | uk;
    if (qlen) qlen[k] = q;
  }
  return q;
}

inline QueueResult serve(const BinarySeq& a, const BinarySeq& s, std::uint64_t q_init = 0) {
  require_same_window(a, s, "serve");
  std::size_t n = a.size();
  std::vector<std::uint8_t> d(n), u(n), r(n);
  std::vector<std::uint64_t> qlen(n);
  std::uint64_t q = serve_kernel(a.bits(), s.bits(), q_init, d.data(), u.data(), r.data(), qlen.data());
  return QueueResult{BinarySeq(a.lo(), std::move(d)), BinarySeq(a.lo(), std::move(u)), BinarySeq(a.lo(), std::move(r)),
                     std::move(qlen), q};
}

// Departures only; avoids materialising the other outputs in hot loops.
inline BinarySeq depart(const BinarySeq& a, const BinarySeq& s, std::uint64_t q_init = 0) {
  require_same_window(a, s, "depart");
  std::vector<std::uint8_t> d(a.size());
  serve_kernel(a.bits(), s.bits(), q_init, d.data());
  return BinarySeq(a.lo(), std::move(d));
}

inline BinarySeq dual(const BinarySeq& a, const BinarySeq& s, std::uint64_t q_init = 0) {
  return serve(a, s, q_init).duals;
}

inline BinarySeq tandem_depart(std::span<const BinarySeq> streams, std::span<const std::uint64_t> q_inits) {
  if (streams.size() < 2) throw std::invalid_argument("tandem_depart: need at least two streams");
  if (!q_inits.empty() && q_inits.size() != streams.size() - 1) {
    throw std::invalid_argument("tandem_depart: need n-1 initial queue lengths");
  }
  BinarySeq out = streams[0];
  for (std::size_t k = 1; k < streams.size(); ++k) {
    out = depart(out, streams[k], q_inits.empty() ? 0 : q_inits[k - 1]);
  }
  return out;
}

inline BinarySeq tandem_depart(std::span<const BinarySeq> streams) { return tandem_depart(streams, {}); }

inline BinarySeq tandem_depart(std::initializer_list<BinarySeq> streams) {
  return tandem_depart(std::span<const BinarySeq>(streams.begin(), streams.size()), {});
}

// Two empty queues in tandem, evaluated through the last-passage formula
//   D[k, t-1] = min_{k <= l <= v <= t} a[k, l-1] + s1[l, v-1] + s2[v, t-1].
inline BinarySeq tandem_minplus_oracle(const BinarySeq& a, const BinarySeq& s1, const BinarySeq& s2) {
  require_same_window(a, s1, "tandem_minplus_oracle");
  require_same_window(a, s2, "tandem_minplus_oracle");
  std::size_t n = a.size();
  std::vector<std::int64_t> pa(n + 1, 0), p1(n + 1, 0), p2(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    pa[k + 1] = pa[k] + a.bits()[k];
    p1[k + 1] = p1[k] + s1.bits()[k];
    p2[k + 1] = p2[k] + s2.bits()[k];
  }
  // best_l[v] = min_{l <= v} pa[l] - p1[l]; best_v[t] = min_{v <= t} best_l[v] + p1[v] - p2[v]
  std::vector<std::uint8_t> d(n);
  std::int64_t best_l = std::numeric_limits<std::int64_t>::max();
  std::int64_t best_v = std::numeric_limits<std::int64_t>::max();
  std::int64_t prev = 0;
  for (std::size_t t = 0; t <= n; ++t) {
    best_l = std::min(best_l, pa[t] - p1[t]);
    best_v = std::min(best_v, best_l + p1[t] - p2[t]);
    std::int64_t cum = best_v + p2[t];
    if (t > 0) d[t - 1] = static_cast<std::uint8_t>(cum - prev);
    prev = cum;
  }
  return BinarySeq(a.lo(), std::move(d));
}

// Height function of D(a, s) through the reflected-walk formula, empty queue at the left edge.
inline PathFn depart_walk_oracle(const BinarySeq& a, const BinarySeq& s) {
  require_same_window(a, s, "depart_walk_oracle");
  if (!a.contains(0)) throw std::invalid_argument("depart_walk_oracle: window must contain 0");
  PathFn ps = height_map(s);
  PathFn pa = height_map(a);
  std::size_t n = ps.size();
  std::size_t zero = static_cast<std::size_t>(-a.lo());
  std::vector<double> run(n);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    m = std::max(m, ps.value(k) - pa.value(k));
    run[k] = m;
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = ps.value(k) + run[zero] - run[k];
  return PathFn(ps.x_lo(), 1.0, std::move(out));
}

// Priority queue F_m: the arrival at time i may be served at time i; the lowest label
// present is served first, an unused service emits m+1, no service emits HOLE.
inline MultiClassSeq multiclass_serve(const MultiClassSeq& a, const BinarySeq& s,
                                      std::span<const std::uint64_t> init_per_class = {}) {
  if (a.window() != s.window()) throw std::invalid_argument("multiclass_serve: window mismatch");
  Label m = a.num_classes();
  if (!init_per_class.empty() && init_per_class.size() != m) {
    throw std::invalid_argument("multiclass_serve: need one initial count per class");
  }
  std::vector<std::uint64_t> cnt(m + 2, 0);
  std::uint64_t total = 0;
  Label minc = m + 1;  // lowest class with cnt > 0, m+1 when empty
  for (Label c = 1; c <= m && !init_per_class.empty(); ++c) {
    cnt[c] = init_per_class[c - 1];
    total += cnt[c];
    if (cnt[c] > 0 && c < minc) minc = c;
  }
  auto al = a.labels();
  auto sb = s.bits();
  std::vector<Label> out(al.size(), kHole);
  for (std::size_t k = 0; k < al.size(); ++k) {
    Label c = al[k];
    if (c != kHole) {
      ++cnt[c];
      ++total;
      if (c < minc) minc = c;
    }
    if (!sb[k]) continue;
    if (total == 0) {
      out[k] = m + 1;
      continue;
    }
    out[k] = minc;
    --cnt[minc];
    --total;
    if (total == 0) {
      minc = m + 1;
    } else {
      while (cnt[minc] == 0) ++minc;
    }
  }
  return MultiClassSeq(a.lo(), std::move(out), m + 1);
}

// v_1 = x_1, v_m = F_{m-1}(v_{m-1}, x_m). stage_inits[m-2] holds the per-class queue
// contents of stage m (length m-1); empty means the truncated convention.
inline MultiClassSeq fm_construct(std::span<const BinarySeq> xs,
                                  const std::vector<std::vector<std::uint64_t>>& stage_inits = {}) {
  if (xs.empty()) throw std::invalid_argument("fm_construct: need at least one stream");
  if (!stage_inits.empty() && stage_inits.size() != xs.size() - 1) {
    throw std::invalid_argument("fm_construct: need one init vector per stage");
  }
  MultiClassSeq v = MultiClassSeq::from_bits(xs[0]);
  for (std::size_t m = 1; m < xs.size(); ++m) {
    if (stage_inits.empty()) {
      v = multiclass_serve(v, xs[m]);
    } else {
      v = multiclass_serve(v, xs[m], stage_inits[m - 1]);
    }
  }
  return v;
}

inline std::uint64_t class_count(const MultiClassSeq& v, Label m, Index i, Index j) {
  if (m < 1 || m > v.num_classes()) throw std::out_of_range("class_count: class outside [1, m]");
  if (i == j + 1) return 0;
  if (i > j || !v.contains(i) || !v.contains(j)) throw std::out_of_range("class_count: interval outside window");
  std::uint64_t c = 0;
  for (Index k = i; k <= j; ++k) c += v[k] <= m;
  return c;
}

// Checks Cls_j(fm_construct(x)) = D(x_j, ..., x_n) pointwise for every j, truncated convention.
// Pointwise equality of the increments is equivalent to equality of all interval counts.
inline bool lemma_cl_check(std::span<const BinarySeq> xs) {
  if (xs.empty()) return true;
  MultiClassSeq v = fm_construct(xs);
  std::size_t n = xs.size();
  for (std::size_t j = 1; j <= n; ++j) {
    BinarySeq lhs = indicator_leq(v, static_cast<Label>(j));
    BinarySeq rhs = j == n ? xs[n - 1] : tandem_depart(xs.subspan(j - 1));
    if (lhs != rhs) return false;
  }
  return true;
}

// Output label <= l iff input label <= idx[l-1]; labels above idx.back() become HOLE.
inline MultiClassSeq relabel(const MultiClassSeq& v, std::span<const Label> idx) {
  if (idx.empty()) throw std::invalid_argument("relabel: empty index list");
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (idx[t] < 1 || idx[t] > v.num_classes()) throw std::out_of_range("relabel: index outside [1, m]");
    if (t > 0 && idx[t] <= idx[t - 1]) throw std::invalid_argument("relabel: indices must be strictly increasing");
  }
  std::vector<Label> map(v.num_classes() + 1, kHole);
  std::size_t t = 0;
  for (Label c = 1; c <= v.num_classes(); ++c) {
    while (t < idx.size() && idx[t] < c) ++t;
    map[c] = t < idx.size() ? static_cast<Label>(t + 1) : kHole;
  }
  auto l = v.labels();
  std::vector<Label> out(l.size());
  for (std::size_t k = 0; k < l.size(); ++k) out[k] = l[k] == kHole ? kHole : map[l[k]];
  return MultiClassSeq(v.lo(), std::move(out), static_cast<Label>(idx.size()));
}

inline BinarySeq bernoulli_seq(Window w, double p, Rng& rng) {
  std::vector<std::uint8_t> bits(w.size());
  for (auto& b : bits) b = bernoulli(rng, p);
  return BinarySeq(w.lo, std::move(bits));
}

// Stream k has intensity lambda_1 + ... + lambda_k.
inline std::vector<BinarySeq> sample_inputs(const DensityVector& lambdas, Window w, Rng& rng) {
  std::vector<BinarySeq> xs;
  xs.reserve(lambdas.size());
  for (std::size_t k = 1; k <= lambdas.size(); ++k) xs.push_back(bernoulli_seq(w, lambdas.cumulative(k), rng));
  return xs;
}

inline std::vector<BinarySeq> sample_inputs(const DensityVector& lambdas, Window w, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_inputs(lambdas, w, rng);
}

// gamma = beta / ((1 - alpha)(alpha + beta)); the stationary queue is Geom(gamma).
inline double burke_gamma(double alpha, double beta) {
  if (!(alpha > 0 && beta > 0 && alpha + beta <= 1)) throw std::domain_error("burke_gamma: need 0 < alpha < alpha+beta <= 1");
  return std::min(1.0, beta / ((1 - alpha) * (alpha + beta)));
}

// Failure-count geometric quantile at u in (0, 1]: P(Q >= k) = (1 - gamma)^k.
inline std::uint64_t geometric_quantile(double gamma, double u) {
  if (gamma >= 1) return 0;
  double k = std::floor(std::log(u) / std::log1p(-gamma));
  if (k > 9e18) return static_cast<std::uint64_t>(9e18);
  return static_cast<std::uint64_t>(k);
}

inline std::uint64_t stationary_queue_init(double alpha, double beta, Rng& rng) {
  if (!(alpha > 0 && beta > 0 && alpha + beta < 1)) {
    throw std::domain_error("stationary_queue_init: need 0 < alpha < alpha+beta < 1");
  }
  return geometric_quantile(burke_gamma(alpha, beta), 1 - uniform01(rng));
}

inline std::uint64_t stationary_queue_init(double alpha, double beta, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return stationary_queue_init(alpha, beta, rng);
}

// Passes arrivals through a tandem of service lines. Each line is overwritten by the dual
// stream R of its station; the final departures are returned. inits[i] is the initial
// content of station i (empty span: all zero).
inline std::vector<std::uint8_t> pass_through(std::vector<std::uint8_t> arrivals,
                                              std::vector<std::vector<std::uint8_t>>& lines,
                                              std::span<const std::uint64_t> inits = {}) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::uint64_t q = inits.empty() ? 0 : inits[i];
    auto& s = lines[i];
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
      std::uint8_t a = arrivals[k];
      std::uint8_t sk = s[k];
      std::uint8_t busy = static_cast<std::uint8_t>(q > 0) | a;
      std::uint8_t d = sk & busy;
      q = q + a - d;
      s[k] = a | (sk & static_cast<std::uint8_t>(!busy));
      arrivals[k] = d;
    }
  }
  return arrivals;
}

// The projections eta_j = D(x_j, ..., x_n) of fm_construct(x), computed top down through the
// interchanged tandem: by repeated pair swaps D(., x, S_1..S_r) = D(., R_1..R_r, D(x, S_1..S_r)),
// the tail (x_{j+1}, ..., x_n) is equivalent to the line list L_j = (R_1, ..., R_r, eta_{j+1})
// left behind when x_{j+1} passes through L_{j+1}. inits[j-1][i] is the content of station i
// of level j (empty: truncated convention, which reproduces fm_construct bit for bit).
inline MultiClassSeq fm_interchanged(std::span<const BinarySeq> xs,
                                     const std::vector<std::vector<std::uint64_t>>& inits = {}) {
  if (xs.empty()) throw std::invalid_argument("fm_interchanged: need at least one stream");
  for (const auto& x : xs) require_same_window(x, xs[0], "fm_interchanged");
  std::size_t n = xs.size();
  if (!inits.empty() && inits.size() != n) throw std::invalid_argument("fm_interchanged: need one init list per level");
  std::size_t w = xs[0].size();
  auto raw = [](const BinarySeq& b) { return std::vector<std::uint8_t>(b.bits().begin(), b.bits().end()); };
  std::vector<Label> labels(w, kHole);
  auto mark = [&](const std::vector<std::uint8_t>& eta, Label j) {
    for (std::size_t k = 0; k < w; ++k) {
      if (eta[k]) labels[k] = j;
    }
  };
  std::vector<std::vector<std::uint8_t>> lines{raw(xs[n - 1])};
  mark(lines[0], static_cast<Label>(n));
  for (std::size_t j = n - 1; j >= 1; --j) {
    std::span<const std::uint64_t> in;
    if (!inits.empty()) {
      if (inits[j - 1].size() != lines.size()) throw std::invalid_argument("fm_interchanged: bad init list length");
      in = inits[j - 1];
    }
    auto eta = pass_through(raw(xs[j - 1]), lines, in);
    mark(eta, static_cast<Label>(j));
    lines.push_back(std::move(eta));
  }
  return MultiClassSeq(xs[0].lo(), std::move(labels), static_cast<Label>(n));
}

// Exact stationary initial contents for fm_interchanged. Station i of level j serves at rate
// A_{n-i} (A_k = lambda_1 + ... + lambda_k) and receives rate A_j; by the Burke property every
// line is a Bernoulli stream independent of all queue contents, so the contents are independent
// Geom(gamma(A_j, A_{n-i} - A_j)).
inline std::vector<std::vector<std::uint64_t>> fm_stationary_inits(const DensityVector& lambdas, Rng& rng) {
  std::size_t n = lambdas.size();
  std::vector<std::vector<std::uint64_t>> inits(n);
  for (std::size_t j = 1; j < n; ++j) {
    double a = lambdas.cumulative(j);
    auto& row = inits[j - 1];
    row.resize(n - j);
    for (std::size_t i = 0; i < n - j; ++i) {
      row[i] = geometric_quantile(burke_gamma(a, lambdas.cumulative(n - i) - a), 1 - uniform01(rng));
    }
  }
  return inits;
}

struct FmSample {
  std::vector<BinarySeq> inputs;
  MultiClassSeq v;
};

// One exact draw of the k-type measure on window w, stationary for LEFT jumps.
inline FmSample sample_fm(const DensityVector& lambdas, Window w, Rng& rng) {
  auto xs = sample_inputs(lambdas, w, rng);
  auto inits = fm_stationary_inits(lambdas, rng);
  MultiClassSeq v = fm_interchanged(xs, inits);
  return FmSample{std::move(xs), std::move(v)};
}

inline FmSample sample_fm(const DensityVector& lambdas, Window w, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_fm(lambdas, w, rng);
}

}  // namespace tasep
