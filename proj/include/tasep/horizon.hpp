#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "random.hpp"
#include "seqcore.hpp"

namespace tasep {

struct Grid {
  double x_lo = -8;
  double x_hi = 8;
  double step = 1.0 / 1024;

  // Grid must contain 0 as a node.
  void validate() const {
    if (!(step > 0)) throw std::invalid_argument("Grid: step must be positive");
    if (!(x_lo <= 0 && 0 <= x_hi && x_lo < x_hi)) throw std::invalid_argument("Grid: need x_lo <= 0 <= x_hi, x_lo < x_hi");
    for (double e : {x_lo, x_hi}) {
      double k = e / step;
      if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, std::abs(k))) {
        throw std::invalid_argument("Grid: endpoints must be multiples of step");
      }
    }
  }
  std::size_t left_cells() const { return static_cast<std::size_t>(std::llround(-x_lo / step)); }
  std::size_t right_cells() const { return static_cast<std::size_t>(std::llround(x_hi / step)); }
  std::size_t size() const { return left_cells() + right_cells() + 1; }
};

struct BrownianSpec {
  double mu = 0;  // path drift is 2 mu, variance 2 per unit length
  Grid grid;
};

inline PathFn sample_bm(const BrownianSpec& spec, Rng& rng) {
  spec.grid.validate();
  const Grid& g = spec.grid;
  std::normal_distribution<double> z(0.0, 1.0);
  double mean = 2 * spec.mu * g.step, sd = std::sqrt(2 * g.step);
  std::size_t zero = g.left_cells();
  std::vector<double> v(g.size());
  v[zero] = 0;
  for (std::size_t k = zero; k + 1 < v.size(); ++k) v[k + 1] = v[k] + mean + sd * z(rng);
  for (std::size_t k = zero; k-- > 0;) v[k] = v[k + 1] - mean - sd * z(rng);
  return PathFn(-static_cast<double>(zero) * g.step, g.step, std::move(v));
}

inline PathFn sample_bm(const BrownianSpec& spec, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_bm(spec, rng);
}

struct PhiOptions {
  // Add one Exp(drift_gap) draw for the supremum beyond the left edge of the grid.
  bool exp_tail = true;
  // Use the exact Brownian-bridge maximum of g - f between grid nodes (variance rate 4).
  bool bridge_max = true;
};

struct PhiRecord {
  double tail = 0;  // the exponential draw, 0 when disabled
};

// Phi(f, g)(y) = f(y) + sup_{x <= y}(g - f)(x) - sup_{x <= 0}(g - f)(x) on the common grid.
inline PathFn phi(const PathFn& f, const PathFn& g, double drift_gap, Rng& rng, const PhiOptions& opt = {},
                  PhiRecord* rec = nullptr) {
  if (!(drift_gap > 0)) throw std::invalid_argument("phi: drift gap must be positive");
  if (f.size() != g.size() || f.step() != g.step() || std::abs(f.x_lo() - g.x_lo()) > 1e-12) {
    throw std::invalid_argument("phi: f and g must share a grid");
  }
  if (!f.covers(0, 0)) throw std::invalid_argument("phi: grid must contain 0");
  auto k0 = static_cast<std::size_t>(std::llround(-f.x_lo() / f.step()));
  if (std::abs(f.value(k0)) > 1e-12 || std::abs(g.value(k0)) > 1e-12) {
    throw std::invalid_argument("phi: paths must vanish at 0");
  }
  std::size_t n = f.size();
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = g.value(k) - f.value(k);
  double run = w[0];
  if (opt.exp_tail) {
    std::exponential_distribution<double> e(drift_gap);
    double t = e(rng);
    run += t;
    if (rec) rec->tail = t;
  }
  std::vector<double> m(n);
  m[0] = run;
  double var = 4 * f.step();
  for (std::size_t k = 1; k < n; ++k) {
    if (opt.bridge_max) {
      double a = w[k - 1], b = w[k];
      double u = 1 - uniform01(rng);
      double top = 0.5 * (a + b + std::sqrt((b - a) * (b - a) - 2 * var * std::log(u)));
      run = std::max(run, top);
    }
    run = std::max(run, w[k]);
    m[k] = run;
  }
  // The sup over x <= 0 uses only nodes and bridges left of 0.
  double base = m[k0];
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = f.value(k) + m[k] - base;
  return PathFn(f.x_lo(), f.step(), std::move(out));
}

inline PathFn phi(const PathFn& f, const PathFn& g, double drift_gap, std::uint64_t seed, const PhiOptions& opt = {}) {
  Rng rng = make_rng(seed);
  return phi(f, g, drift_gap, rng, opt);
}

// (Phi^1(f_1), Phi^2(f_1, f_2), ..., Phi^k(f_1..f_k)), Phi^i(f_1..f_i) = Phi(f_1, Phi^{i-1}(f_2..f_i)).
inline std::vector<PathFn> phi_k(std::span<const PathFn> paths, std::span<const double> drifts, Rng& rng,
                                 const PhiOptions& opt = {}, std::vector<double>* tails = nullptr) {
  if (paths.size() != drifts.size() || paths.empty()) throw std::invalid_argument("phi_k: need one drift per path");
  for (std::size_t i = 1; i < drifts.size(); ++i) {
    if (!(drifts[i] > drifts[i - 1])) throw std::invalid_argument("phi_k: drifts must be strictly increasing");
  }
  std::vector<PathFn> out{paths[0]};
  for (std::size_t i = 1; i < paths.size(); ++i) {
    PathFn h = paths[i];
    for (std::size_t a = i; a-- > 0;) {
      PhiRecord rec;
      h = phi(paths[a], h, drifts[i] - drifts[a], rng, opt, &rec);
      if (tails) tails->push_back(rec.tail);
    }
    out.push_back(std::move(h));
  }
  return out;
}

enum class ShMode {
  automatic,   // exact_pair for k <= 2, long_grid otherwise
  exact_pair,  // exponential tail and bridge maxima; exact in law for k <= 2
  long_grid,   // grid extended left, node sups only, no tail draw
};

inline std::string to_string(ShMode m) {
  switch (m) {
    case ShMode::automatic: return "automatic";
    case ShMode::exact_pair: return "exact_pair";
    case ShMode::long_grid: return "long_grid";
  }
  return "?";
}

struct ShOptions {
  ShMode mode = ShMode::automatic;
  double left_extension = 32;
};

struct SHSample {
  std::vector<double> drifts;
  std::vector<PathFn> lines;
  ShMode mode = ShMode::automatic;  // resolved mode
  double left_extension = 0;
  std::vector<double> tail_draws;
};

inline SHSample sample_sh(std::span<const double> drifts, const Grid& grid, Rng& rng, const ShOptions& opt = {}) {
  grid.validate();
  if (drifts.empty()) throw std::invalid_argument("sample_sh: no drifts");
  for (std::size_t i = 1; i < drifts.size(); ++i) {
    if (!(drifts[i] > drifts[i - 1])) throw std::invalid_argument("sample_sh: drifts must be strictly increasing");
  }
  ShMode mode = opt.mode;
  if (mode == ShMode::automatic) mode = drifts.size() <= 2 ? ShMode::exact_pair : ShMode::long_grid;
  if (mode == ShMode::exact_pair && drifts.size() > 2) {
    throw std::invalid_argument("sample_sh: exact_pair mode supports at most two drifts");
  }
  Grid g = grid;
  double ext = 0;
  PhiOptions po{true, true};
  if (mode == ShMode::long_grid) {
    if (opt.left_extension < 0) throw std::invalid_argument("sample_sh: negative left extension");
    ext = std::ceil(opt.left_extension / grid.step - 1e-9) * grid.step;
    g.x_lo -= ext;
    po = PhiOptions{false, false};
  }
  std::vector<PathFn> fs;
  for (double mu : drifts) fs.push_back(sample_bm(BrownianSpec{mu, g}, rng));
  SHSample s;
  s.drifts.assign(drifts.begin(), drifts.end());
  s.mode = mode;
  s.left_extension = ext;
  auto lines = phi_k(fs, drifts, rng, po, &s.tail_draws);
  std::size_t skip = static_cast<std::size_t>(std::llround(ext / grid.step));
  for (auto& l : lines) {
    std::vector<double> v(l.values().begin() + static_cast<std::ptrdiff_t>(skip), l.values().end());
    s.lines.emplace_back(grid.x_lo, grid.step, std::move(v));
  }
  return s;
}

inline SHSample sample_sh(std::span<const double> drifts, const Grid& grid, std::uint64_t seed,
                          const ShOptions& opt = {}) {
  Rng rng = make_rng(seed);
  return sample_sh(drifts, grid, rng, opt);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// log P(Z > t), accurate in the far tail.
inline double log_norm_sf(double t) {
  if (t < 25) return std::log(0.5 * std::erfc(t / std::numbers::sqrt2));
  double t2 = t * t;
  return -0.5 * t2 - std::log(t) - 0.5 * std::log(2 * std::numbers::pi) + std::log1p(-1 / t2 + 3 / (t2 * t2));
}

// P(G_{mu0+mu}(-x, x) - G_{mu0}(-x, x) <= z), where G(a, b) = G(b) - G(a). The difference of the
// two lines is (S - M)^+ with S the running max over [-x, x] of a BM with drift nu = 2 mu and
// variance 4, and M ~ Exp(nu / 2) the sup to the left; integrating gives the closed form below.
inline double diff_cdf(double z, double x, double mu) {
  if (!(z >= 0 && x > 0 && mu > 0)) throw std::domain_error("diff_cdf: need z >= 0, x > 0, mu > 0");
  double nu = 2 * mu;
  double s = 2 * std::sqrt(2 * x);
  double c = z + 2 * nu * x;
  double first = norm_cdf((z - 2 * nu * x) / s);
  double lead = nu * z / 2;
  double second = (1 + nu * z / 2 + nu * nu * x) * std::exp(lead + log_norm_sf(c / s));
  double third = nu * std::sqrt(x / std::numbers::pi) * std::exp(lead - c * c / (16 * x));
  return std::clamp(first + second - third, 0.0, 1.0);
}

// diff_cdf extended to the whole line, and its left limit (the law has an atom at 0).
inline double diff_cdf_right(double z, double x, double mu) { return z < 0 ? 0 : diff_cdf(z, x, mu); }
inline double diff_cdf_left(double z, double x, double mu) { return z <= 0 ? 0 : diff_cdf(z, x, mu); }

// (hi(x) - hi(-x)) - (lo(x) - lo(-x)), with rounding noise around the atom at 0 removed.
inline double increment_difference(const PathFn& lo, const PathFn& hi, double x) {
  double d = (hi(x) - hi(-x)) - (lo(x) - lo(-x));
  return std::abs(d) < 1e-9 ? 0.0 : d;
}

// Mean number of jumps of mu -> G_mu on [alpha, beta] visible on [x, y].
inline double expected_jumps(double alpha, double beta, double x, double y) {
  if (alpha > beta || x > y) throw std::domain_error("expected_jumps: need alpha <= beta and x <= y");
  return 2 * std::sqrt(2 / std::numbers::pi) * (beta - alpha) * std::sqrt(y - x);
}

}  // namespace tasep
