#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tasep {

using Index = std::int64_t;
using Label = std::uint32_t;

// The empty site. Compares above every class label.
inline constexpr Label kHole = std::numeric_limits<Label>::max();

struct Window {
  Index lo = 0;
  Index hi = 0;

  Window() = default;
  Window(Index lo_, Index hi_) : lo(lo_), hi(hi_) {
    if (lo > hi) throw std::invalid_argument("window: lo > hi");
  }
  std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
  bool contains(Index i) const { return lo <= i && i <= hi; }
  bool operator==(const Window&) const = default;
};

class BinarySeq {
 public:
  BinarySeq() : lo_(0), bits_(1, 0) {}
  BinarySeq(Index lo, std::vector<std::uint8_t> bits) : lo_(lo), bits_(std::move(bits)) {
    if (bits_.empty()) throw std::invalid_argument("BinarySeq: empty window");
    for (auto& b : bits_) {
      if (b > 1) throw std::invalid_argument("BinarySeq: bits must be 0 or 1");
    }
  }
  // Parses "101100" placed at lo.
  static BinarySeq from_string(const std::string& s, Index lo = 0) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("BinarySeq: bad character");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BinarySeq(lo, std::move(bits));
  }
  static BinarySeq zeros(Window w) { return BinarySeq(w.lo, std::vector<std::uint8_t>(w.size(), 0)); }
  static BinarySeq ones(Window w) { return BinarySeq(w.lo, std::vector<std::uint8_t>(w.size(), 1)); }

  Index lo() const { return lo_; }
  Index hi() const { return lo_ + static_cast<Index>(bits_.size()) - 1; }
  Window window() const { return Window(lo(), hi()); }
  std::size_t size() const { return bits_.size(); }
  bool contains(Index i) const { return lo_ <= i && i <= hi(); }

  // Unchecked access by absolute index.
  std::uint8_t operator[](Index i) const { return bits_[static_cast<std::size_t>(i - lo_)]; }
  std::uint8_t at(Index i) const {
    if (!contains(i)) throw std::out_of_range("BinarySeq: index " + std::to_string(i) + " outside window");
    return (*this)[i];
  }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::string to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t k = 0; k < bits_.size(); ++k) s[k] = static_cast<char>('0' + bits_[k]);
    return s;
  }

  bool operator==(const BinarySeq&) const = default;

 private:
  Index lo_;
  std::vector<std::uint8_t> bits_;
};

class MultiClassSeq {
 public:
  MultiClassSeq() : lo_(0), labels_(1, kHole), m_(1) {}
  MultiClassSeq(Index lo, std::vector<Label> labels, Label num_classes)
      : lo_(lo), labels_(std::move(labels)), m_(num_classes) {
    if (labels_.empty()) throw std::invalid_argument("MultiClassSeq: empty window");
    if (m_ < 1 || m_ == kHole) throw std::invalid_argument("MultiClassSeq: num_classes must be positive");
    for (Label l : labels_) {
      if (l != kHole && (l < 1 || l > m_)) {
        throw std::invalid_argument("MultiClassSeq: label " + std::to_string(l) + " outside [1, m]");
      }
    }
  }
  // Class 1 at ones, HOLE at zeros.
  static MultiClassSeq from_bits(const BinarySeq& x) {
    std::vector<Label> labels(x.size());
    auto b = x.bits();
    for (std::size_t k = 0; k < labels.size(); ++k) labels[k] = b[k] ? 1 : kHole;
    return MultiClassSeq(x.lo(), std::move(labels), 1);
  }

  Index lo() const { return lo_; }
  Index hi() const { return lo_ + static_cast<Index>(labels_.size()) - 1; }
  Window window() const { return Window(lo(), hi()); }
  std::size_t size() const { return labels_.size(); }
  Label num_classes() const { return m_; }
  bool contains(Index i) const { return lo_ <= i && i <= hi(); }

  Label operator[](Index i) const { return labels_[static_cast<std::size_t>(i - lo_)]; }
  Label at(Index i) const {
    if (!contains(i)) throw std::out_of_range("MultiClassSeq: index " + std::to_string(i) + " outside window");
    return (*this)[i];
  }
  std::span<const Label> labels() const { return labels_; }

  bool operator==(const MultiClassSeq&) const = default;

 private:
  Index lo_;
  std::vector<Label> labels_;
  Label m_;
};

// Piecewise-linear function on the uniform grid x_lo + k*step.
class PathFn {
 public:
  PathFn() : x_lo_(0), step_(1), values_{0, 0} {}
  PathFn(double x_lo, double step, std::vector<double> values)
      : x_lo_(x_lo), step_(step), values_(std::move(values)) {
    if (!(step_ > 0)) throw std::invalid_argument("PathFn: step must be positive");
    if (values_.size() < 2) throw std::invalid_argument("PathFn: need at least two grid points");
  }
  // Checks that (x_hi - x_lo)/step is a positive integer matching values.size()-1.
  PathFn(double x_lo, double x_hi, double step, std::vector<double> values) : PathFn(x_lo, step, std::move(values)) {
    double cells = (x_hi - x_lo) / step;
    double r = std::round(cells);
    if (r < 1 || std::abs(cells - r) > 1e-9 * std::max(1.0, r)) {
      throw std::invalid_argument("PathFn: (x_hi - x_lo)/step is not a positive integer");
    }
    if (static_cast<std::size_t>(r) + 1 != values_.size()) {
      throw std::invalid_argument("PathFn: values length does not match grid");
    }
  }

  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_lo_ + step_ * static_cast<double>(values_.size() - 1); }
  double step() const { return step_; }
  std::size_t size() const { return values_.size(); }
  double x(std::size_t k) const { return x_lo_ + step_ * static_cast<double>(k); }
  std::span<const double> values() const { return values_; }
  double value(std::size_t k) const { return values_[k]; }

  bool covers(double a, double b) const {
    double tol = 1e-9 * std::max(1.0, std::abs(step_));
    return x_lo_ <= a + tol && b <= x_hi() + tol;
  }

  double operator()(double x) const {
    double t = (x - x_lo_) / step_;
    double n = static_cast<double>(values_.size() - 1);
    if (t < -1e-9 || t > n + 1e-9) throw std::out_of_range("PathFn: evaluation outside grid");
    t = std::clamp(t, 0.0, n);
    double kf = std::floor(t);
    auto k = static_cast<std::size_t>(kf);
    if (k >= values_.size() - 1) return values_.back();
    double w = t - kf;
    if (w < 1e-12) return values_[k];
    return values_[k] + w * (values_[k + 1] - values_[k]);
  }

  bool operator==(const PathFn&) const = default;

 private:
  double x_lo_;
  double step_;
  std::vector<double> values_;
};

inline void require_same_window(const BinarySeq& a, const BinarySeq& b, const char* what) {
  if (a.window() != b.window()) throw std::invalid_argument(std::string(what) + ": window mismatch");
}

// Number of ones in positions i..j; i == j+1 is the empty interval.
inline std::uint64_t count(const BinarySeq& x, Index i, Index j) {
  if (i == j + 1) return 0;
  if (i > j || !x.contains(i) || !x.contains(j)) throw std::out_of_range("count: interval outside window");
  auto b = x.bits();
  std::uint64_t c = 0;
  for (Index k = i; k <= j; ++k) c += b[static_cast<std::size_t>(k - x.lo())];
  return c;
}

// P(0) = 0, P(i+1) - P(i) = 2 eta(i) - 1, defined on [lo, hi+1].
inline PathFn height_map(const BinarySeq& eta) {
  if (!eta.contains(0)) throw std::invalid_argument("height_map: window must contain 0");
  std::vector<double> v(eta.size() + 1);
  auto b = eta.bits();
  std::size_t zero = static_cast<std::size_t>(-eta.lo());
  v[zero] = 0;
  for (std::size_t k = zero; k < b.size(); ++k) v[k + 1] = v[k] + (b[k] ? 1.0 : -1.0);
  for (std::size_t k = zero; k-- > 0;) v[k] = v[k + 1] - (b[k] ? 1.0 : -1.0);
  return PathFn(static_cast<double>(eta.lo()), 1.0, std::move(v));
}

inline BinarySeq indicator_leq(const MultiClassSeq& v, Label k) {
  if (k < 1 || k > v.num_classes()) throw std::out_of_range("indicator_leq: class outside [1, m]");
  auto l = v.labels();
  std::vector<std::uint8_t> bits(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) bits[i] = l[i] <= k ? 1 : 0;
  return BinarySeq(v.lo(), std::move(bits));
}

// Sequences: out(i) = in(-i-1). Paths: out(x) = -in(-x).
inline BinarySeq reflect(const BinarySeq& x) {
  std::vector<std::uint8_t> bits(x.bits().rbegin(), x.bits().rend());
  return BinarySeq(-x.hi() - 1, std::move(bits));
}

inline MultiClassSeq reflect(const MultiClassSeq& x) {
  std::vector<Label> labels(x.labels().rbegin(), x.labels().rend());
  return MultiClassSeq(-x.hi() - 1, std::move(labels), x.num_classes());
}

inline PathFn reflect(const PathFn& f) {
  std::vector<double> v(f.size());
  auto src = f.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = -src[src.size() - 1 - k];
  return PathFn(-f.x_hi(), f.step(), std::move(v));
}

// Sorted union of both grids' nodes inside [a, b], plus a and b.
inline std::vector<double> merged_nodes(const PathFn& f, const PathFn& g, double a, double b) {
  std::vector<double> xs{a, b};
  for (const PathFn* p : {&f, &g}) {
    double k0 = std::ceil((a - p->x_lo()) / p->step() - 1e-9);
    double k1 = std::floor((b - p->x_lo()) / p->step() + 1e-9);
    for (double k = std::max(0.0, k0); k <= k1 && k < static_cast<double>(p->size()); k += 1) {
      xs.push_back(std::clamp(p->x_lo() + k * p->step(), a, b));
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

inline double metric_dn(const PathFn& f, const PathFn& g, double n) {
  if (!(n > 0)) throw std::invalid_argument("metric_dn: n must be positive");
  if (!f.covers(-n, n) || !g.covers(-n, n)) throw std::invalid_argument("metric_dn: paths do not cover [-n, n]");
  double d = 0;
  for (double x : merged_nodes(f, g, -n, n)) d = std::max(d, std::abs(f(x) - g(x)));
  return d;
}

}  // namespace tasep
