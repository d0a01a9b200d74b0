#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "report.hpp"
#include "seqcore.hpp"

namespace tasep::io {

namespace fs = std::filesystem;

// Shortest round-trip text for a double; fixed so reruns produce identical bytes.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

inline std::string label_text(Label l) { return l == kHole ? "H" : std::to_string(l); }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : path_(path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    out_.open(path, std::ios::binary);
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << fmt(cells[i]);
    out_ << '\n';
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream out_;
};

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

inline nlohmann::json reports_json(const std::vector<TestReport>& rs) {
  nlohmann::json j = nlohmann::json::object();
  j["all_passed"] = all_passed(rs);
  j["reports"] = rs;
  return j;
}

// Empirical CDF of xs at the given points alongside a theoretical curve.
template <class Cdf>
inline void write_cdf_overlay(const fs::path& path, std::vector<double> xs, const std::vector<double>& zs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  CsvWriter w(path, {"z", "empirical", "theoretical"});
  for (double z : zs) {
    auto k = std::upper_bound(xs.begin(), xs.end(), z) - xs.begin();
    w.row(std::vector<double>{z, static_cast<double>(k) / static_cast<double>(xs.size()), cdf(z)});
  }
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// Paths sharing a grid, one column per path.
inline void write_paths(const fs::path& path, const std::vector<PathFn>& lines, const std::vector<std::string>& names) {
  if (lines.empty()) throw std::invalid_argument("write_paths: no lines");
  std::vector<std::string> header{"x"};
  header.insert(header.end(), names.begin(), names.end());
  CsvWriter w(path, header);
  for (std::size_t k = 0; k < lines[0].size(); ++k) {
    std::vector<double> row{lines[0].x(k)};
    for (const auto& l : lines) row.push_back(l.value(k));
    w.row(row);
  }
}

}  // namespace tasep::io
