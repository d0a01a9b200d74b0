#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace tasep {

struct TestReport {
  std::string name;
  double statistic = 0;
  double threshold = 0;
  std::optional<double> p_value;
  bool passed = false;
  std::map<std::string, std::string> metadata;

  // Passes iff p > floor.
  static TestReport from_p(std::string name, double statistic, double p, double floor) {
    return TestReport{std::move(name), statistic, floor, p, p > floor, {}};
  }
  // Passes iff statistic <= threshold.
  static TestReport from_stat(std::string name, double statistic, double threshold) {
    return TestReport{std::move(name), statistic, threshold, std::nullopt, statistic <= threshold, {}};
  }

  template <class T>
  TestReport& with(const std::string& key, const T& value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    metadata[key] = os.str();
    return *this;
  }
};

inline bool all_passed(const std::vector<TestReport>& rs) {
  for (const auto& r : rs) {
    if (!r.passed) return false;
  }
  return true;
}

inline void to_json(nlohmann::json& j, const TestReport& r) {
  j = nlohmann::json{{"name", r.name}, {"statistic", r.statistic}, {"threshold", r.threshold},
                     {"passed", r.passed}, {"metadata", r.metadata}};
  j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
}

inline std::string summary_line(const TestReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << (r.passed ? "PASS " : "FAIL ") << r.name << "  stat=" << r.statistic;
  if (r.p_value) {
    os << "  p=" << *r.p_value << "  floor=" << r.threshold;
  } else {
    os << "  threshold=" << r.threshold;
  }
  return os.str();
}

}  // namespace tasep
