// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "tasep/verify.hpp"

using namespace tasep;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool passed;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string failed_names(const std::vector<TestReport>& rs) {
  std::string s;
  for (const auto& r : rs) {
    if (!r.passed) s += (s.empty() ? "" : ";") + r.name;
  }
  return s.empty() ? "none" : s;
}

bool run(int id, const std::string& name, double budget_s, const std::function<Outcome()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double t = seconds_since(t0);
  bool ok = o.passed && t < budget_s;
  std::printf("%s criterion %d (%s): %s time=%.1fs budget=%.0fs\n", ok ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), t, budget_s);
  std::fflush(stdout);
  return ok;
}

Outcome exact_identities() {
  auto rs = exact_suites(kSeed, ExactOptions{1000, 200, 8});
  std::ostringstream os;
  bool ok = true;
  for (const auto& r : rs) {
    os << r.name << "=" << r.statistic << "/" << r.metadata.at("exhaustive_cases") << "+" << r.metadata.at("random_cases")
       << " ";
    ok &= r.passed;
  }
  os << "(mismatches/exhaustive+random)";
  return {ok, os.str()};
}

Outcome burke() {
  auto rs = burke_suite(0.5, 0.05, 100000, 50, kSeed);
  std::ostringstream os;
  os << rs.size() << " checks, failed: " << failed_names(rs) << ", departure z=" << rs[0].statistic
     << ", q_final chi2 p=" << rs[2].p_value.value_or(-1);
  return {all_passed(rs), os.str()};
}

Outcome sh_self_consistency() {
  Grid g{-1, 1, 1.0 / 1024};
  auto r = sh_two_point_check(0, 1, 1, 10000, kSeed, g, ShOptions{ShMode::long_grid, 32}, 0.02);
  std::ostringstream os;
  os << "KS=" << r.report.statistic << " < 0.02 (long_grid, step 2^-10, left extension 32)";
  return {r.report.passed, os.str()};
}

Outcome fdd_surrogate() {
  std::vector<double> ks;
  bool marg_ok = false, two_ok = false;
  std::ostringstream os;
  for (std::uint64_t N : {1000ull, 10000ull, 100000ull}) {
    FddOptions o;
    o.cross_validate = false;
    auto r = fdd_suite({0.0, 1.0}, N, {1.0}, 10000, kSeed, o);
    double two = 0;
    bool marg = true;
    for (const auto& rep : r.reports) {
      if (rep.name.rfind("fdd-fm/marginal", 0) == 0) {
        marg &= rep.p_value.value() > 0.01;
        if (N == 10000) os << "marginal p=" << *rep.p_value << " ";
      } else {
        two = rep.statistic;
      }
    }
    ks.push_back(two);
    if (N == 10000) {
      marg_ok = marg;
      two_ok = two <= 0.05;
    }
  }
  bool trend = ks[1] < ks[0] && ks[2] < ks[1];
  os << "two-point KS by N=1e3,1e4,1e5: " << ks[0] << "," << ks[1] << "," << ks[2] << " (a)=" << marg_ok
     << " (b)=" << two_ok << " (c)=" << trend;
  return {marg_ok && two_ok && trend, os.str()};
}

Outcome jump_count() {
  auto r = jumps_suite(-1, 1, 0.01, 10000, 1, 1000, kSeed, 0.10);
  std::ostringstream os;
  os << "mean=" << r.mean << " target=" << r.target << " rel.err=" << r.report.statistic
     << " finite-N expectation=" << r.finite_n_expectation;
  return {r.report.passed, os.str()};
}

Outcome speed_process() {
  auto r = speed_projection_suite({-0.5, 0.0, 0.5}, 2000, 1000, 100, kSeed);
  bool ok = true;
  std::vector<TestReport> proj;
  std::ostringstream os;
  for (const auto& rep : r.reports) {
    if (rep.name == "speed/uniform-marginal") {
      ok &= rep.statistic < 0.05;
      os << "uniform KS=" << rep.statistic << " ";
    } else if (rep.name.rfind("projection/", 0) == 0) {
      ok &= rep.passed;
      proj.push_back(rep);
    } else {
      os << rep.name << " p=" << rep.p_value.value_or(-1) << " (info) ";
    }
  }
  double min_p = 1;
  for (const auto& p : proj) min_p = std::min(min_p, p.p_value.value_or(1));
  os << proj.size() << " projection tests, min p=" << min_p << ", failed: " << failed_names(proj);
  return {ok, os.str()};
}

Outcome stationarity() {
  auto r = stationarity_probe(DensityVector({0.3, 0.2, 0.1}), 4000, 2000, 50, kSeed);
  std::ostringstream os;
  os << r.metadata.at("statistics") << " statistics, min p=" << r.p_value.value() << " floor=" << r.threshold
     << " worst=" << r.metadata.at("worst");
  return {r.passed, os.str()};
}

// Each statistical suite under a configuration where its null hypothesis holds exactly,
// at reduced sizes, over 100 seeds.
Outcome null_calibration() {
  const int seeds = 100;
  int burke_ok = 0, fdd_ok = 0, stat_ok = 0, proj_ok = 0;
  for (int s = 1; s <= seeds; ++s) {
    auto seed = derive_seed(kSeed, "null-calibration", static_cast<std::uint64_t>(s));
    burke_ok += all_passed(burke_suite(0.5, 0.05, 5000, 20, seed));
    FddOptions fo;
    fo.fm_leg = false;
    fo.sh_reps = 2000;
    fo.sh_step = 1.0 / 128;
    fo.sh_two_point_ks = 0.05;
    fdd_ok += all_passed(fdd_suite({0.0, 1.0}, 1000, {0.5, 1.0}, 2000, seed, fo).reports);
    stat_ok += stationarity_probe(DensityVector({0.3, 0.2, 0.1}), 400, 100, 20, seed).passed;
    SpeedOptions so;
    so.null_mode = true;
    proj_ok += all_passed(speed_projection_suite({-0.5, 0.0, 0.5}, 500, 1000, 40, seed, so).reports);
  }
  std::ostringstream os;
  os << "passes/100: burke=" << burke_ok << " fdd(sh leg)=" << fdd_ok << " stationarity=" << stat_ok
     << " projection(null mode)=" << proj_ok << " (need >= 98 each)";
  bool ok = burke_ok >= 98 && fdd_ok >= 98 && stat_ok >= 98 && proj_ok >= 98;
  return {ok, os.str()};
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run(1, "exact identities", 60, exact_identities);
  ok &= run(2, "Burke property", 60, burke);
  ok &= run(3, "SH sampler self-consistency", 600, sh_self_consistency);
  ok &= run(4, "finite-dimensional convergence surrogate", 1800, fdd_surrogate);
  ok &= run(5, "jump count", 1200, jump_count);
  ok &= run(6, "speed process", 1800, speed_process);
  ok &= run(7, "stationarity", 600, stationarity);
  ok &= run(8, "null calibration", 1800, null_calibration);
  std::printf("%s acceptance\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
