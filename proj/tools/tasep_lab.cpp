#include <boost/version.hpp>

#include <CLI11.hpp>
#include <cstring>
#include <iostream>
#include <json.hpp>

#include "tasep/io.hpp"
#include "tasep/verify.hpp"

#ifndef TASEP_LAB_VERSION
#define TASEP_LAB_VERSION "0.0.0"
#endif

namespace {

using namespace tasep;
using nlohmann::json;
namespace fs = std::filesystem;

// Every parameter of every command. Zero or negative sentinels mean "command default" and are
// resolved before dispatch, so manifests always hold the values actually used.
struct Config {
  std::uint64_t seed = 1;
  std::string out = "out";
  unsigned threads = 0;
  std::size_t reps = 0;

  double alpha = 0.5;
  double beta = 0.05;
  std::size_t n = 100000;
  bool stationary_init = true;
  std::vector<double> lambdas{0.3, 0.2, 0.1};
  Index lo = 0;
  Index hi = 99;
  bool reflect = false;
  std::size_t exhaustive_len = 8;
  std::size_t max_len = 200;
  std::size_t random_reps = 1000;

  std::vector<double> drifts;
  std::vector<std::uint64_t> N{10000};
  std::vector<double> x{1.0};
  double x0 = 1;
  double grid_lo = -8;
  double grid_hi = 8;
  double step = 1.0 / 1024;
  std::string mode = "automatic";
  double left_extension = 32;
  std::size_t sh_reps = 0;
  double ks_cap = 0;
  double drift_lo = -1;
  double drift_hi = 1;
  double drift_step = 0.01;
  double tolerance = 0.1;

  std::size_t L = 0;
  double T = -1;
  std::string direction = "left";
  std::vector<double> cutoffs{-0.5, 0.0, 0.5};
  bool null_mode = false;
  bool quick = false;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Config, seed, out, threads, reps, alpha, beta, n, stationary_init,
                                                lambdas, lo, hi, reflect, exhaustive_len, max_len, random_reps, drifts,
                                                N, x, x0, grid_lo, grid_hi, step, mode, left_extension, sh_reps, ks_cap,
                                                drift_lo, drift_hi, drift_step, tolerance, L, T, direction, cutoffs,
                                                null_mode, quick)

struct Run {
  std::string command;
  fs::path dir;
  std::vector<std::string> outputs;
  std::vector<TestReport> reports;
  bool has_reports = false;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return dir / name;
  }
  void add(std::vector<TestReport> rs) {
    has_reports = true;
    for (auto& r : rs) {
      std::cout << "  " << summary_line(r) << "\n";
      reports.push_back(std::move(r));
    }
  }
};

ShMode parse_mode(const std::string& s) {
  if (s == "automatic") return ShMode::automatic;
  if (s == "exact_pair") return ShMode::exact_pair;
  if (s == "long_grid") return ShMode::long_grid;
  throw std::invalid_argument("mode must be automatic, exact_pair or long_grid");
}

Direction parse_direction(const std::string& s) {
  if (s == "left") return Direction::left;
  if (s == "right") return Direction::right;
  throw std::invalid_argument("direction must be left or right");
}

template <class T>
void fallback(T& v, const T& unset, const T& def) {
  if (v == unset) v = def;
}

json versions() {
  return {{"tasep-lab", TASEP_LAB_VERSION},   {"compiler", __VERSION__}, {"cplusplus", __cplusplus},
          {"boost", BOOST_LIB_VERSION},       {"nlohmann_json", "3.11.3"}, {"cli11", CLI11_VERSION}};
}

// Writes reports.json and manifest.json; returns the exit status.
int finish(Run& run, const Config& c) {
  bool ok = all_passed(run.reports);
  if (run.has_reports) io::write_json(run.file("reports.json"), io::reports_json(run.reports));
  json m;
  m["command"] = run.command;
  m["config"] = c;
  m["seeds"] = {{"seed", c.seed},
                {"derivation", "replicate r of experiment e uses splitmix64(splitmix64(splitmix64(seed) ^ fnv1a(e)) + r)"}};
  m["versions"] = versions();
  m["outputs"] = run.outputs;
  if (run.has_reports) m["all_passed"] = ok;
  io::write_json(run.dir / "manifest.json", m);
  return ok ? 0 : 1;
}

// ---- sample ----

void sample_inputs(Config& c, Run& run) {
  DensityVector lam(c.lambdas);
  auto xs = tasep::sample_inputs(lam, Window(c.lo, c.hi), derive_seed(c.seed, "sample-inputs"));
  std::vector<std::string> header{"i"};
  for (std::size_t j = 1; j <= xs.size(); ++j) header.push_back("x" + std::to_string(j));
  io::CsvWriter w(run.file("inputs.csv"), header);
  for (Index i = c.lo; i <= c.hi; ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (const auto& x : xs) row.push_back(std::to_string(x[i]));
    w.row(row);
  }
}

void sample_fm(Config& c, Run& run) {
  DensityVector lam(c.lambdas);
  auto s = tasep::sample_fm(lam, Window(c.lo, c.hi), derive_seed(c.seed, "sample-fm"));
  MultiClassSeq v = c.reflect ? tasep::reflect(s.v) : s.v;
  io::CsvWriter w(run.file("fm.csv"), {"i", "label"});
  for (Index i = v.lo(); i <= v.hi(); ++i) w.row(std::vector<std::string>{std::to_string(i), io::label_text(v[i])});
}

void sample_sh(Config& c, Run& run) {
  if (c.drifts.empty()) c.drifts = {-0.5, 0.0, 0.5};
  Grid g{c.grid_lo, c.grid_hi, c.step};
  ShOptions o{parse_mode(c.mode), c.left_extension};
  auto s = tasep::sample_sh(c.drifts, g, derive_seed(c.seed, "sample-sh"), o);
  std::vector<std::string> names;
  for (double mu : s.drifts) names.push_back("G[" + io::fmt(mu) + "]");
  io::write_paths(run.file("sh.csv"), s.lines, names);
  io::write_json(run.file("sh.json"), {{"drifts", s.drifts},
                                       {"mode", to_string(s.mode)},
                                       {"left_extension", s.left_extension},
                                       {"grid", {{"x_lo", g.x_lo}, {"x_hi", g.x_hi}, {"step", g.step}}},
                                       {"tail_draws", s.tail_draws}});
}

void sample_speed(Config& c, Run& run) {
  fallback<std::size_t>(c.L, 0, 2000);
  fallback(c.T, -1.0, 1000.0);
  auto est = speed_process_estimate(c.L, c.T, derive_seed(c.seed, "sample-speed"));
  io::CsvWriter w(run.file("speed.csv"), {"particle", "u_hat"});
  for (const auto& e : est) w.row(std::vector<std::string>{std::to_string(e.site), io::fmt(e.u)});
}

// ---- verify ----

ExactOptions exact_options(const Config& c) { return ExactOptions{c.random_reps, c.max_len, c.exhaustive_len}; }

void verify_burke(Config& c, Run& run) {
  fallback<std::size_t>(c.reps, 0, 50);
  BurkeOptions o;
  o.stationary_init = c.stationary_init;
  o.threads = c.threads;
  run.add(burke_suite(c.alpha, c.beta, c.n, c.reps, c.seed, o));
}

void verify_stationarity(Config& c, Run& run) {
  fallback<std::size_t>(c.L, 0, 4000);
  fallback(c.T, -1.0, 2000.0);
  fallback<std::size_t>(c.reps, 0, 50);
  StationarityOptions o{parse_direction(c.direction), 0.01, c.threads};
  std::vector<TestReport> details;
  auto r = stationarity_probe(DensityVector(c.lambdas), c.L, c.T, c.reps, c.seed, o, &details);
  run.add({r});
  io::write_json(run.file("details.json"), io::reports_json(details));
}

void verify_projection(Config& c, Run& run) {
  fallback<std::size_t>(c.L, 0, 2000);
  fallback(c.T, -1.0, 1000.0);
  fallback<std::size_t>(c.reps, 0, 100);
  SpeedOptions o;
  o.null_mode = c.null_mode;
  o.threads = c.threads;
  auto r = speed_projection_suite(c.cutoffs, c.L, c.T, c.reps, c.seed, o);
  if (!c.null_mode) {
    io::write_cdf_overlay(run.file("speed_cdf.csv"), r.speeds, io::linspace(-1.2, 1.2, 241),
                          [](double u) { return std::clamp((u + 1) / 2, 0.0, 1.0); });
  }
  run.add(std::move(r.reports));
}

// ---- converge ----

void fdd_overlays(Run& run, const std::string& tag, const FddData& d, const std::vector<double>& drifts) {
  for (std::size_t i = 0; i < d.xs.size(); ++i) {
    double x = d.xs[i];
    if (x == 0) continue;
    for (std::size_t j = 0; j < drifts.size(); ++j) {
      double m = 2 * drifts[j] * x, sd = std::sqrt(2 * std::abs(x));
      io::write_cdf_overlay(run.file(tag + "_marginal_line" + std::to_string(j + 1) + "_x" + std::to_string(i) + ".csv"),
                            d.marginal[j][i], io::linspace(m - 4 * sd, m + 4 * sd, 201),
                            [=](double z) { return stats::normal_cdf((z - m) / sd); });
    }
    for (std::size_t j = 0; j + 1 < drifts.size(); ++j) {
      double mu = drifts[j + 1] - drifts[j], ax = std::abs(x);
      const auto& v = d.two_point[j][i];
      double top = std::max(1.0, *std::max_element(v.begin(), v.end()));
      io::write_cdf_overlay(run.file(tag + "_two_point_pair" + std::to_string(j + 1) + "_x" + std::to_string(i) + ".csv"), v,
                            io::linspace(0, top, 201), [=](double z) { return diff_cdf_right(z, ax, mu); });
    }
  }
}

void converge_fdd(Config& c, Run& run) {
  if (c.drifts.empty()) c.drifts = {0.0, 1.0};
  fallback<std::size_t>(c.reps, 0, 10000);
  fallback<std::size_t>(c.sh_reps, 0, c.reps);
  if (c.N.empty()) throw std::invalid_argument("converge fdd: need at least one N");
  double sh_hi = 0;
  for (double x : c.x) sh_hi = std::max(sh_hi, std::abs(x));
  std::map<std::string, std::vector<double>> trend;
  for (std::size_t k = 0; k < c.N.size(); ++k) {
    std::uint64_t N = c.N[k];
    FddOptions o;
    o.threads = c.threads;
    o.cross_validate = k == 0;
    o.sh_reps = c.sh_reps;
    if (c.ks_cap > 0) o.two_point_ks = c.ks_cap;
    auto r = fdd_suite(c.drifts, N, c.x, c.reps, c.seed, o);
    std::string tag = "N" + std::to_string(N);
    fdd_overlays(run, tag + "_fm", r.fm, c.drifts);
    if (o.cross_validate) fdd_overlays(run, "sh", r.sh, c.drifts);
    // Rep 0 of the FM leg, and one SH draw on a matching grid, as line overlays.
    ScalingParams p{N, c.drifts, sh_hi};
    auto lines = h_n_lines_from_fm(p, derive_seed(c.seed, "fdd-fm", 0));
    std::vector<std::string> names;
    for (double mu : c.drifts) names.push_back("H[" + io::fmt(mu) + "]");
    io::write_paths(run.file(tag + "_fm_lines.csv"), lines, names);
    for (auto& rep : r.reports) {
      rep.name += "@N=" + std::to_string(N);
      if (rep.name.rfind("fdd-fm/two-point", 0) == 0) {
        trend[rep.name.substr(0, rep.name.find("@"))].push_back(rep.statistic);
      }
    }
    run.add(std::move(r.reports));
  }
  {
    Grid g{-std::ceil(sh_hi * 256) / 256, std::ceil(sh_hi * 256) / 256, 1.0 / 256};
    auto s = tasep::sample_sh(c.drifts, g, derive_seed(c.seed, "fdd-sh", 0));
    std::vector<std::string> names;
    for (double mu : c.drifts) names.push_back("G[" + io::fmt(mu) + "]");
    io::write_paths(run.file("sh_lines.csv"), s.lines, names);
  }
  if (c.N.size() >= 2) {
    std::vector<TestReport> rs;
    for (const auto& [name, ks] : trend) {
      std::size_t ups = 0;
      for (std::size_t i = 1; i < ks.size(); ++i) ups += !(ks[i] < ks[i - 1]);
      TestReport t = TestReport::from_stat("fdd-trend/" + name.substr(std::strlen("fdd-fm/")), static_cast<double>(ups), 0);
      std::ostringstream os;
      for (std::size_t i = 0; i < ks.size(); ++i) os << (i ? "," : "") << io::fmt(ks[i]);
      t.with("ks_by_N", os.str());
      rs.push_back(std::move(t));
    }
    run.add(std::move(rs));
  }
}

void converge_jumps(Config& c, Run& run) {
  fallback<std::size_t>(c.reps, 0, 1000);
  if (c.N.empty()) throw std::invalid_argument("converge jumps: need N");
  auto r = jumps_suite(c.drift_lo, c.drift_hi, c.drift_step, c.N[0], c.x0, c.reps, c.seed, c.tolerance, c.threads);
  io::CsvWriter w(run.file("counts.csv"), {"replicate", "count"});
  for (std::size_t i = 0; i < r.counts.size(); ++i) w.row(std::vector<std::string>{std::to_string(i), io::fmt(r.counts[i])});
  run.add({r.report});
}

using Handler = void (*)(Config&, Run&);

int execute(const std::string& command, Handler h, Config c, const fs::path& dir) {
  Run run{command, dir, {}, {}, false};
  fs::create_directories(dir);
  std::cout << command << " -> " << dir.string() << "\n";
  int status = 0;
  try {
    h(c, run);
    status = finish(run, c);
  } catch (...) {
    // Keep whatever was written, and a manifest naming it.
    finish(run, c);
    throw;
  }
  return status;
}

// Acceptance-sized runs of every command; --quick shrinks them for smoke testing.
int run_all(const Config& base) {
  struct Item {
    std::string command;
    std::string dir;
    Handler h;
    std::function<void(Config&)> size;
  };
  bool q = base.quick;
  std::vector<Item> items{
      {"verify interchange", "interchange", [](Config& c, Run& r) { r.add({interchange_suite(c.seed, exact_options(c))}); },
       [q](Config& c) { if (q) c.exhaustive_len = 5, c.random_reps = 200; }},
      {"verify lemma-cl", "lemma-cl", [](Config& c, Run& r) { r.add({lemma_cl_suite(c.seed, exact_options(c))}); },
       [q](Config& c) { if (q) c.exhaustive_len = 5, c.random_reps = 200; }},
      {"verify minplus", "minplus", [](Config& c, Run& r) { r.add({minplus_suite(c.seed, exact_options(c))}); },
       [q](Config& c) { if (q) c.exhaustive_len = 5, c.random_reps = 200; }},
      {"verify walk-oracle", "walk-oracle", [](Config& c, Run& r) { r.add({walk_oracle_suite(c.seed, exact_options(c))}); },
       [q](Config& c) { if (q) c.exhaustive_len = 5, c.random_reps = 200; }},
      {"verify monotone", "monotone", [](Config& c, Run& r) { r.add({monotonicity_suite(c.seed, exact_options(c))}); },
       [q](Config& c) { if (q) c.exhaustive_len = 5, c.random_reps = 200; }},
      {"verify burke", "burke", verify_burke,
       [q](Config& c) { c.alpha = 0.5, c.beta = 0.05, c.n = q ? 20000 : 100000, c.reps = q ? 20 : 50; }},
      {"converge fdd", "fdd", converge_fdd,
       [q](Config& c) {
         c.drifts = {0.0, 1.0}, c.x = {1.0}, c.reps = q ? 2000 : 10000;
         c.N = q ? std::vector<std::uint64_t>{1000, 10000} : std::vector<std::uint64_t>{1000, 10000, 100000};
         if (q) c.ks_cap = 0.06;
       }},
      {"converge jumps", "jumps", converge_jumps,
       [q](Config& c) { c.N = {q ? 1000u : 10000u}, c.drift_step = q ? 0.1 : 0.01, c.reps = q ? 200 : 1000, c.tolerance = q ? 0.15 : 0.1; }},
      {"verify projection", "projection", verify_projection,
       [q](Config& c) { c.L = q ? 400 : 2000, c.T = q ? 200 : 1000, c.reps = q ? 40 : 100; }},
      {"verify stationarity", "stationarity", verify_stationarity,
       [q](Config& c) { c.lambdas = {0.3, 0.2, 0.1}, c.L = q ? 400 : 4000, c.T = q ? 200 : 2000, c.reps = q ? 20 : 50; }},
  };
  json summary = json::array();
  bool ok = true;
  for (const auto& it : items) {
    Config c = base;
    c.out = (fs::path(base.out) / it.dir).string();
    it.size(c);
    int s = execute(it.command, it.h, c, c.out);
    ok &= s == 0;
    summary.push_back({{"command", it.command}, {"dir", it.dir}, {"passed", s == 0}});
  }
  json m{{"command", "run-all"}, {"config", base}, {"runs", summary}, {"versions", versions()}, {"all_passed", ok}};
  io::write_json(fs::path(base.out) / "manifest.json", m);
  std::cout << (ok ? "run-all: all suites passed\n" : "run-all: some suites failed\n");
  return ok ? 0 : 1;
}

// --config may name a flat config object or a manifest written by a previous run.
Config load_config(int argc, char** argv) {
  Config c;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i], path;
    if (a == "--config" && i + 1 < argc) {
      path = argv[i + 1];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    }
    if (path.empty()) continue;
    json j = io::read_json(path);
    c = (j.contains("config") ? j["config"] : j).get<Config>();
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  try {
    cfg = load_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  }
  std::string config_path;
  CLI::App app{"Multiclass TASEP, queueing and stationary horizon experiments"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", cfg.seed, "top-level seed")->capture_default_str();
    s->add_option("--out", cfg.out, "output directory")->capture_default_str();
    s->add_option("--threads", cfg.threads, "workers (0: TASEP_LAB_THREADS or all cores)")->capture_default_str();
    s->add_option("--config", config_path, "JSON config or manifest; flags override it");
  };
  auto vec = [](CLI::App* s, const std::string& name, auto& v, const std::string& help) {
    s->add_option(name, v, help)->delimiter(',')->allow_extra_args(false)->capture_default_str();
  };
  auto exact = [&](CLI::App* s) {
    s->add_option("--exhaustive-len", cfg.exhaustive_len, "exhaustive input length")->capture_default_str();
    s->add_option("--max-len", cfg.max_len, "random instance length bound")->capture_default_str();
    s->add_option("--random-reps", cfg.random_reps, "random instances")->capture_default_str();
  };

  std::string chosen;
  Handler handler = nullptr;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, Handler h) {
    auto* s = parent->add_subcommand(name, help);
    common(s);
    s->callback([&, name, parent, h] {
      chosen = parent->get_name() + " " + name;
      handler = h;
    });
    return s;
  };

  auto* sample = app.add_subcommand("sample", "draw samples")->require_subcommand(1);
  auto* verify = app.add_subcommand("verify", "run a verification suite")->require_subcommand(1);
  auto* converge = app.add_subcommand("converge", "finite-N convergence experiments")->require_subcommand(1);

  auto* s_in = leaf(sample, "inputs", "independent Bernoulli input streams", sample_inputs);
  vec(s_in, "--lambdas", cfg.lambdas, "class densities");
  s_in->add_option("--lo", cfg.lo)->capture_default_str();
  s_in->add_option("--hi", cfg.hi)->capture_default_str();

  auto* s_fm = leaf(sample, "fm", "exact multiclass stationary sample (left jumps)", sample_fm);
  vec(s_fm, "--lambdas", cfg.lambdas, "class densities");
  s_fm->add_option("--lo", cfg.lo)->capture_default_str();
  s_fm->add_option("--hi", cfg.hi)->capture_default_str();
  s_fm->add_flag("--reflect", cfg.reflect, "reflect to the right-jump stationary law");

  auto* s_sh = leaf(sample, "sh", "stationary horizon lines on a grid", sample_sh);
  vec(s_sh, "--drifts", cfg.drifts, "increasing drifts (default -0.5,0,0.5)");
  s_sh->add_option("--x-lo", cfg.grid_lo)->capture_default_str();
  s_sh->add_option("--x-hi", cfg.grid_hi)->capture_default_str();
  s_sh->add_option("--step", cfg.step)->capture_default_str();
  s_sh->add_option("--mode", cfg.mode, "automatic, exact_pair or long_grid")->capture_default_str();
  s_sh->add_option("--left-extension", cfg.left_extension)->capture_default_str();

  auto* s_sp = leaf(sample, "speed", "speed-process estimates", sample_speed);
  s_sp->add_option("--L", cfg.L, "particles reported (default 2000)");
  s_sp->add_option("--T", cfg.T, "time horizon (default 1000)");

  auto* v_b = leaf(verify, "burke", "stationary queue output test", verify_burke);
  v_b->add_option("--alpha", cfg.alpha)->capture_default_str();
  v_b->add_option("--beta", cfg.beta)->capture_default_str();
  v_b->add_option("--n", cfg.n)->capture_default_str();
  v_b->add_option("--reps", cfg.reps, "replicates (default 50)");
  v_b->add_flag("!--empty-init", cfg.stationary_init, "start from an empty queue (negative control)");

  for (auto [name, h] : std::vector<std::pair<std::string, Handler>>{
           {"interchange", [](Config& c, Run& r) { r.add({interchange_suite(c.seed, exact_options(c))}); }},
           {"lemma-cl", [](Config& c, Run& r) { r.add({lemma_cl_suite(c.seed, exact_options(c))}); }},
           {"minplus", [](Config& c, Run& r) { r.add({minplus_suite(c.seed, exact_options(c))}); }},
           {"walk-oracle", [](Config& c, Run& r) { r.add({walk_oracle_suite(c.seed, exact_options(c))}); }},
           {"monotone", [](Config& c, Run& r) { r.add({monotonicity_suite(c.seed, exact_options(c))}); }}}) {
    exact(leaf(verify, name, "exact identity suite", h));
  }

  auto* v_st = leaf(verify, "stationarity", "time-0 vs time-T statistics from the exact sampler", verify_stationarity);
  vec(v_st, "--lambdas", cfg.lambdas, "class densities");
  v_st->add_option("--L", cfg.L, "ring size (default 4000)");
  v_st->add_option("--T", cfg.T, "time (default 2000)");
  v_st->add_option("--reps", cfg.reps, "replicates (default 50)");
  v_st->add_option("--direction", cfg.direction, "left or right")->capture_default_str();

  auto* v_pr = leaf(verify, "projection", "speed marginal and projected speeds vs the stationary law", verify_projection);
  vec(v_pr, "--cutoffs", cfg.cutoffs, "increasing cutoffs in (-1, 1]");
  v_pr->add_option("--L", cfg.L, "particles (default 2000)");
  v_pr->add_option("--T", cfg.T, "time (default 1000)");
  v_pr->add_option("--reps", cfg.reps, "replicates (default 100)");
  v_pr->add_flag("--null", cfg.null_mode, "replace speeds by an independent stationary sample");

  auto* c_f = leaf(converge, "fdd", "finite-N lines against the limit law", converge_fdd);
  vec(c_f, "--N", cfg.N, "one or more N; several add a trend check");
  vec(c_f, "--drifts", cfg.drifts, "increasing drifts (default 0,1)");
  vec(c_f, "--x", cfg.x, "evaluation points");
  c_f->add_option("--reps", cfg.reps, "replicates (default 10000)");
  c_f->add_option("--sh-reps", cfg.sh_reps, "replicates of the SH leg (default reps)");
  c_f->add_option("--ks-cap", cfg.ks_cap, "two-point KS allowance (default 0.05)");

  auto* c_j = leaf(converge, "jumps", "jump count of the drift family", converge_jumps);
  vec(c_j, "--N", cfg.N, "N");
  c_j->add_option("--drift-lo", cfg.drift_lo)->capture_default_str();
  c_j->add_option("--drift-hi", cfg.drift_hi)->capture_default_str();
  c_j->add_option("--drift-step", cfg.drift_step)->capture_default_str();
  c_j->add_option("--x0", cfg.x0)->capture_default_str();
  c_j->add_option("--reps", cfg.reps, "replicates (default 1000)");
  c_j->add_option("--tolerance", cfg.tolerance, "relative tolerance")->capture_default_str();

  auto* all = app.add_subcommand("run-all", "every suite at acceptance sizes");
  common(all);
  all->add_flag("--quick", cfg.quick, "reduced sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (all->parsed()) return run_all(cfg);
    return execute(chosen, handler, cfg, cfg.out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
