#include "dampflow/suite.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

namespace dampflow {

namespace {

std::string lambda_tag(double lam) {
  std::ostringstream os;
  os << "lam";
  if (lam < 0) os << 'm';
  double a = std::abs(lam);
  if (a == static_cast<long>(a))
    os << static_cast<long>(a);
  else
    os << static_cast<long>(a) << 'p' << static_cast<long>(std::round(10 * a)) % 10;
  return os.str();
}

ScenarioConfig base_sine(double gamma, double K, double alpha, double lambda) {
  ScenarioConfig c;
  c.params = {gamma, K, alpha, lambda, 2.0};
  c.grid = {0.0, 1.0, 128, Boundary::periodic};
  c.profile.kind = Profile::Kind::sine;
  c.profile.tau_bar = 1.0;
  c.profile.u_amp = 0.05;
  c.profile.wavenumber = 1;
  c.horizon = 1.0;
  c.snapshot_cadence = 0.25;
  return c;
}

ScenarioConfig base_pulse(double gamma, double K, double alpha, double lambda,
                          double slope) {
  ScenarioConfig c;
  c.params = {gamma, K, alpha, lambda, 2.0};
  c.grid = {-2.0, 2.0, 256, Boundary::periodic};
  c.profile.kind = Profile::Kind::compression_pulse;
  c.profile.tau_bar = 1.0;
  c.profile.slope = slope;
  c.profile.width = 0.5;
  c.profile.x0 = 0.0;
  c.horizon = 1.0;
  c.snapshot_cadence = 0.25;
  return c;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"smoke", "regimes_gamma_lt3", "regimes_gamma_gt3", "gamma_eq_3",
          "classical_limit"};
}

std::vector<ScenarioConfig> suite_scenarios(const std::string& suite_name) {
  std::vector<ScenarioConfig> out;
  if (suite_name == "smoke") {
    for (double gamma : {2.0, 3.0, 5.0}) {
      ScenarioConfig c;
      c.params = {gamma, gamma == 3.0 ? 1.0 / 3.0 : 1.0, 0.5, 0.5, 2.0};
      c.grid = {0.0, 1.0, 64, Boundary::periodic};
      c.profile.kind = Profile::Kind::constant;
      c.profile.tau_bar = 1.0;
      c.profile.u_mean = 0.1;
      c.horizon = 0.5;
      c.snapshot_cadence = 0.25;
      std::ostringstream n;
      n << "smoke_gamma" << static_cast<int>(gamma);
      c.name = n.str();
      out.push_back(c);
    }
  } else if (suite_name == "regimes_gamma_lt3") {
    for (double lam : {-1.0, 0.0, 0.5, 2.0}) {
      auto s = base_sine(2.0, 1.0, 0.5, lam);
      s.name = "lt3_" + lambda_tag(lam) + "_sine";
      out.push_back(s);
      auto p = base_pulse(2.0, 1.0, 0.5, lam, 0.5);
      p.name = "lt3_" + lambda_tag(lam) + "_pulse";
      out.push_back(p);
    }
  } else if (suite_name == "gamma_eq_3") {
    for (double lam : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
      auto s = base_sine(3.0, 1.0 / 3.0, 0.5, lam);
      s.name = "eq3_" + lambda_tag(lam) + "_sine";
      out.push_back(s);
      if (lam != 1.0) {
        auto p = base_pulse(3.0, 1.0 / 3.0, 0.5, lam, 0.5);
        p.name = "eq3_" + lambda_tag(lam) + "_pulse";
        out.push_back(p);
      }
    }
  } else if (suite_name == "regimes_gamma_gt3") {
    for (double lam : {0.0, 0.8, 2.0}) {
      auto s = base_sine(5.0, 1.0, 0.4, lam);
      s.name = "gt3_" + lambda_tag(lam) + "_sine";
      out.push_back(s);
    }
    auto p = base_pulse(5.0, 1.0, 0.4, 2.0, 0.5);
    p.name = "gt3_lam2_pulse";
    out.push_back(p);
  } else if (suite_name == "classical_limit") {
    auto s = base_sine(2.0, 1.0, 0.0, 0.0);
    s.name = "euler_sine";
    out.push_back(s);
    auto r = base_pulse(2.0, 1.0, 0.0, 0.0, 0.5);
    r.name = "euler_rarefaction";
    out.push_back(r);
    auto b = base_pulse(2.0, 1.0, 0.0, 0.0, -2.0);
    b.grid.n_cells = 4096;
    b.horizon = 2.0;
    b.name = "euler_blowup";
    out.push_back(b);
  } else {
    throw config_error("unknown suite: " + suite_name);
  }
  return out;
}

SuiteOutcome run_suite(const std::string& suite_name,
                       const std::string& out_dir, int workers) {
  const auto scenarios = suite_scenarios(suite_name);
  if (workers <= 0) {
    if (const char* env = std::getenv("DAMPFLOW_WORKERS"))
      workers = std::atoi(env);
    if (workers <= 0)
      workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 2;
  }
  workers = std::min<int>(workers, static_cast<int>(scenarios.size()));

  std::mutex mu;
  std::vector<std::string> lines(scenarios.size());
  std::vector<int> codes(scenarios.size(), 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scenarios.size()) return;
      const auto& cfg = scenarios[i];
      const std::string dir =
          (std::filesystem::path(out_dir) / cfg.name).string();
      std::string line;
      int code = 0;
      try {
        BoundReport rep = execute_scenario(cfg, dir);
        const bool ok = rep.all_applicable_pass();
        code = ok ? 0 : 1;
        line = cfg.name + ": " + (ok ? "pass" : "FAIL");
        for (const auto& c : rep.checks)
          line += "  [" + c.name + " " + check_status_name(c.status) + "]";
      } catch (const config_error& e) {
        code = 2;
        line = cfg.name + ": CONFIG ERROR " + e.what();
      } catch (const std::exception& e) {
        code = 3;
        line = cfg.name + ": ABORT " + e.what();
      }
      std::lock_guard<std::mutex> lk(mu);
      lines[i] = line;
      codes[i] = code;
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  SuiteOutcome outc;
  for (const auto& l : lines) outc.summary += l + "\n";
  for (int want : {2, 3, 1})
    for (int c : codes)
      if (c == want && outc.exit_code == 0) outc.exit_code = want;
  return outc;
}

}  // namespace dampflow
