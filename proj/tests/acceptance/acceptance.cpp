// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status 4 if
// any selected criterion fails. Usage: acceptance [criterion ...]

#include "hpeig/error.hpp"
#include "hpeig/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace hpeig;

namespace {

// steps whose total relative error is above the roundoff floor
constexpr double kResolved = 1e-12;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string config_path(const char* name)
{
  return std::string(HPEIG_CONFIG_DIR) + "/" + name;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string printf_str(const char* f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Fit {
  double slope = 0.0;
  double r2 = 0.0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

struct Run {
  std::vector<StepRecord> records;
  double seconds = 0.0;
};

// adaptive runs are shared between criteria
Run& run(const char* config)
{
  static std::map<std::string, Run> cache;
  auto it = cache.find(config);
  if (it == cache.end()) {
    const auto t0 = std::chrono::steady_clock::now();
    Run r;
    r.records = run_study(load_config(config_path(config)), {});
    r.seconds = seconds_since(t0);
    it = cache.emplace(config, std::move(r)).first;
  }
  return it->second;
}

std::vector<const StepRecord*> resolved(const std::vector<StepRecord>& records)
{
  std::vector<const StepRecord*> out;
  for (const auto& r : records)
    if (r.total_err >= kResolved)
      out.push_back(&r);
  return out;
}

// final error, exponential fit of the resolved part, runtime
Result exponential_convergence(const Run& r, double limit_seconds)
{
  const auto& last = r.records.back();
  const auto res = resolved(r.records);
  std::vector<double> x, y;
  for (const auto* s : res) {
    x.push_back(std::sqrt(static_cast<double>(s->dofs)));
    y.push_back(std::log(s->total_err));
  }
  const Fit fit = res.size() >= 3 ? linear_fit(x, y) : Fit{};
  Result out;
  out.pass = last.dofs >= 30000 && last.total_err <= 1e-7 && res.size() >= 3 && fit.r2 >= 0.9 &&
             fit.slope < 0 && r.seconds <= limit_seconds;
  out.detail = printf_str("%d dofs, final error %.2e, R^2 %.3f over %zu resolved steps, %.0f s", last.dofs,
                          last.total_err, fit.r2, res.size(), r.seconds);
  return out;
}

Result criterion1()
{
  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = verify_references();
  const double secs = seconds_since(t0);
  int disk = 0, circle = 0, failed = 0;
  for (const auto& c : checks) {
    failed += !c.pass;
    if (c.pass && c.name.rfind("slit_disk", 0) == 0 && c.tolerance <= 1e-11)
      ++disk;
    if (c.pass && c.name.rfind("slit_circle_second", 0) == 0 && c.tolerance <= 1e-15)
      ++circle;
  }
  return {disk == 6 && circle == 1 && failed == 0 && secs < 5.0,
          printf_str("%d/6 slit-disk roots, pi^2 %s, %zu/%zu checks, %.2f s", disk, circle ? "ok" : "FAILED",
                     checks.size() - failed, checks.size(), secs)};
}

Result criterion2()
{
  return exponential_convergence(run("square.cfg"), 120.0);
}

Result criterion3()
{
  const Run& r = run("triangle.cfg");
  Result out = exponential_convergence(r, 120.0);
  // spread of the per-eigenvalue errors (clamped at roundoff) on resolved steps
  double worst = 0.0;
  int worst_step = -1;
  for (const auto* s : resolved(r.records)) {
    double lo = INFINITY, hi = 0.0;
    for (Eigen::Index i = 0; i < s->relerr.size(); ++i) {
      const double e = std::max(s->relerr[i], 1e-15);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    const double spread = std::log10(hi / lo);
    if (spread > worst) {
      worst = spread;
      worst_step = s->step;
    }
  }
  out.pass = out.pass && worst <= 1.0;
  out.detail += printf_str("; per-eigenvalue spread max %.2f decades (step %d), limit 1", worst, worst_step);
  return out;
}

Result criterion4()
{
  const Run& hp = run("slit_square.cfg");
  const Run& uni = run("slit_square_uniform.cfg");
  const auto& last = hp.records.back();
  bool dominant = true;
  int first_bad = -1;
  for (const auto& s : hp.records) {
    for (int i : {0, 2, 3})
      if (!(s.relerr[1] > s.relerr[i]) && dominant) {
        dominant = false;
        first_bad = s.step;
      }
  }
  std::vector<double> x, y;
  for (const auto& s : uni.records) {
    x.push_back(std::log(static_cast<double>(s.dofs)));
    y.push_back(std::log(s.relerr[1]));
  }
  const Fit fit = linear_fit(x, y);
  const double rate = -fit.slope;
  const double secs = hp.seconds + uni.seconds;
  Result out;
  out.pass = last.relerr[1] <= 1e-5 && dominant && rate >= 0.35 && rate <= 0.75 && secs <= 300.0;
  out.detail = printf_str("lambda_2 error %.2e at %d dofs, relerr_2 dominant %s, uniform p=1 rate %.3f "
                          "(%d to %d dofs), %.0f s",
                          last.relerr[1], last.dofs,
                          dominant ? "at every step" : ("FAILS at step " + std::to_string(first_bad)).c_str(),
                          rate, uni.records.front().dofs, uni.records.back().dofs, secs);
  return out;
}

Result criterion5()
{
  const Run& react = run("reaction_kappa10.cfg");
  const Run& diff = run("diffusion_a100.cfg");
  auto worst = [](const Run& r) { return r.records.back().relerr.cwiseAbs().maxCoeff(); };
  const double er = worst(react), ed = worst(diff);
  return {er <= 1e-6 && ed <= 1e-5 && react.seconds <= 300.0 && diff.seconds <= 300.0,
          printf_str("reaction kappa=10 max error %.2e (%.0f s), diffusion a=100 max error %.2e (%.0f s)", er,
                     react.seconds, ed, diff.seconds)};
}

Result criterion6()
{
  Result out{true, ""};
  for (const char* cfg : {"square.cfg", "triangle.cfg"}) {
    const auto res = resolved(run(cfg).records);
    double lo = INFINITY, hi = 0.0, worst_drift = 0.0;
    bool drift_ok = res.size() >= 2;
    for (std::size_t k = 0; k < res.size(); ++k) {
      lo = std::min(lo, res[k]->effectivity);
      hi = std::max(hi, res[k]->effectivity);
      if (k == 0)
        continue;
      const double r = res[k]->effectivity / res[k - 1]->effectivity;
      const double drift = std::max(r, 1.0 / r);
      const double growth = static_cast<double>(res[k]->max_degree) / res[k - 1]->max_degree;
      const double bound = 2.0 * growth * growth * growth;
      worst_drift = std::max(worst_drift, drift / bound);
      drift_ok = drift_ok && drift <= bound;
    }
    const bool band_ok = lo > 0 && hi / lo <= 100.0;
    out.pass = out.pass && band_ok && drift_ok;
    out.detail += printf_str("%s%s effectivity in [%.3g, %.3g] (%.2f decades), drift/bound max %.2f",
                             out.detail.empty() ? "" : "; ", cfg, lo, hi, std::log10(hi / lo), worst_drift);
  }
  return out;
}

Result criterion7()
{
  const auto t0 = std::chrono::steady_clock::now();
  const auto levels = oracle_study(load_config(config_path("oracle_square_uniform.cfg")));
  const double secs = seconds_since(t0);
  bool ok = levels.size() == 3;
  double worst = INFINITY;
  for (const auto& l : levels) {
    ok = ok && l.sandwich.holds(1e-10) && l.theorem && l.theorem->lower_bound_holds;
    worst = std::min({worst, l.sandwich.lower, l.sandwich.upper});
  }
  return {ok && secs <= 60.0,
          printf_str("%zu levels, min sandwich slack %.2e, lower bound %s, %.1f s", levels.size(), worst,
                     ok ? "holds at every level" : "VIOLATED", secs)};
}

const std::vector<OracleLevel>& hp_oracle()
{
  static const auto levels = oracle_study(load_config(config_path("oracle_square_hp.cfg")));
  return levels;
}

Result criterion8()
{
  const auto& levels = hp_oracle();
  const OracleLevel* finest = nullptr;
  for (const auto& l : levels)
    if (l.theorem && l.theorem->ratio_defined)
      finest = &l;
  if (!finest)
    return {false, "no oracle level with a resolved error"};
  const double q = finest->theorem->ratio;
  return {q >= 0.5 && q <= 2.0, printf_str("ratio %.4f at step %d (%d dofs), finest resolved oracle level",
                                           q, finest->step, finest->dofs)};
}

Result criterion9()
{
  const auto& levels = hp_oracle();
  if (levels.size() < 2)
    return {false, "fewer than two oracle levels"};
  bool monotone = true;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (k > 0 && levels[k].sin_theta > 1.1 * levels[k - 1].sin_theta)
      monotone = false;
    lo = std::min(lo, levels[k].sin_ratio);
    hi = std::max(hi, levels[k].sin_ratio);
  }
  return {monotone && hi / lo <= 10.0,
          printf_str("%zu levels, sin theta %.2e -> %.2e %s, sin/sqrt(est) in [%.3g, %.3g] (%.2f decades)",
                     levels.size(), levels.front().sin_theta, levels.back().sin_theta,
                     monotone ? "monotone" : "NOT monotone", lo, hi, std::log10(hi / lo))};
}

} // namespace

int main(int argc, char** argv)
{
  const std::vector<std::function<Result()>> criteria = {criterion1, criterion2, criterion3,
                                                         criterion4, criterion5, criterion6,
                                                         criterion7, criterion8, criterion9};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    selected.insert(c);
  }
  if (selected.empty())
    for (int c = 1; c <= static_cast<int>(criteria.size()); ++c)
      selected.insert(c);

  int failed = 0;
  for (int c : selected) {
    Result r;
    try {
      r = criteria[c - 1]();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("criterion %d: %s  %s\n", c, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 4 : 0;
}
