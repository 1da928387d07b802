#include "hpeig/hpeig.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kSolver = 3, kCheck = 4 };

int exit_code(hpeig_status s)
{
  switch (s) {
  case HPEIG_OK: return kOk;
  case HPEIG_ERR_CONFIG: return kConfig;
  case HPEIG_ERR_SOLVER:
  case HPEIG_ERR_ARGUMENT: return kSolver;
  default: return kOther;
  }
}

int report(hpeig_status s)
{
  std::fprintf(stderr, "error: %s\n", hpeig_last_error());
  return exit_code(s);
}

using Study = std::unique_ptr<hpeig_study, decltype(&hpeig_study_free)>;

int load(const std::string& path, Study& out)
{
  hpeig_study* s = nullptr;
  if (const auto st = hpeig_study_load(path.c_str(), &s); st != HPEIG_OK)
    return report(st);
  out.reset(s);
  return kOk;
}

int cmd_list()
{
  for (int i = 0; i < hpeig_problem_count(); ++i)
    std::printf("%-20s %s\n", hpeig_problem_key(i), hpeig_problem_description(i));
  return kOk;
}

int cmd_verify()
{
  const auto t0 = std::chrono::steady_clock::now();
  const hpeig_reference_check* checks = nullptr;
  int n = 0;
  if (const auto st = hpeig_verify_references(&checks, &n); st != HPEIG_OK)
    return report(st);
  int failed = 0;
  for (int i = 0; i < n; ++i) {
    const auto& c = checks[i];
    std::printf("%-4s %-40s computed %.17g  expected %.17g  rel %.2e (tol %.0e)\n", c.pass ? "ok" : "FAIL",
                c.name, c.computed, c.expected, c.relative_error, c.tolerance);
    failed += !c.pass;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/%d checks passed in %.2f s\n", n - failed, n, secs);
  return failed ? kCheck : kOk;
}

int cmd_run(const std::string& config, const std::string& out, const std::string& vtk_dir, bool no_timing)
{
  Study study(nullptr, &hpeig_study_free);
  if (const int rc = load(config, study))
    return rc;
  const auto st = hpeig_study_run(study.get(), out.c_str(), vtk_dir.empty() ? nullptr : vtk_dir.c_str(),
                                  no_timing ? 0 : 1);
  const int steps = hpeig_study_num_steps(study.get());
  if (steps > 0) {
    hpeig_step_info last{};
    hpeig_study_step(study.get(), steps - 1, &last);
    std::printf("%s: %d steps, %d dofs, estimate %.3e, error %.3e\n", hpeig_study_problem(study.get()), steps,
                last.dofs, last.total_est, last.total_err);
  }
  if (st != HPEIG_OK) {
    if (steps > 0)
      std::fprintf(stderr, "partial results (%d steps) kept in %s\n", steps, out.c_str());
    return report(st);
  }
  return kOk;
}

int cmd_oracle(const std::string& config, const std::string& out)
{
  Study study(nullptr, &hpeig_study_free);
  if (const int rc = load(config, study))
    return rc;
  if (const auto st = hpeig_study_oracle(study.get()); st != HPEIG_OK)
    return report(st);

  const int m = hpeig_study_cluster_size(study.get());
  nlohmann::json doc;
  doc["problem"] = hpeig_study_problem(study.get());
  doc["cluster"] = m;
  auto& levels = doc["levels"] = nlohmann::json::array();
  bool ok = true;
  for (int l = 0; l < hpeig_study_oracle_levels(study.get()); ++l) {
    hpeig_oracle_level L{};
    hpeig_study_oracle_level(study.get(), l, &L);
    std::vector<double> eta2(m);
    hpeig_study_oracle_eta2(study.get(), l, eta2.data(), m);
    const bool sandwich = L.sandwich_lower >= -1e-10 && L.sandwich_upper >= -1e-10;
    ok = ok && sandwich && (!L.has_theorem || L.lower_bound_holds);
    nlohmann::json j = {
        {"step", L.step},
        {"dofs", L.dofs},
        {"fine_dofs", L.fine_dofs},
        {"eta2", eta2},
        {"eta2_sum", L.eta2_sum},
        {"frak_D", L.frak_d},
        {"identity_defect", L.identity_defect},
        {"sandwich", {{"lower_slack", L.sandwich_lower}, {"upper_slack", L.sandwich_upper}, {"holds", sandwich}}},
        {"sin_theta_hs", L.sin_theta},
        {"estimate", L.estimate},
        {"sin_theta_over_sqrt_estimate", L.sin_ratio},
        {"total_err", L.total_err},
    };
    if (L.has_theorem) {
      j["theorem"] = {
          {"hypothesis", {{"holds", L.hypothesis != 0}, {"lhs", L.hypothesis_lhs}, {"rhs", L.hypothesis_rhs}}},
          {"rel_error_sum", L.rel_error_sum},
          {"lower_bound", L.lower_bound},
          {"lower_bound_holds", L.lower_bound_holds != 0},
          {"ratio_defined", L.ratio_defined != 0},
          {"ratio", L.ratio},
      };
    }
    levels.push_back(std::move(j));
  }
  doc["all_checks_pass"] = ok;

  const std::string text = doc.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!(f << text)) {
      std::fprintf(stderr, "error: cannot write %s\n", out.c_str());
      return kOther;
    }
  }
  return ok ? kOk : kCheck;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"hp-adaptive finite element eigenvalue studies"};
  app.set_version_flag("--version", std::string(hpeig_version()));
  app.require_subcommand(1);

  std::string config, out, vtk_dir;
  bool no_timing = false;

  auto* run = app.add_subcommand("run", "adaptive study, one CSV row per step");
  run->add_option("--config", config, "study configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "CSV output path")->required();
  run->add_option("--vtk-dir", vtk_dir, "write one VTK file per step into this directory");
  run->add_flag("--no-timing", no_timing, "write 0 in the seconds column (byte-reproducible output)");

  app.add_subcommand("verify-references", "cross-check the built-in reference spectra");

  auto* oracle = app.add_subcommand("oracle-check", "defect oracle report as JSON");
  oracle->add_option("--config", config, "study configuration")->required()->check(CLI::ExistingFile);
  oracle->add_option("--out", out, "JSON output path (default stdout)");

  app.add_subcommand("list-problems", "print the built-in problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  if (*run)
    return cmd_run(config, out, vtk_dir, no_timing);
  if (*oracle)
    return cmd_oracle(config, out);
  if (app.got_subcommand("verify-references"))
    return cmd_verify();
  return cmd_list();
}
