#include "hpeig/hpeig.h"

#include "hpeig/error.hpp"
#include "hpeig/runner.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>
#include <vector>

struct hpeig_study {
  hpeig::StudyConfig config;
  std::vector<hpeig::StepRecord> records;
  std::vector<hpeig::OracleLevel> oracle;
};

namespace {

thread_local std::string last_error;
thread_local std::vector<hpeig_reference_check> reference_checks;

hpeig_status fail(hpeig_status s, const std::string& msg)
{
  last_error = msg;
  return s;
}

template <class F>
hpeig_status guarded(F&& f)
{
  try {
    last_error.clear();
    f();
    return HPEIG_OK;
  } catch (const hpeig::ConfigError& e) {
    return fail(HPEIG_ERR_CONFIG, e.what());
  } catch (const hpeig::SolverError& e) {
    return fail(HPEIG_ERR_SOLVER, e.what());
  } catch (const hpeig::ArgumentError& e) {
    return fail(HPEIG_ERR_ARGUMENT, e.what());
  } catch (const hpeig::Error& e) {
    return fail(HPEIG_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HPEIG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HPEIG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HPEIG_ERR_INTERNAL, "unknown error");
  }
}

const std::vector<hpeig::ProblemInfo>& problems()
{
  static const auto list = hpeig::registry_problems();
  return list;
}

hpeig_status copy_column(const hpeig_study* study, int step, double* out, int n,
                         const Eigen::VectorXd hpeig::StepRecord::*member)
{
  if (!study || !out)
    return fail(HPEIG_ERR_ARGUMENT, "null argument");
  if (step < 0 || step >= static_cast<int>(study->records.size()))
    return fail(HPEIG_ERR_ARGUMENT, "step out of range");
  const Eigen::VectorXd& v = study->records[step].*member;
  if (n != v.size())
    return fail(HPEIG_ERR_ARGUMENT, "buffer length must equal the cluster size");
  for (int i = 0; i < n; ++i)
    out[i] = v[i];
  return HPEIG_OK;
}

hpeig_status make_study(hpeig_study** out, hpeig::StudyConfig cfg)
{
  *out = new hpeig_study{std::move(cfg), {}, {}};
  return HPEIG_OK;
}

} // namespace

extern "C" {

const char* hpeig_last_error(void) { return last_error.c_str(); }

const char* hpeig_version(void) { return "1.0.0"; }

int hpeig_problem_count(void) { return static_cast<int>(problems().size()); }

const char* hpeig_problem_key(int i)
{
  return i >= 0 && i < hpeig_problem_count() ? problems()[i].key.c_str() : nullptr;
}

const char* hpeig_problem_description(int i)
{
  return i >= 0 && i < hpeig_problem_count() ? problems()[i].description.c_str() : nullptr;
}

hpeig_status hpeig_verify_references(const hpeig_reference_check** checks, int* count)
{
  if (!checks || !count)
    return fail(HPEIG_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    reference_checks.clear();
    for (const auto& c : hpeig::verify_references()) {
      hpeig_reference_check r{};
      std::strncpy(r.name, c.name.c_str(), sizeof r.name - 1);
      r.computed = c.computed;
      r.expected = c.expected;
      r.relative_error = c.relative_error;
      r.tolerance = c.tolerance;
      r.pass = c.pass ? 1 : 0;
      reference_checks.push_back(r);
    }
    *checks = reference_checks.data();
    *count = static_cast<int>(reference_checks.size());
  });
}

hpeig_status hpeig_bessel_j(double nu, double x, double* out)
{
  if (!out)
    return fail(HPEIG_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = hpeig::bessel_j(nu, x); });
}

hpeig_status hpeig_bessel_root(double nu, int m, double* out)
{
  if (!out)
    return fail(HPEIG_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = hpeig::bessel_root(nu, m); });
}

hpeig_status hpeig_study_load(const char* path, hpeig_study** out)
{
  if (!path || !out)
    return fail(HPEIG_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { make_study(out, hpeig::load_config(path)); });
}

hpeig_status hpeig_study_parse(const char* text, hpeig_study** out)
{
  if (!text || !out)
    return fail(HPEIG_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { make_study(out, hpeig::parse_config(text)); });
}

void hpeig_study_free(hpeig_study* study) { delete study; }

int hpeig_study_cluster_size(const hpeig_study* study)
{
  return study ? study->config.problem.cluster : 0;
}

const char* hpeig_study_problem(const hpeig_study* study)
{
  return study ? study->config.problem.name.c_str() : nullptr;
}

hpeig_status hpeig_study_run(hpeig_study* study, const char* csv_path, const char* vtk_dir, int timing)
{
  if (!study)
    return fail(HPEIG_ERR_ARGUMENT, "null study");
  study->records.clear();
  hpeig::RunOptions opt{csv_path ? csv_path : "", vtk_dir ? vtk_dir : "", timing != 0};
  return guarded([&] { hpeig::run_study(study->config, opt, study->records); });
}

int hpeig_study_num_steps(const hpeig_study* study)
{
  return study ? static_cast<int>(study->records.size()) : 0;
}

hpeig_status hpeig_study_step(const hpeig_study* study, int step, hpeig_step_info* out)
{
  if (!study || !out)
    return fail(HPEIG_ERR_ARGUMENT, "null argument");
  if (step < 0 || step >= hpeig_study_num_steps(study))
    return fail(HPEIG_ERR_ARGUMENT, "step out of range");
  const auto& r = study->records[step];
  *out = hpeig_step_info{r.step,      r.dofs,      r.elements,    r.max_degree, r.gamma_degree,
                         r.total_est, r.total_err, r.effectivity, r.seconds};
  return HPEIG_OK;
}

hpeig_status hpeig_study_lambda(const hpeig_study* study, int step, double* out, int n)
{
  return copy_column(study, step, out, n, &hpeig::StepRecord::lambda);
}

hpeig_status hpeig_study_relerr(const hpeig_study* study, int step, double* out, int n)
{
  return copy_column(study, step, out, n, &hpeig::StepRecord::relerr);
}

hpeig_status hpeig_study_eps2(const hpeig_study* study, int step, double* out, int n)
{
  return copy_column(study, step, out, n, &hpeig::StepRecord::eps2);
}

hpeig_status hpeig_study_oracle(hpeig_study* study)
{
  if (!study)
    return fail(HPEIG_ERR_ARGUMENT, "null study");
  study->oracle.clear();
  return guarded([&] { study->oracle = hpeig::oracle_study(study->config); });
}

int hpeig_study_oracle_levels(const hpeig_study* study)
{
  return study ? static_cast<int>(study->oracle.size()) : 0;
}

hpeig_status hpeig_study_oracle_level(const hpeig_study* study, int level, hpeig_oracle_level* out)
{
  if (!study || !out)
    return fail(HPEIG_ERR_ARGUMENT, "null argument");
  if (level < 0 || level >= hpeig_study_oracle_levels(study))
    return fail(HPEIG_ERR_ARGUMENT, "level out of range");
  const auto& L = study->oracle[level];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  hpeig_oracle_level o{};
  o.step = L.step;
  o.dofs = L.dofs;
  o.fine_dofs = L.report.fine_dofs;
  o.eta2_sum = L.report.eta2.sum();
  o.frak_d = L.report.frak_D;
  o.identity_defect = L.report.identity_defect;
  o.sandwich_lower = L.sandwich.lower;
  o.sandwich_upper = L.sandwich.upper;
  o.has_theorem = L.theorem.has_value();
  o.hypothesis = L.theorem && L.theorem->hypothesis;
  o.hypothesis_lhs = L.theorem ? L.theorem->hypothesis_lhs : nan;
  o.hypothesis_rhs = L.theorem ? L.theorem->hypothesis_rhs : nan;
  o.rel_error_sum = L.theorem ? L.theorem->rel_error_sum : nan;
  o.lower_bound = L.theorem ? L.theorem->lower_bound : nan;
  o.lower_bound_holds = L.theorem && L.theorem->lower_bound_holds;
  o.ratio_defined = L.theorem && L.theorem->ratio_defined;
  o.ratio = L.theorem ? L.theorem->ratio : nan;
  o.sin_theta = L.sin_theta;
  o.estimate = L.estimate;
  o.sin_ratio = L.sin_ratio;
  o.total_err = L.total_err;
  *out = o;
  return HPEIG_OK;
}

hpeig_status hpeig_study_oracle_eta2(const hpeig_study* study, int level, double* out, int n)
{
  if (!study || !out)
    return fail(HPEIG_ERR_ARGUMENT, "null argument");
  if (level < 0 || level >= hpeig_study_oracle_levels(study))
    return fail(HPEIG_ERR_ARGUMENT, "level out of range");
  const auto& eta2 = study->oracle[level].report.eta2;
  if (n != eta2.size())
    return fail(HPEIG_ERR_ARGUMENT, "buffer length must equal the cluster size");
  for (int i = 0; i < n; ++i)
    out[i] = eta2[i];
  return HPEIG_OK;
}

} // extern "C"
