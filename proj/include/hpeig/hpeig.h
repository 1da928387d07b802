/* C interface to the hp-adaptive eigenvalue library. */
#ifndef HPEIG_H
#define HPEIG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HPEIG_API __declspec(dllexport)
#else
#define HPEIG_API __attribute__((visibility("default")))
#endif

typedef enum {
  HPEIG_OK = 0,
  HPEIG_ERR_ARGUMENT = 1,
  HPEIG_ERR_CONFIG = 2,
  HPEIG_ERR_SOLVER = 3,
  HPEIG_ERR_IO = 5,
  HPEIG_ERR_INTERNAL = 6
} hpeig_status;

/* Message of the last failed call on this thread ("" if none). */
HPEIG_API const char* hpeig_last_error(void);
HPEIG_API const char* hpeig_version(void);

/* ---- problems ---------------------------------------------------------- */

HPEIG_API int hpeig_problem_count(void);
/* NULL when i is out of range. */
HPEIG_API const char* hpeig_problem_key(int i);
HPEIG_API const char* hpeig_problem_description(int i);

/* ---- reference spectra ------------------------------------------------- */

typedef struct {
  char name[96];
  double computed;
  double expected;
  double relative_error;
  double tolerance;
  int pass;
} hpeig_reference_check;

/* Runs the internal cross-checks; *count receives the number of checks. The
   results stay valid until the next call on this thread. */
HPEIG_API hpeig_status hpeig_verify_references(const hpeig_reference_check** checks, int* count);
HPEIG_API hpeig_status hpeig_bessel_j(double nu, double x, double* out);
HPEIG_API hpeig_status hpeig_bessel_root(double nu, int m, double* out);

/* ---- studies ----------------------------------------------------------- */

typedef struct hpeig_study hpeig_study;

HPEIG_API hpeig_status hpeig_study_load(const char* path, hpeig_study** out);
HPEIG_API hpeig_status hpeig_study_parse(const char* text, hpeig_study** out);
HPEIG_API void hpeig_study_free(hpeig_study* study);

HPEIG_API int hpeig_study_cluster_size(const hpeig_study* study);
HPEIG_API const char* hpeig_study_problem(const hpeig_study* study);

/* Runs the adaptive loop. csv_path and vtk_dir may be NULL. On a solver
   failure the steps completed so far stay available (and in the CSV). */
HPEIG_API hpeig_status hpeig_study_run(hpeig_study* study, const char* csv_path, const char* vtk_dir,
                                       int timing);

typedef struct {
  int step;
  int dofs;
  int elements;
  int max_degree;
  double gamma_degree;
  double total_est;
  double total_err;   /* NaN without references */
  double effectivity; /* NaN without references */
  double seconds;
} hpeig_step_info;

HPEIG_API int hpeig_study_num_steps(const hpeig_study* study);
HPEIG_API hpeig_status hpeig_study_step(const hpeig_study* study, int step, hpeig_step_info* out);
/* Copy n = cluster size values of λ̂_i, relative errors or ε_i² of one step. */
HPEIG_API hpeig_status hpeig_study_lambda(const hpeig_study* study, int step, double* out, int n);
HPEIG_API hpeig_status hpeig_study_relerr(const hpeig_study* study, int step, double* out, int n);
HPEIG_API hpeig_status hpeig_study_eps2(const hpeig_study* study, int step, double* out, int n);

/* ---- defect oracle ----------------------------------------------------- */

typedef struct {
  int step;
  int dofs;
  int fine_dofs;
  double eta2_sum;
  double frak_d;
  double identity_defect;
  double sandwich_lower; /* slack of the lower trace inequality */
  double sandwich_upper; /* slack of the upper trace inequality */
  int has_theorem;       /* the remaining theorem fields need an exact spectrum */
  int hypothesis;
  double hypothesis_lhs;
  double hypothesis_rhs;
  double rel_error_sum;
  double lower_bound;
  int lower_bound_holds;
  int ratio_defined;
  double ratio;
  double sin_theta;
  double estimate;
  double sin_ratio;
  double total_err;
} hpeig_oracle_level;

/* Runs the defect oracle configured in the study's [oracle] section. */
HPEIG_API hpeig_status hpeig_study_oracle(hpeig_study* study);
HPEIG_API int hpeig_study_oracle_levels(const hpeig_study* study);
HPEIG_API hpeig_status hpeig_study_oracle_level(const hpeig_study* study, int level, hpeig_oracle_level* out);
/* n = cluster size values of η_i² (ascending). */
HPEIG_API hpeig_status hpeig_study_oracle_eta2(const hpeig_study* study, int level, double* out, int n);

#ifdef __cplusplus
}
#endif

#endif
