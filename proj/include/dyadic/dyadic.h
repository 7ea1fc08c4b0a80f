/* Public C API of the dyadic shell-model laboratory.
 *
 * The library simulates the truncated dyadic (shell) model of the Euler
 * equations with optional diffusion, computes blow-up certificates for the
 * weighted functional L = sum lambda^j a_j w^{-j}, solves for self-similar
 * profiles by shooting, and classifies energy-conserving nearest-neighbor
 * quadratic systems.
 *
 * Conventions:
 *  - every function returns a dyadic_status (or a process-style exit code
 *    for the dyadic_run_* entry points); dyadic_last_error() describes the
 *    most recent failure on the calling thread;
 *  - objects behind opaque handles are created by dyadic_*_create/parse
 *    functions and released by the matching dyadic_*_free;
 *  - strings returned through char** are heap-allocated; release them with
 *    dyadic_string_free.
 *
 * Handles are immutable after creation (except dyadic_config, mutated only
 * by dyadic_config_set), so concurrent use from multiple threads is safe.
 */
#ifndef DYADIC_DYADIC_H
#define DYADIC_DYADIC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dyadic_status {
    DYADIC_OK = 0,
    DYADIC_ERR_PARAM = 1,            /* invalid argument / precondition violation */
    DYADIC_ERR_PARSE = 2,            /* configuration text failed validation */
    DYADIC_ERR_NUMERIC = 3,          /* non-finite data or numerical failure */
    DYADIC_ERR_EMPTY_ADMISSIBLE = 4, /* no weight satisfies the certificate inequalities */
    DYADIC_ERR_IO = 5,               /* file system failure */
    DYADIC_ERR_INTERNAL = 6
} dyadic_status;

/* Thread-local message for the last failing call on this thread. */
const char* dyadic_last_error(void);

void dyadic_string_free(char* str);

/* ------------------------------------------------------------------ */
/* Model and state                                                     */

typedef struct dyadic_model dyadic_model;

/* lambda > 1; alpha, beta, nu >= 0; gamma > 0 when nu > 0; shells >= 2.
 * Pass DYADIC_LAMBDA_EULER3D for the shell ratio matched to 3D Euler. */
dyadic_status dyadic_model_create(double lambda, double alpha, double beta, double nu,
                                  double gamma, int shells, dyadic_model** out);
void dyadic_model_free(dyadic_model* model);

#define DYADIC_LAMBDA_EULER3D 5.656854249492380195206754896838

/* da_j/dt for a state of length shells; f0 is the constant force on shell 0. */
dyadic_status dyadic_model_rhs(const dyadic_model* model, const double* a, int n, double f0,
                               double* out);

/* db_j/dt in the rescaled variables b_j = lambda^j a_j (requires alpha = 1). */
dyadic_status dyadic_model_rhs_rescaled(const dyadic_model* model, const double* b, int n,
                                        double* out);

/* ------------------------------------------------------------------ */
/* Diagnostics                                                         */

/* sqrt(sum 2^{2 s j} a_j^2), compensated summation. */
dyadic_status dyadic_sobolev_norm(const double* a, int n, double s, double* out);

dyadic_status dyadic_energy(const double* a, int n, double* out);

/* sum_{j <= j0} a_j^2. */
dyadic_status dyadic_truncated_energy(const double* a, int n, int j0, double* out);

/* d/dt of the truncated energy through shell j0 (0 <= j0 < shells-1). */
dyadic_status dyadic_energy_flux(const dyadic_model* model, const double* a, int n, int j0,
                                 double f0, double* out);

/* L = sum b_j w^{-j}, A = sum b_j^2 w^{-j} (b_j = lambda^j a_j), and the
 * energy in the last three shells. Requires w > 1. */
dyadic_status dyadic_weighted_functionals(const dyadic_model* model, const double* a, int n,
                                          double w, double* l_out, double* a_out,
                                          double* tail_energy_out);

/* min over shells of a_j. */
dyadic_status dyadic_positivity_margin(const double* a, int n, double* out);

/* ------------------------------------------------------------------ */
/* Blow-up certificates                                                */

/* gamma_absent != 0 marks the inviscid case (the gamma value is ignored,
 * and eta/C2 are dropped: threshold 0). */
typedef struct dyadic_certificate {
    double s;
    double gamma; /* meaningful only when gamma_absent == 0 */
    int gamma_absent;
    double beta;
    double lambda;
    double w;
    double eta; /* meaningful only when gamma_absent == 0 */
    double c1;
    double c2;
    double threshold; /* sqrt(c2/c1) */
} dyadic_certificate;

/* The admissible weights form one interval (lo, hi) (closed at lo when
 * lo_closed). empty != 0 means no weight qualifies. */
dyadic_status dyadic_admissible_w(double s, const double* gamma_or_null, double beta,
                                  double lambda, double* lo, double* hi, int* lo_closed,
                                  int* empty);

/* Supremum of certifiable beta; attained reports whether a weight realizes it. */
dyadic_status dyadic_beta_max(double s, const double* gamma_or_null, double lambda, double* out,
                              int* attained);

/* (2^s - 2^{1-2s}) / (1 + 2^{1-3s}): the bound at w = 2^{2-2s}, lambda = 2. */
dyadic_status dyadic_beta_max_closed_form(double s, double* out);

/* Builds a certificate; pass NULL for w/eta to let the library optimize
 * them. Fails with DYADIC_ERR_EMPTY_ADMISSIBLE when no weight qualifies. */
dyadic_status dyadic_certify(double s, const double* gamma_or_null, double beta, double lambda,
                             const double* w_or_null, const double* eta_or_null,
                             dyadic_certificate* out);

/* (-4/3, min(2(s-1), -4 gamma)); empty != 0 when the window vanishes. */
dyadic_status dyadic_theta_window(double s, double gamma, double* lo, double* hi, int* empty);

/* L(0) against the threshold; margin = L(0) - threshold. */
dyadic_status dyadic_check_initial_data(const dyadic_certificate* cert, const double* a0, int n,
                                        int* passes, double* margin);

/* ------------------------------------------------------------------ */
/* Integration                                                         */

typedef struct dyadic_trajectory dyadic_trajectory;

typedef enum dyadic_termination {
    DYADIC_TERM_REACHED_T_END = 0,
    DYADIC_TERM_NORM_CAP_EXCEEDED = 1,
    DYADIC_TERM_STEP_FLOOR_HIT = 2,
    DYADIC_TERM_MAX_STEPS = 3,
    DYADIC_TERM_NUMERICAL_FAILURE = 4
} dyadic_termination;

typedef struct dyadic_sample_info {
    double t;
    double energy;
    double hs_monitor;   /* H^s norm at the monitored index */
    double min_a;
    double tail_energy;  /* energy in the last 3 shells */
    double weighted_l;   /* NaN unless the run configured a weight */
    double weighted_a;
} dyadic_sample_info;

/* Runs the simulate entry of a parsed config without touching the file
 * system; the trajectory stays in memory behind the returned handle. */
typedef struct dyadic_config dyadic_config;
dyadic_status dyadic_integrate(const dyadic_config* cfg, dyadic_trajectory** out);
void dyadic_trajectory_free(dyadic_trajectory* traj);

int64_t dyadic_trajectory_sample_count(const dyadic_trajectory* traj);
dyadic_status dyadic_trajectory_sample_info(const dyadic_trajectory* traj, int64_t index,
                                            dyadic_sample_info* out);
/* Copies the sampled state into a buffer of capacity cap; needs cap >= shells. */
dyadic_status dyadic_trajectory_sample_state(const dyadic_trajectory* traj, int64_t index,
                                             double* t_out, double* a_out, int cap);
dyadic_status dyadic_trajectory_termination(const dyadic_trajectory* traj,
                                            dyadic_termination* out);
dyadic_status dyadic_trajectory_steps(const dyadic_trajectory* traj, int64_t* accepted,
                                      int64_t* rejected);

/* Least-squares 1/L extrapolation of a blow-up time from an increasing
 * series; fails with DYADIC_ERR_NUMERIC when no blow-up trend is present. */
dyadic_status dyadic_estimate_blowup_time(const double* t, const double* l, int n, double* t_est,
                                          double* fit_residual);

/* ------------------------------------------------------------------ */
/* Self-similar profiles                                               */

typedef struct dyadic_profile dyadic_profile;

typedef enum dyadic_profile_class {
    DYADIC_PROFILE_FINITE_ENERGY_CANDIDATE = 0,
    DYADIC_PROFILE_GROWING = 1,
    DYADIC_PROFILE_DEGENERATE = 2
} dyadic_profile_class;

/* c_{j+1} = (2^{-j} c_j + c_{j-1}^2/2)/c_j from c_{-1} = 0; c0 > 0, n >= 2. */
dyadic_status dyadic_profile_create(double c0, int n, dyadic_profile** out);

/* Bisection on c0 in [1e-8, 1e8] to bracket width <= tol at depth n >= 20. */
dyadic_status dyadic_profile_shoot(int n, double tol, double* c0_star, double* bracket_width,
                                   dyadic_profile** out);
void dyadic_profile_free(dyadic_profile* profile);

int dyadic_profile_len(const dyadic_profile* profile);
dyadic_status dyadic_profile_coefficients(const dyadic_profile* profile, double* out, int cap);
dyadic_status dyadic_profile_classification(const dyadic_profile* profile,
                                            dyadic_profile_class* out);
/* Geometric mean of c_{j+1}/c_j over the middle third; expected is 2^{-1/3}. */
dyadic_status dyadic_profile_decay_ratio(const dyadic_profile* profile, double* ratio,
                                         double* expected);
/* State a_j = c_j / (2 (t - t0)) of the exact solution carried by the profile. */
dyadic_status dyadic_profile_eval(const dyadic_profile* profile, double t0, double t,
                                  double* a_out, int cap);

/* Steady state of the forced system: k = sqrt(f0) lambda^{-1/3},
 * abar_j = k lambda^{-j/3}. abar_out may be NULL when only k is wanted. */
dyadic_status dyadic_forced_fixed_point(double f0, double lambda, int shells, double* k_out,
                                        double* abar_out);

/* ------------------------------------------------------------------ */
/* Conservation classifier                                             */

/* coeffs = {C(-1,-1), C(-1,0), C(-1,+1), C(0,0), C(0,+1), C(+1,+1)}.
 * On a conservative system, alpha/beta receive the unique normal form.
 * Otherwise witness_out (capacity witness_cap) receives a finitely
 * supported sequence with a nonzero energy derivative, whose exact value
 * lands in derivative_out. */
dyadic_status dyadic_classify_model(const double coeffs[6], double lambda, int* conservative,
                                    double* alpha, double* beta, double* witness_out,
                                    int witness_cap, int* witness_len, double* derivative_out);

/* ------------------------------------------------------------------ */
/* Configuration and command entry points                              */

/* Parses the flat `key = value` config format. On validation failure,
 * returns DYADIC_ERR_PARSE and, when errors_json_out is non-NULL, a JSON
 * array [{"line": n, "message": "..."}, ...] with every problem found. */
dyadic_status dyadic_config_parse(const char* text, dyadic_config** out, char** errors_json_out);

/* Override one key (CLI --set semantics); re-validates the whole config. */
dyadic_status dyadic_config_set(dyadic_config* cfg, const char* key, const char* value,
                                char** errors_json_out);

/* Canonical text form; parsing it back reproduces the config exactly. */
dyadic_status dyadic_config_serialize(const dyadic_config* cfg, char** text_out);

void dyadic_config_free(dyadic_config* cfg);

/* Executes the config's mode (simulate / sweep / certify / selfsimilar /
 * classify), writing any configured output files. Returns the process
 * exit code: 0 success or ReachedTEnd, 2 blow-up proxy, 3 config error,
 * 4 numerical failure, 5 empty admissible set, 6 max steps. The JSON
 * summary (what the CLI prints) lands in summary_json_out when non-NULL. */
int dyadic_run(const dyadic_config* cfg, char** summary_json_out);

#ifdef __cplusplus
}
#endif

#endif /* DYADIC_DYADIC_H */
