/* C interface to the qevote simulation library. Every call returns a status
 * code; on failure qev_last_error_message() describes the error for the
 * calling thread. Strings returned through char** are released with
 * qev_free_string. */
#ifndef QEVOTE_QEVOTE_H
#define QEVOTE_QEVOTE_H

#include <stddef.h>
#include <stdint.h>

#if defined(QEVOTE_BUILDING_LIBRARY)
#define QEV_API __attribute__((visibility("default")))
#else
#define QEV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qev_status {
  QEV_OK = 0,
  QEV_PARAMETER_ERROR = 1,
  QEV_UNITARITY_ERROR = 2,
  QEV_INDEX_ERROR = 3,
  QEV_CAPACITY_ERROR = 4,
  QEV_DOMAIN_ERROR = 5,
  QEV_PROTOCOL_ORDER_ERROR = 6,
  QEV_QUADRATURE_ERROR = 7,
  QEV_ESTIMATOR_OVERFLOW = 8,
  QEV_ESTIMATOR_EMPTY = 9,
  QEV_DEGENERATE_SAMPLE = 10,
  QEV_CONFIG_ERROR = 11,
  QEV_INTERNAL_ERROR = 12
} qev_status;

typedef enum qev_basis { QEV_BASIS_COMPUTATIONAL = 0, QEV_BASIS_FOURIER = 1 } qev_basis;

typedef struct qev_rng qev_rng;
typedef struct qev_state qev_state;
typedef struct qev_report qev_report;

QEV_API const char* qev_version(void);
QEV_API const char* qev_status_name(qev_status s);
QEV_API const char* qev_last_error_message(void);
QEV_API void qev_free_string(char* s);

/* Random streams */
QEV_API qev_status qev_rng_create(uint64_t seed, qev_rng** out);
QEV_API void qev_rng_destroy(qev_rng* rng);
QEV_API qev_status qev_rng_next_u64(qev_rng* rng, uint64_t* out);
QEV_API qev_status qev_rng_uniform(qev_rng* rng, double* out);

/* Pure states; qudit 0 is the most significant digit of an amplitude index. */
QEV_API qev_status qev_state_basis(const int* dims, size_t n, const int* digits, qev_state** out);
QEV_API void qev_state_destroy(qev_state* s);
QEV_API qev_status qev_state_size(const qev_state* s, size_t* out);
QEV_API qev_status qev_state_amplitude(const qev_state* s, size_t index, double* re, double* im);
QEV_API qev_status qev_state_apply_shift(qev_state* s, int target, int times);
QEV_API qev_status qev_state_apply_fourier(qev_state* s, int target);
/* Measures one qudit and collapses the state in place. */
QEV_API qev_status qev_state_measure(qev_state* s, int target, qev_basis basis, qev_rng* rng, int* outcome);

/* POVM and bounds */
QEV_API qev_status qev_povm_sample(int D, double theta_v, qev_rng* rng, double* out);
QEV_API qev_status qev_povm_density(double theta, int D, double theta_v, double* out);
/* Exact value as "p/q" in *fraction and its double approximation. */
QEV_API qev_status qev_pr_win_given_bad(int N, int t, int delta0, char** fraction, double* approx);
QEV_API qev_status qev_three_bin_mass(int D, int l_v, double delta, double* out);
QEV_API qev_status qev_rounds_threshold(int64_t rho, double* out);
QEV_API qev_status qev_taylor_sin2_lower(double x, double* out);
/* JSON report of the bound suite; filter may be NULL or a group name. */
QEV_API qev_status qev_verify_bounds(const char* filter, int inject_fault, char** report_json, int* all_pass);

/* Configuration-driven runs (JSON text with schema_version). */
QEV_API qev_status qev_validate_config(const char* config_json);
QEV_API qev_status qev_run_protocol(const char* config_json, char** result_json);
QEV_API qev_status qev_run_experiment(const char* config_json, qev_report** out);
/* As qev_run_experiment; the game defaults to the adversary's target game. */
QEV_API qev_status qev_run_attack(const char* config_json, qev_report** out);
/* Lists the protocol and adversary names as a JSON document. */
QEV_API qev_status qev_catalog(char** catalog_json);

QEV_API void qev_report_destroy(qev_report* r);
QEV_API qev_status qev_report_counts(const qev_report* r, uint64_t* trials, uint64_t* wins, uint64_t* losses,
                                     uint64_t* false_attacks);
QEV_API qev_status qev_report_outcome(const qev_report* r, uint64_t index, int* outcome, uint64_t* seed);
QEV_API qev_status qev_report_estimate(const qev_report* r, double* point, double* lo, double* hi);
QEV_API qev_status qev_report_json(const qev_report* r, char** out);
QEV_API qev_status qev_report_csv(const qev_report* r, char** out);

#ifdef __cplusplus
}
#endif

#endif /* QEVOTE_QEVOTE_H */
