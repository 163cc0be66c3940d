/* spinmu — bias-field controller synthesis and robustness analysis for spin
 * networks: differential/logarithmic sensitivity and structured-singular-value
 * bounds behind a C interface.
 *
 * All functions returning spinmu_status set a thread-local message readable
 * via spinmu_last_error() on failure. Status values match the CLI exit codes.
 */
#ifndef SPINMU_H
#define SPINMU_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spinmu_status {
    SPINMU_OK = 0,
    SPINMU_ERR_INTERNAL = 1,
    SPINMU_ERR_CONFIG = 2,   /* invalid specs, malformed files, bad arguments */
    SPINMU_ERR_NUMERICAL = 3 /* singularities, non-convergence, contract violations */
} spinmu_status;

typedef struct spinmu_network spinmu_network;   /* network spec + Hamiltonian */
typedef struct spinmu_ensemble spinmu_ensemble; /* synthesized controller set */

const char* spinmu_version(void);
const char* spinmu_last_error(void);
void spinmu_string_free(char* s);

/* ---- networks ---- */

/* topology: "chain" | "ring"; coupling: "xx" | "xxx" */
spinmu_status spinmu_network_create(int n, const char* topology, const char* coupling,
                                    spinmu_network** out);
/* json text like {"n": 11, "topology": "ring", "coupling": "xx"} */
spinmu_status spinmu_network_from_json(const char* json_text, spinmu_network** out);
void spinmu_network_free(spinmu_network* net);
int spinmu_network_size(const spinmu_network* net);
/* row-major n*n buffers for the nominal Hamiltonian */
spinmu_status spinmu_network_hamiltonian(const spinmu_network* net, double* re, double* im);

/* ---- dynamics ---- */

/* bias: length-n array (may be NULL for zero bias); spins are 1-based */
spinmu_status spinmu_transfer_probability(const spinmu_network* net, const double* bias,
                                          int in_spin, int out_spin, double t, double* p);
spinmu_status spinmu_time_averaged_probability(const spinmu_network* net, const double* bias,
                                               int in_spin, int out_spin, double* p);
/* structure_kind: "coupling" | "leakage" with index k; log_value is NaN when
 * the fidelity is within 1e-12 of 1 */
spinmu_status spinmu_differential_sensitivity(const spinmu_network* net, const double* bias,
                                              const char* structure_kind, int k, int in_spin,
                                              int out_spin, double t, double* value,
                                              double* log_value);

/* ---- synthesis ---- */

/* opts_json: optional synthesis options (bias_bound, t_min, t_max, max_iters,
 * grad_tol, time_penalty, restart_bias_range); NULL for defaults */
spinmu_status spinmu_synthesize(const spinmu_network* net, int in_spin, int out_spin, int count,
                                uint64_t seed, const char* opts_json, spinmu_ensemble** out);
spinmu_status spinmu_ensemble_load(const char* path, spinmu_ensemble** out);
spinmu_status spinmu_ensemble_save(const spinmu_ensemble* ens, const char* path);
void spinmu_ensemble_free(spinmu_ensemble* ens);
int spinmu_ensemble_size(const spinmu_ensemble* ens);
/* index in [0, size); d must hold n doubles; any output may be NULL */
spinmu_status spinmu_ensemble_controller(const spinmu_ensemble* ens, int index, double* d,
                                         double* t_f, double* p_tf, double* p_avg);

/* ---- structured singular value ---- */

/* g: dim*dim row-major (im may be NULL for a real matrix);
 * structure_json: {"blocks": [{"kind": "repeated_scalar", "dim": 11},
 *                             {"kind": "full", "rows": 11, "cols": 11}]}
 * result_json receives {"lower", "upper", "witness_norm", "converged",
 * "iterations"}; free with spinmu_string_free. */
spinmu_status spinmu_mu(const double* g_re, const double* g_im, int dim,
                        const char* structure_json, char** result_json);
/* g file: nested [re, im] matrix, {"data": matrix}, or an exported G-matrix
 * with g11/g12/g21/g22 blocks (assembled before the bound computation) */
spinmu_status spinmu_mu_files(const char* g_json_path, const char* structure_json_path,
                              char** result_json);

/* ---- experiment pipeline ---- */

/* synthesizes per the config and writes the ensemble JSON; ensemble_out
 * overrides the config's synthesis.ensemble_out when non-NULL */
spinmu_status spinmu_synth_run(const char* config_path, const char* ensemble_out);
/* study: "sensitivity" | "average" | "mu"; ensemble_path/out_dir override the
 * config when non-NULL; summary_json (optional) receives study statistics */
spinmu_status spinmu_study_run(const char* study, const char* config_path,
                               const char* ensemble_path, const char* out_dir,
                               char** summary_json);
spinmu_status spinmu_kendall_tau(const double* x, const double* y, int len, double* tau);
spinmu_status spinmu_csv_tau(const char* csv_path, const char* x_col, const char* y_col,
                             double* tau);

#ifdef __cplusplus
}
#endif

#endif /* SPINMU_H */
