#ifndef TRACEBOUND_H
#define TRACEBOUND_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every function.
 */
typedef enum TbStatus {
  TbOk = 0,
  TbNullPointer = 1,
  /**
   * Invalid argument: bad normalization, dimension mismatch, size cap.
   */
  TbInvalid = 2,
  /**
   * Numerical failure: eigensolver non-convergence.
   */
  TbNumerical = 3,
} TbStatus;

/**
 * Opaque density operator handle.
 */
typedef struct TbDensityOperator TbDensityOperator;

/**
 * Opaque probability distribution handle.
 */
typedef struct TbDistribution TbDistribution;

/**
 * Simulation outcome; plain data, caller-allocated.
 */
typedef struct TbSimReport {
  double rounds_compromised;
  double bits_leaked;
  double leaked_fraction;
  double naive_accumulated_failure;
  double expected_fraction;
  double std_error;
} TbSimReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Dense distribution from `len` weights.
 */
enum TbStatus tb_distribution_dense(const double *weights,
                                    uintptr_t len,
                                    struct TbDistribution **out);

/**
 * Uniform distribution over `n_outcomes` outcomes (sparse form).
 */
enum TbStatus tb_distribution_uniform(uint64_t n_outcomes, struct TbDistribution **out);

/**
 * Sparse distribution: `background` everywhere except `len` overrides.
 */
enum TbStatus tb_distribution_sparse(uint64_t n_outcomes,
                                     double background,
                                     const uint64_t *indices,
                                     const double *weights,
                                     uintptr_t len,
                                     struct TbDistribution **out);

void tb_distribution_free(struct TbDistribution *d);

/**
 * Statistical distance `1/2 sum |P_i - Q_i|`.
 */
enum TbStatus tb_statistical_distance(const struct TbDistribution *p,
                                      const struct TbDistribution *q,
                                      double *out);

/**
 * Largest single-outcome probability.
 */
enum TbStatus tb_guessing_probability(const struct TbDistribution *p, double *out);

/**
 * Diagonal mass of the maximal coupling of `p` and `q` (equals
 * `1 - statistical_distance(p, q)`).
 */
enum TbStatus tb_maximal_coupling_equality(const struct TbDistribution *p,
                                           const struct TbDistribution *q,
                                           double *out);

/**
 * Conditional distribution over completions given an `prefix_len`-bit prefix.
 */
enum TbStatus tb_condition_on_prefix(const struct TbDistribution *p,
                                     uint64_t prefix,
                                     uint32_t prefix_len,
                                     struct TbDistribution **out);

/**
 * Distribution at distance `d` from uniform saturating the guessing bound.
 */
enum TbStatus tb_extremal_guessing_distribution(uint32_t n, double d, struct TbDistribution **out);

/**
 * Known-prefix counterexample distribution.
 */
enum TbStatus tb_kpa_counterexample(uint32_t n,
                                    uint32_t m,
                                    uint64_t special_prefix,
                                    uint64_t completion,
                                    struct TbDistribution **out);

/**
 * Whole-key guessing bound `min(1, 2^-n + d)`.
 */
enum TbStatus tb_guessing_bound(uint32_t n, double d, double *out);

/**
 * Markov conversion `min(1, average / threshold)`.
 */
enum TbStatus tb_markov_tail_bound(double average_value, double threshold, double *out);

/**
 * Density operator from a row-major `dim x dim` matrix with interleaved
 * re/im entries (`2 * dim * dim` doubles).
 */
enum TbStatus tb_density_operator_new(uintptr_t dim,
                                      const double *entries,
                                      struct TbDensityOperator **out);

void tb_density_operator_free(struct TbDensityOperator *op);

/**
 * Trace distance `1/2 ||rho0 - rho1||_1`.
 */
enum TbStatus tb_trace_distance(const struct TbDensityOperator *rho0,
                                const struct TbDensityOperator *rho1,
                                double *out);

/**
 * Optimal discrimination probability `1/2 + 1/2 ||p0 rho0 - p1 rho1||_1`.
 */
enum TbStatus tb_helstrom_correct_probability(const struct TbDensityOperator *rho0,
                                              const struct TbDensityOperator *rho1,
                                              double p0,
                                              double p1,
                                              double *out);

/**
 * Run the multi-round leakage simulation. `threshold <= 0` selects the
 * full-round Bernoulli model; a positive threshold selects the Markov
 * per-round-threshold model.
 */
enum TbStatus tb_simulate(uint64_t rounds,
                          uint64_t key_len,
                          double d_level,
                          double threshold,
                          uint64_t seed,
                          struct TbSimReport *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TRACEBOUND_H */
