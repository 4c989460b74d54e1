//! C ABI over the tracebound library.
//!
//! Handles are opaque pointers owned by this library; every constructor
//! has a matching `_free`. All functions return a [`TbStatus`] and write
//! results through out-pointers. Pointers must be valid for the stated
//! types; null pointers are reported, never dereferenced.

use std::collections::BTreeMap;

use tracebound::bounds;
use tracebound::classical::{maximal_coupling, Distribution};
use tracebound::quantum::{
    helstrom_correct_probability, trace_distance, DensityOperator, HermitianOperator,
};
use tracebound::sim::{simulate_rounds, Adversary, SimConfig};
use tracebound::Error;

/// Status code returned by every function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TbStatus {
    TbOk = 0,
    TbNullPointer = 1,
    /// Invalid argument: bad normalization, dimension mismatch, size cap.
    TbInvalid = 2,
    /// Numerical failure: eigensolver non-convergence.
    TbNumerical = 3,
}

/// Opaque probability distribution handle.
pub struct TbDistribution(Distribution);

/// Opaque density operator handle.
pub struct TbDensityOperator(DensityOperator);

/// Simulation outcome; plain data, caller-allocated.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct TbSimReport {
    pub rounds_compromised: f64,
    pub bits_leaked: f64,
    pub leaked_fraction: f64,
    pub naive_accumulated_failure: f64,
    pub expected_fraction: f64,
    pub std_error: f64,
}

fn status_of(e: &Error) -> TbStatus {
    match e {
        Error::NoConvergence { .. } => TbStatus::TbNumerical,
        _ => TbStatus::TbInvalid,
    }
}

unsafe fn hand_out<T>(out: *mut *mut T, value: T) -> TbStatus {
    if out.is_null() {
        return TbStatus::TbNullPointer;
    }
    *out = Box::into_raw(Box::new(value));
    TbStatus::TbOk
}

unsafe fn write_out(out: *mut f64, value: f64) -> TbStatus {
    if out.is_null() {
        return TbStatus::TbNullPointer;
    }
    *out = value;
    TbStatus::TbOk
}

/// Dense distribution from `len` weights.
#[no_mangle]
pub unsafe extern "C" fn tb_distribution_dense(
    weights: *const f64,
    len: usize,
    out: *mut *mut TbDistribution,
) -> TbStatus {
    if weights.is_null() {
        return TbStatus::TbNullPointer;
    }
    let w = std::slice::from_raw_parts(weights, len).to_vec();
    match Distribution::dense(w) {
        Ok(d) => hand_out(out, TbDistribution(d)),
        Err(e) => status_of(&e),
    }
}

/// Uniform distribution over `n_outcomes` outcomes (sparse form).
#[no_mangle]
pub unsafe extern "C" fn tb_distribution_uniform(
    n_outcomes: u64,
    out: *mut *mut TbDistribution,
) -> TbStatus {
    match Distribution::uniform(n_outcomes) {
        Ok(d) => hand_out(out, TbDistribution(d)),
        Err(e) => status_of(&e),
    }
}

/// Sparse distribution: `background` everywhere except `len` overrides.
#[no_mangle]
pub unsafe extern "C" fn tb_distribution_sparse(
    n_outcomes: u64,
    background: f64,
    indices: *const u64,
    weights: *const f64,
    len: usize,
    out: *mut *mut TbDistribution,
) -> TbStatus {
    if len > 0 && (indices.is_null() || weights.is_null()) {
        return TbStatus::TbNullPointer;
    }
    let mut overrides = BTreeMap::new();
    for k in 0..len {
        overrides.insert(*indices.add(k), *weights.add(k));
    }
    match Distribution::sparse(n_outcomes, background, overrides) {
        Ok(d) => hand_out(out, TbDistribution(d)),
        Err(e) => status_of(&e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn tb_distribution_free(d: *mut TbDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Statistical distance `1/2 sum |P_i - Q_i|`.
#[no_mangle]
pub unsafe extern "C" fn tb_statistical_distance(
    p: *const TbDistribution,
    q: *const TbDistribution,
    out: *mut f64,
) -> TbStatus {
    let (Some(p), Some(q)) = (p.as_ref(), q.as_ref()) else {
        return TbStatus::TbNullPointer;
    };
    match p.0.statistical_distance(&q.0) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Largest single-outcome probability.
#[no_mangle]
pub unsafe extern "C" fn tb_guessing_probability(
    p: *const TbDistribution,
    out: *mut f64,
) -> TbStatus {
    let Some(p) = p.as_ref() else {
        return TbStatus::TbNullPointer;
    };
    write_out(out, p.0.guessing_probability())
}

/// Diagonal mass of the maximal coupling of `p` and `q` (equals
/// `1 - statistical_distance(p, q)`).
#[no_mangle]
pub unsafe extern "C" fn tb_maximal_coupling_equality(
    p: *const TbDistribution,
    q: *const TbDistribution,
    out: *mut f64,
) -> TbStatus {
    let (Some(p), Some(q)) = (p.as_ref(), q.as_ref()) else {
        return TbStatus::TbNullPointer;
    };
    let result = maximal_coupling(&p.0, &q.0).and_then(|c| c.equality_probability());
    match result {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Conditional distribution over completions given an `prefix_len`-bit prefix.
#[no_mangle]
pub unsafe extern "C" fn tb_condition_on_prefix(
    p: *const TbDistribution,
    prefix: u64,
    prefix_len: u32,
    out: *mut *mut TbDistribution,
) -> TbStatus {
    let Some(p) = p.as_ref() else {
        return TbStatus::TbNullPointer;
    };
    match p.0.condition_on_prefix(prefix, prefix_len) {
        Ok(d) => hand_out(out, TbDistribution(d)),
        Err(e) => status_of(&e),
    }
}

/// Distribution at distance `d` from uniform saturating the guessing bound.
#[no_mangle]
pub unsafe extern "C" fn tb_extremal_guessing_distribution(
    n: u32,
    d: f64,
    out: *mut *mut TbDistribution,
) -> TbStatus {
    match bounds::extremal_guessing_distribution(n, d) {
        Ok(dist) => hand_out(out, TbDistribution(dist)),
        Err(e) => status_of(&e),
    }
}

/// Known-prefix counterexample distribution.
#[no_mangle]
pub unsafe extern "C" fn tb_kpa_counterexample(
    n: u32,
    m: u32,
    special_prefix: u64,
    completion: u64,
    out: *mut *mut TbDistribution,
) -> TbStatus {
    match bounds::kpa_counterexample(n, m, special_prefix, completion) {
        Ok(dist) => hand_out(out, TbDistribution(dist)),
        Err(e) => status_of(&e),
    }
}

/// Whole-key guessing bound `min(1, 2^-n + d)`.
#[no_mangle]
pub unsafe extern "C" fn tb_guessing_bound(n: u32, d: f64, out: *mut f64) -> TbStatus {
    match bounds::guessing_bound(n, d) {
        Ok(r) => write_out(out, r.value),
        Err(e) => status_of(&e),
    }
}

/// Markov conversion `min(1, average / threshold)`.
#[no_mangle]
pub unsafe extern "C" fn tb_markov_tail_bound(
    average_value: f64,
    threshold: f64,
    out: *mut f64,
) -> TbStatus {
    match bounds::markov_tail_bound(average_value, threshold) {
        Ok(r) => write_out(out, r.value),
        Err(e) => status_of(&e),
    }
}

/// Density operator from a row-major `dim x dim` matrix with interleaved
/// re/im entries (`2 * dim * dim` doubles).
#[no_mangle]
pub unsafe extern "C" fn tb_density_operator_new(
    dim: usize,
    entries: *const f64,
    out: *mut *mut TbDensityOperator,
) -> TbStatus {
    if entries.is_null() {
        return TbStatus::TbNullPointer;
    }
    let raw = std::slice::from_raw_parts(entries, 2 * dim * dim);
    let complex: Vec<num_complex::Complex64> = raw
        .chunks_exact(2)
        .map(|c| num_complex::Complex64::new(c[0], c[1]))
        .collect();
    let result = HermitianOperator::new(dim, complex).and_then(DensityOperator::new);
    match result {
        Ok(op) => hand_out(out, TbDensityOperator(op)),
        Err(e) => status_of(&e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn tb_density_operator_free(op: *mut TbDensityOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Trace distance `1/2 ||rho0 - rho1||_1`.
#[no_mangle]
pub unsafe extern "C" fn tb_trace_distance(
    rho0: *const TbDensityOperator,
    rho1: *const TbDensityOperator,
    out: *mut f64,
) -> TbStatus {
    let (Some(r0), Some(r1)) = (rho0.as_ref(), rho1.as_ref()) else {
        return TbStatus::TbNullPointer;
    };
    match trace_distance(&r0.0, &r1.0) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Optimal discrimination probability `1/2 + 1/2 ||p0 rho0 - p1 rho1||_1`.
#[no_mangle]
pub unsafe extern "C" fn tb_helstrom_correct_probability(
    rho0: *const TbDensityOperator,
    rho1: *const TbDensityOperator,
    p0: f64,
    p1: f64,
    out: *mut f64,
) -> TbStatus {
    let (Some(r0), Some(r1)) = (rho0.as_ref(), rho1.as_ref()) else {
        return TbStatus::TbNullPointer;
    };
    match helstrom_correct_probability(&r0.0, &r1.0, p0, p1) {
        Ok(v) => write_out(out, v),
        Err(e) => status_of(&e),
    }
}

/// Run the multi-round leakage simulation. `threshold <= 0` selects the
/// full-round Bernoulli model; a positive threshold selects the Markov
/// per-round-threshold model.
#[no_mangle]
pub unsafe extern "C" fn tb_simulate(
    rounds: u64,
    key_len: u64,
    d_level: f64,
    threshold: f64,
    seed: u64,
    out: *mut TbSimReport,
) -> TbStatus {
    if out.is_null() {
        return TbStatus::TbNullPointer;
    }
    let adversary = if threshold > 0.0 {
        Adversary::PerRoundThreshold { threshold }
    } else {
        Adversary::FullRoundBernoulli
    };
    let config = SimConfig {
        rounds,
        key_len,
        d_level,
        adversary,
        seed,
    };
    match simulate_rounds(&config) {
        Ok(r) => {
            *out = TbSimReport {
                rounds_compromised: r.rounds_compromised,
                bits_leaked: r.bits_leaked,
                leaked_fraction: r.leaked_fraction,
                naive_accumulated_failure: r.naive_accumulated_failure,
                expected_fraction: r.expected_fraction,
                std_error: r.std_error,
            };
            TbStatus::TbOk
        }
        Err(e) => status_of(&e),
    }
}
