//! Acceptance suite: one test per criterion, each printing a pass line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//! Tolerances and runtime caps are pinned in the assertions.

mod common;

use std::time::Instant;

use rand::Rng;

use tracebound::bounds::{
    extremal_guessing_distribution, guessing_bound, kpa_counterexample, kpa_delta,
};
use tracebound::classical::{maximal_coupling, mixture_residual, Coupling, Distribution};
use tracebound::quantum::{
    embed_classical, helstrom_correct_probability, ml_decision_conditionals, trace_distance,
    DensityOperator,
};
use tracebound::sim::{simulate_rounds, Adversary, SimConfig};

use common::{random_dense, random_density, rng};

/// Greedy oracle for the largest atom reachable under a distance budget:
/// raise one atom by the full budget, take the deficit evenly from the
/// rest. Independent of the library construction.
fn greedy_max_atom(n_outcomes: usize, d: f64) -> f64 {
    let u = 1.0 / n_outcomes as f64;
    let mut w = vec![u; n_outcomes];
    w[0] += d;
    for x in w.iter_mut().skip(1) {
        *x -= d / (n_outcomes - 1) as f64;
    }
    assert!(w.iter().all(|&x| x >= -1e-15), "budget exceeds feasibility");
    w.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn criterion_1_guessing_bound_saturation() {
    let start = Instant::now();
    let mut r = rng(1);
    for n in 1u32..=16 {
        let u = 2f64.powi(-(n as i32));
        for &d in &[1e-3, 1e-2, 1e-1] {
            if d > 1.0 - u {
                continue;
            }
            let p = extremal_guessing_distribution(n, d).unwrap();
            let uniform = Distribution::uniform(1u64 << n).unwrap();
            let delta = p.statistical_distance(&uniform).unwrap();
            let bound = guessing_bound(n, d).unwrap().value;
            assert!((delta - d).abs() <= 1e-12, "n={n} d={d}: delta={delta}");
            assert!(
                (p.guessing_probability() - (u + d)).abs() <= 1e-12,
                "n={n} d={d}"
            );

            // independent optimizer over N <= 16: greedy transfer plus
            // random search, neither may beat the bound
            if n <= 4 {
                let n_out = 1usize << n;
                let greedy = greedy_max_atom(n_out, d);
                assert!((greedy - bound).abs() <= 1e-9, "greedy misses the bound");
                for _ in 0..500 {
                    let cand = random_dense(&mut r, n_out as u64);
                    let delta0 = cand.statistical_distance(&uniform).unwrap();
                    // shrink toward uniform so the candidate respects the budget
                    let scale = if delta0 > d { d / delta0 } else { 1.0 };
                    let mixed: Vec<f64> = (0..n_out as u64)
                        .map(|i| u + scale * (cand.weight(i) - u))
                        .collect();
                    let mixed = Distribution::dense(mixed).unwrap();
                    assert!(mixed.statistical_distance(&uniform).unwrap() <= d + 1e-12);
                    assert!(mixed.guessing_probability() <= bound + 1e-9);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "runtime {elapsed:?}");
    println!("criterion 1: PASS (extremal saturation + optimizer, {elapsed:?})");
}

#[test]
fn criterion_2_coupling_suite() {
    let start = Instant::now();
    let mut r = rng(2);
    let mut perturbed_checked = 0usize;
    for _ in 0..1000 {
        let n = r.gen_range(2..=64u64);
        let p = random_dense(&mut r, n);
        let q = random_dense(&mut r, n);
        let c = maximal_coupling(&p, &q).unwrap();
        // marginals valid within 1e-9
        for i in 0..n {
            let row: f64 = (0..n).map(|j| c.entry(i, j)).sum();
            let col: f64 = (0..n).map(|j| c.entry(j, i)).sum();
            assert!((row - p.weight(i)).abs() <= 1e-9);
            assert!((col - q.weight(i)).abs() <= 1e-9);
        }
        let delta = p.statistical_distance(&q).unwrap();
        let equality = c.equality_probability().unwrap();
        assert!((equality - (1.0 - delta)).abs() <= 1e-12);

        // mass-preserving perturbations never beat the maximal coupling
        if n >= 3 {
            let mut joint = c.joint_matrix();
            for _ in 0..3 {
                let n = n as usize;
                let (i, k) = (r.gen_range(0..n), r.gen_range(0..n));
                let (j, l) = (r.gen_range(0..n), r.gen_range(0..n));
                if i == k || j == l {
                    continue;
                }
                let eps = joint[i][j].min(joint[k][l]) * r.gen::<f64>();
                joint[i][j] -= eps;
                joint[k][l] -= eps;
                joint[i][l] += eps;
                joint[k][j] += eps;
            }
            let perturbed = Coupling::new(joint, p.clone(), q.clone()).unwrap();
            assert!(perturbed.equality_probability().unwrap() <= 1.0 - delta + 1e-12);
            perturbed_checked += 1;
        }
    }
    assert!(perturbed_checked >= 900);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?}");
    println!("criterion 2: PASS ({perturbed_checked} perturbed couplings, {elapsed:?})");
}

#[test]
fn criterion_3_mixture_refutation() {
    let start = Instant::now();
    let mut r = rng(3);
    let mut infeasible_at_delta = 0usize;
    let mut checked = 0usize;
    while checked < 10_000 {
        let n = r.gen_range(2..=64u64);
        let p = random_dense(&mut r, n);
        let u = Distribution::uniform(n).unwrap();
        let delta = p.statistical_distance(&u).unwrap();
        if delta < 1e-6 {
            continue; // P == U to working precision, lambda=delta is out of range
        }
        checked += 1;
        if !mixture_residual(&p, &u, delta).unwrap().is_feasible() {
            infeasible_at_delta += 1;
        }

        // feasibility agrees with the lower-bound rule at a random lambda
        let lambda = r.gen_range(0.01..=1.0);
        let feasible = mixture_residual(&p, &u, lambda).unwrap().is_feasible();
        let min = (0..n).map(|i| p.weight(i)).fold(f64::INFINITY, f64::min);
        let rule = min >= (1.0 - lambda) / n as f64 - 1e-12;
        assert_eq!(feasible, rule, "n={n} lambda={lambda}");
    }
    assert_eq!(infeasible_at_delta, checked, "lambda=delta must always be infeasible");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?}");
    println!("criterion 3: PASS ({checked}/{checked} infeasible at lambda=delta, {elapsed:?})");
}

/// Best deterministic decision rule by exhaustive search over all
/// accept-sets: the independent oracle for the discrimination formula.
fn exhaustive_best_rule(p0: f64, w0: &[f64], w1: &[f64]) -> f64 {
    let n = w0.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << n) {
        let mut success = 0.0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                success += (1.0 - p0) * w1[i]; // accept hypothesis 1 on i
            } else {
                success += p0 * w0[i];
            }
        }
        best = best.max(success);
    }
    best
}

#[test]
fn criterion_4_helstrom_vs_exhaustive_search() {
    let start = Instant::now();
    let mut r = rng(4);
    for &n in &[2u64, 3, 4, 8, 12] {
        for _ in 0..6 {
            let p = random_dense(&mut r, n);
            let q = random_dense(&mut r, n);
            let rho0 = embed_classical(&p).unwrap();
            let rho1 = embed_classical(&q).unwrap();
            let w0 = p.dense_weights().unwrap();
            let w1 = q.dense_weights().unwrap();
            let mut along = Vec::new();
            for step in 0..=10 {
                let p0 = step as f64 / 10.0;
                let pc = helstrom_correct_probability(&rho0, &rho1, p0, 1.0 - p0).unwrap();
                let oracle = exhaustive_best_rule(p0, &w0, &w1);
                assert!((pc - oracle).abs() <= 1e-10, "n={n} p0={p0}: {pc} vs {oracle}");
                // never worse than guessing the likelier hypothesis blind
                assert!(pc >= p0.max(1.0 - p0) - 1e-12);
                along.push(pc);
            }
            // prior sensitivity: convex in the prior, certainty at the ends
            for w in along.windows(3) {
                assert!(w[0] + w[2] >= 2.0 * w[1] - 1e-12);
            }
            assert!((along[0] - 1.0).abs() <= 1e-10);
            assert!((along[10] - 1.0).abs() <= 1e-10);
        }
    }
    // worked two-outcome case
    let rho0 = embed_classical(&Distribution::dense(vec![1.0, 0.0]).unwrap()).unwrap();
    let rho1 = embed_classical(&Distribution::uniform(2).unwrap()).unwrap();
    let pc = helstrom_correct_probability(&rho0, &rho1, 0.5, 0.5).unwrap();
    assert!((pc - 0.75).abs() <= 1e-10);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "runtime {elapsed:?}");
    println!("criterion 4: PASS (discrimination formula matches exhaustive search, {elapsed:?})");
}

#[test]
fn criterion_5_conditionals_are_rule_dependent() {
    let p = Distribution::dense(vec![1.0, 0.0]).unwrap();
    let q = Distribution::uniform(2).unwrap();
    let delta = p.statistical_distance(&q).unwrap();
    let ml = ml_decision_conditionals(&p, &q).unwrap();
    assert!((ml.correct_probability - 0.75).abs() <= 1e-12);
    assert!((ml.correct_probability - (0.5 + 0.5 * delta)).abs() <= 1e-12);
    // the per-hypothesis conditional of the optimal rule is 0.5, not 0.75
    assert!((ml.accept_q_given_q - 0.5).abs() <= 1e-12);
    assert!((ml.accept_q_given_q - ml.correct_probability).abs() > 0.2);
    println!("criterion 5: PASS (average pinned at 1/2 + delta/2, conditionals rule-dependent)");
}

#[test]
fn criterion_6_quantum_layer() {
    let start = Instant::now();
    use num_complex::Complex64;
    let zero = DensityOperator::pure_state(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
        .unwrap();
    let s = 1.0 / 2f64.sqrt();
    let plus =
        DensityOperator::pure_state(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]).unwrap();
    assert!((trace_distance(&zero, &plus).unwrap() - s).abs() <= 1e-10);

    // diagonal embeddings read out the classical distance
    let mut r = rng(6);
    for _ in 0..1000 {
        let n = r.gen_range(2..=16u64);
        let p = random_dense(&mut r, n);
        let q = random_dense(&mut r, n);
        let td = trace_distance(&embed_classical(&p).unwrap(), &embed_classical(&q).unwrap())
            .unwrap();
        assert!((td - p.statistical_distance(&q).unwrap()).abs() <= 1e-10);
    }

    // triangle inequality on random density-operator triples
    for _ in 0..1000 {
        let dim = r.gen_range(2..=8usize);
        let a = random_density(&mut r, dim);
        let b = random_density(&mut r, dim);
        let c = random_density(&mut r, dim);
        let ac = trace_distance(&a, &c).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        assert!(ac <= ab + bc + 1e-12);
    }
    // a few triples at the largest dimension the runtime cap allows
    for _ in 0..20 {
        let a = random_density(&mut r, 16);
        let b = random_density(&mut r, 16);
        let c = random_density(&mut r, 16);
        let ac = trace_distance(&a, &c).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        assert!(ac <= ab + bc + 1e-12);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?}");
    println!("criterion 6: PASS (trace distance 1/sqrt(2), embedding consistency, triangle, {elapsed:?})");
}

#[test]
fn criterion_7_kpa_counterexample() {
    let mut r = rng(7);
    for n in 2u32..=14 {
        for m in 1..n {
            let prefix = r.gen_range(0..1u64 << m);
            let completion = r.gen_range(0..1u64 << (n - m));
            let p = kpa_counterexample(n, m, prefix, completion).unwrap();
            let u = Distribution::uniform_bits(n).unwrap();
            // closed form vs exhaustive dense evaluation
            let dense = p.to_dense().unwrap();
            let delta_dense = dense
                .statistical_distance(&u.to_dense().unwrap())
                .unwrap();
            assert!((delta_dense - kpa_delta(n, m)).abs() <= 1e-15, "n={n} m={m}");
            assert!((p.statistical_distance(&u).unwrap() - delta_dense).abs() <= 1e-15);

            // the known prefix pins the whole key
            let cond = p.condition_on_prefix(prefix, m).unwrap();
            assert_eq!(cond.guessing_mode(), (completion, 1.0));

            // every other prefix stays uniform
            let other = (prefix + 1) % (1u64 << m);
            let cond = p.condition_on_prefix(other, m).unwrap();
            let u_suffix = Distribution::uniform_bits(n - m).unwrap();
            assert!(cond.statistical_distance(&u_suffix).unwrap() <= 1e-15);
        }
    }
    println!("criterion 7: PASS (closed-form delta exact, conditional guessing probability 1)");
}

fn scenario_config() -> SimConfig {
    SimConfig {
        rounds: 1_000_000,
        key_len: 100_000,
        d_level: 0.1,
        adversary: Adversary::FullRoundBernoulli,
        seed: 42,
    }
}

#[test]
fn criterion_8_leakage_scenario() {
    let start = Instant::now();
    let report = simulate_rounds(&scenario_config()).unwrap();
    // about 10% of all rounds fully leaked...
    assert!((report.leaked_fraction - 0.1).abs() <= 9e-4, "{}", report.leaked_fraction);
    assert!((report.bits_leaked - report.rounds_compromised * 1e5).abs() < 0.5);
    // ...while the per-bit accounting in the same report stays "strictly less than 1"
    assert!((report.naive_accumulated_failure - 0.1).abs() <= 1e-15);
    assert!(report.naive_accumulated_failure < 1.0);
    assert_eq!(report.naive_derivation, "naive-interpretation");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?}");
    println!(
        "criterion 8: PASS (leaked_fraction {} vs naive accumulated {}, {elapsed:?})",
        report.leaked_fraction, report.naive_accumulated_failure
    );
}

/// Reports representative of criteria 1-8, serialized with fixed seeds.
fn seeded_reports() -> String {
    let extremal = extremal_guessing_distribution(2, 0.1).unwrap();
    let p = Distribution::dense(vec![0.7, 0.3]).unwrap();
    let q = Distribution::dense(vec![0.4, 0.6]).unwrap();
    let coupling = maximal_coupling(&p, &q).unwrap();
    let kpa = kpa_counterexample(4, 2, 0b10, 0b01).unwrap();
    let sim = simulate_rounds(&scenario_config()).unwrap();
    serde_json::to_string_pretty(&serde_json::json!({
        "extremal": extremal,
        "coupling": coupling,
        "kpa": kpa,
        "sim": sim,
        "bound": guessing_bound(2, 0.1).unwrap(),
    }))
    .unwrap()
}

#[test]
fn criterion_9_deterministic_reports() {
    let a = seeded_reports();
    let b = seeded_reports();
    assert_eq!(a.as_bytes(), b.as_bytes());
    println!("criterion 9: PASS (byte-identical reports across repeated runs)");
}
