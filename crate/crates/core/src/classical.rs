//! Finite probability distributions, statistical distance, couplings and
//! mixture decompositions.
//!
//! Distributions come in two physical forms: a dense weight vector, and a
//! sparse "uniform background plus overrides" form that scales to key
//! lengths around 50 bits without enumerating `2^n` outcomes. Every
//! operation that accepts the sparse form computes its result by grouping
//! the background outcomes in closed form.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on |total mass - 1| accepted at construction.
pub const DEFAULT_MASS_TOL: f64 = 1e-9;
/// Weights below this are rejected; weights in [WEIGHT_NEG_TOL, 0) are clamped to 0.
pub const WEIGHT_NEG_TOL: f64 = -1e-12;
/// Largest outcome count admitted in dense form.
pub const DENSE_LIMIT: u64 = 1 << 20;
/// Largest outcome count admitted by the maximal-coupling construction.
pub const COUPLING_LIMIT: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq)]
enum Weights {
    Dense(Vec<f64>),
    Sparse {
        background: f64,
        overrides: BTreeMap<u64, f64>,
    },
}

/// A probability distribution over `n_outcomes` discrete outcomes.
///
/// Outcomes are indexed `0..n_outcomes`. When `n_outcomes` is a power of
/// two the index is read as an `n`-bit string, most significant bit first.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    n_outcomes: u64,
    weights: Weights,
}

impl Distribution {
    /// Dense distribution from an explicit weight vector.
    pub fn dense(weights: Vec<f64>) -> Result<Self> {
        Self::dense_with_tol(weights, DEFAULT_MASS_TOL)
    }

    pub fn dense_with_tol(mut weights: Vec<f64>, mass_tol: f64) -> Result<Self> {
        let n = weights.len() as u64;
        if n == 0 {
            return Err(Error::OutOfRange {
                name: "n_outcomes",
                value: 0.0,
                range: ">= 1",
            });
        }
        if n > DENSE_LIMIT {
            return Err(Error::SizeLimit {
                what: "dense n_outcomes",
                got: n,
                limit: DENSE_LIMIT,
            });
        }
        for (i, w) in weights.iter_mut().enumerate() {
            *w = clamp_weight(i as u64, *w)?;
        }
        let mass: f64 = weights.iter().sum();
        check_mass(mass, mass_tol)?;
        Ok(Self {
            n_outcomes: n,
            weights: Weights::Dense(weights),
        })
    }

    /// Sparse distribution: `background` on every outcome not listed in
    /// `overrides`. Mass is checked in closed form.
    pub fn sparse(n_outcomes: u64, background: f64, overrides: BTreeMap<u64, f64>) -> Result<Self> {
        Self::sparse_with_tol(n_outcomes, background, overrides, DEFAULT_MASS_TOL)
    }

    pub fn sparse_with_tol(
        n_outcomes: u64,
        background: f64,
        mut overrides: BTreeMap<u64, f64>,
        mass_tol: f64,
    ) -> Result<Self> {
        if n_outcomes == 0 {
            return Err(Error::OutOfRange {
                name: "n_outcomes",
                value: 0.0,
                range: ">= 1",
            });
        }
        let background = clamp_weight(0, background)?;
        if let Some((&k, _)) = overrides.range(n_outcomes..).next() {
            return Err(Error::SizeLimit {
                what: "override index",
                got: k,
                limit: n_outcomes,
            });
        }
        for (&i, w) in overrides.iter_mut() {
            *w = clamp_weight(i, *w)?;
        }
        let mass = background * (n_outcomes - overrides.len() as u64) as f64
            + overrides.values().sum::<f64>();
        check_mass(mass, mass_tol)?;
        Ok(Self {
            n_outcomes,
            weights: Weights::Sparse {
                background,
                overrides,
            },
        })
    }

    /// Uniform distribution over `n_outcomes` outcomes, stored sparsely.
    pub fn uniform(n_outcomes: u64) -> Result<Self> {
        Self::sparse(n_outcomes, 1.0 / n_outcomes as f64, BTreeMap::new())
    }

    /// Uniform distribution over `n_bits`-bit strings.
    pub fn uniform_bits(n_bits: u32) -> Result<Self> {
        if n_bits == 0 || n_bits > 50 {
            return Err(Error::OutOfRange {
                name: "n_bits",
                value: n_bits as f64,
                range: "1..=50",
            });
        }
        Self::uniform(1u64 << n_bits)
    }

    /// Point mass on a single outcome.
    pub fn point_mass(n_outcomes: u64, index: u64) -> Result<Self> {
        let mut overrides = BTreeMap::new();
        overrides.insert(index, 1.0);
        Self::sparse(n_outcomes, 0.0, overrides)
    }

    pub fn n_outcomes(&self) -> u64 {
        self.n_outcomes
    }

    /// Bit length `n` when `n_outcomes == 2^n`.
    pub fn n_bits(&self) -> Option<u32> {
        self.n_outcomes
            .is_power_of_two()
            .then(|| self.n_outcomes.trailing_zeros())
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.weights, Weights::Sparse { .. })
    }

    pub fn weight(&self, index: u64) -> f64 {
        match &self.weights {
            Weights::Dense(w) => w[index as usize],
            Weights::Sparse {
                background,
                overrides,
            } => *overrides.get(&index).unwrap_or(background),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match &self.weights {
            Weights::Dense(w) => w.iter().sum(),
            Weights::Sparse {
                background,
                overrides,
            } => {
                background * (self.n_outcomes - overrides.len() as u64) as f64
                    + overrides.values().sum::<f64>()
            }
        }
    }

    /// Explicit renormalization; construction never renormalizes silently.
    pub fn renormalized(&self) -> Self {
        let mass = self.total_mass();
        let weights = match &self.weights {
            Weights::Dense(w) => Weights::Dense(w.iter().map(|x| x / mass).collect()),
            Weights::Sparse {
                background,
                overrides,
            } => Weights::Sparse {
                background: background / mass,
                overrides: overrides.iter().map(|(&i, w)| (i, w / mass)).collect(),
            },
        };
        Self {
            n_outcomes: self.n_outcomes,
            weights,
        }
    }

    /// Expand to dense form (fails above [`DENSE_LIMIT`]).
    pub fn to_dense(&self) -> Result<Self> {
        if self.n_outcomes > DENSE_LIMIT {
            return Err(Error::SizeLimit {
                what: "dense n_outcomes",
                got: self.n_outcomes,
                limit: DENSE_LIMIT,
            });
        }
        let w: Vec<f64> = (0..self.n_outcomes).map(|i| self.weight(i)).collect();
        Ok(Self {
            n_outcomes: self.n_outcomes,
            weights: Weights::Dense(w),
        })
    }

    pub fn dense_weights(&self) -> Result<Vec<f64>> {
        match self.to_dense()?.weights {
            Weights::Dense(w) => Ok(w),
            Weights::Sparse { .. } => unreachable!(),
        }
    }

    /// Statistical (total variation) distance `1/2 sum_i |P_i - Q_i|`.
    ///
    /// Sparse pairs are handled in closed form by grouping the outcomes
    /// listed in neither override map.
    pub fn statistical_distance(&self, other: &Distribution) -> Result<f64> {
        if self.n_outcomes != other.n_outcomes {
            return Err(Error::DimensionMismatch {
                left: self.n_outcomes,
                right: other.n_outcomes,
            });
        }
        let sum = match (&self.weights, &other.weights) {
            (
                Weights::Sparse {
                    background: bp,
                    overrides: op,
                },
                Weights::Sparse {
                    background: bq,
                    overrides: oq,
                },
            ) => {
                let listed: BTreeSet<u64> = op.keys().chain(oq.keys()).copied().collect();
                let mut s = (self.n_outcomes - listed.len() as u64) as f64 * (bp - bq).abs();
                for &i in &listed {
                    s += (self.weight(i) - other.weight(i)).abs();
                }
                s
            }
            // At least one side is dense, so n_outcomes <= DENSE_LIMIT.
            _ => (0..self.n_outcomes)
                .map(|i| (self.weight(i) - other.weight(i)).abs())
                .sum(),
        };
        Ok(0.5 * sum)
    }

    /// Largest single-outcome probability: the optimal single-guess
    /// success probability of an adversary holding this distribution.
    pub fn guessing_probability(&self) -> f64 {
        self.guessing_mode().1
    }

    /// Largest atom together with the smallest index attaining it.
    pub fn guessing_mode(&self) -> (u64, f64) {
        match &self.weights {
            Weights::Dense(w) => {
                let mut best = (0u64, w[0]);
                for (i, &x) in w.iter().enumerate().skip(1) {
                    if x > best.1 {
                        best = (i as u64, x);
                    }
                }
                best
            }
            Weights::Sparse {
                background,
                overrides,
            } => {
                let mut candidates: Vec<(u64, f64)> =
                    overrides.iter().map(|(&i, &w)| (i, w)).collect();
                if (overrides.len() as u64) < self.n_outcomes {
                    candidates.push((smallest_unlisted(overrides), *background));
                }
                let max = candidates
                    .iter()
                    .map(|&(_, w)| w)
                    .fold(f64::NEG_INFINITY, f64::max);
                let index = candidates
                    .iter()
                    .filter(|&&(_, w)| w == max)
                    .map(|&(i, _)| i)
                    .min()
                    .unwrap();
                (index, max)
            }
        }
    }

    /// Conditional distribution over the `n - m` bit completions, given
    /// that the first `m` bits equal `prefix`.
    pub fn condition_on_prefix(&self, prefix: u64, prefix_len: u32) -> Result<Distribution> {
        let n_bits = self.n_bits().ok_or(Error::NotPowerOfTwo {
            n: self.n_outcomes,
        })?;
        if prefix_len >= n_bits {
            return Err(Error::OutOfRange {
                name: "prefix_len",
                value: prefix_len as f64,
                range: "< n_bits",
            });
        }
        if prefix_len < 64 && prefix >= 1u64 << prefix_len {
            return Err(Error::OutOfRange {
                name: "prefix",
                value: prefix as f64,
                range: "< 2^prefix_len",
            });
        }
        let suffix_bits = n_bits - prefix_len;
        let block = 1u64 << suffix_bits;
        let start = prefix << suffix_bits;
        match &self.weights {
            Weights::Dense(w) => {
                let slice = &w[start as usize..(start + block) as usize];
                let mass: f64 = slice.iter().sum();
                if mass <= 0.0 {
                    return Err(Error::ZeroMassPrefix);
                }
                let weights: Vec<f64> = slice.iter().map(|x| x / mass).collect();
                Ok(Distribution {
                    n_outcomes: block,
                    weights: Weights::Dense(weights),
                })
            }
            Weights::Sparse {
                background,
                overrides,
            } => {
                let in_block: BTreeMap<u64, f64> = overrides
                    .range(start..start + block)
                    .map(|(&i, &w)| (i - start, w))
                    .collect();
                let mass = background * (block - in_block.len() as u64) as f64
                    + in_block.values().sum::<f64>();
                if mass <= 0.0 {
                    return Err(Error::ZeroMassPrefix);
                }
                Ok(Distribution {
                    n_outcomes: block,
                    weights: Weights::Sparse {
                        background: background / mass,
                        overrides: in_block.into_iter().map(|(i, w)| (i, w / mass)).collect(),
                    },
                })
            }
        }
    }

    /// Check `(1-lambda)/N <= P_i <= lambda + (1-lambda)/N` for every
    /// outcome; the feasibility condition for writing this distribution
    /// as a `(1-lambda)`-uniform mixture.
    pub fn uniform_mixture_bounds_check(&self, lambda: f64) -> Result<MixtureBoundsReport> {
        check_lambda(lambda)?;
        let n = self.n_outcomes as f64;
        let lower = (1.0 - lambda) / n;
        let upper = lambda + lower;
        let mut report = MixtureBoundsReport {
            ok: true,
            lower_bound: lower,
            upper_bound: upper,
            violation_count: 0,
            violations: Vec::new(),
        };
        let record = |index: u64, weight: f64, count: u64, report: &mut MixtureBoundsReport| {
            report.ok = false;
            report.violation_count += count;
            if report.violations.len() < 64 {
                report.violations.push(BoundViolation { index, weight });
            }
        };
        match &self.weights {
            Weights::Dense(w) => {
                for (i, &x) in w.iter().enumerate() {
                    if x < lower || x > upper {
                        record(i as u64, x, 1, &mut report);
                    }
                }
            }
            Weights::Sparse {
                background,
                overrides,
            } => {
                let unlisted = self.n_outcomes - overrides.len() as u64;
                if unlisted > 0 && (*background < lower || *background > upper) {
                    record(smallest_unlisted(overrides), *background, unlisted, &mut report);
                }
                for (&i, &w) in overrides {
                    if w < lower || w > upper {
                        record(i, w, 1, &mut report);
                    }
                }
            }
        }
        Ok(report)
    }
}

fn clamp_weight(index: u64, w: f64) -> Result<f64> {
    if w < WEIGHT_NEG_TOL || !w.is_finite() {
        Err(Error::NegativeWeight { index, value: w })
    } else {
        Ok(w.max(0.0))
    }
}

fn check_mass(mass: f64, tol: f64) -> Result<()> {
    if (mass - 1.0).abs() > tol {
        Err(Error::BadNormalization { mass, tol })
    } else {
        Ok(())
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "(0, 1]",
        })
    } else {
        Ok(())
    }
}

fn smallest_unlisted(overrides: &BTreeMap<u64, f64>) -> u64 {
    let mut i = 0u64;
    while overrides.contains_key(&i) {
        i += 1;
    }
    i
}

/// Per-bound report of [`Distribution::uniform_mixture_bounds_check`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixtureBoundsReport {
    pub ok: bool,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Total number of violating outcomes (background outcomes counted once each).
    pub violation_count: u64,
    /// Representative violations, capped at 64 entries.
    pub violations: Vec<BoundViolation>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundViolation {
    pub index: u64,
    pub weight: f64,
}

/// A joint distribution with prescribed marginals.
#[derive(Clone, Debug)]
pub struct Coupling {
    rows: u64,
    cols: u64,
    /// Row-major `rows x cols` matrix.
    joint: Vec<f64>,
    row_marginal: Distribution,
    col_marginal: Distribution,
}

impl Coupling {
    /// Validate a joint matrix against its marginals: non-negative
    /// entries, row and column sums within 1e-9 of the marginals, total
    /// mass within 1e-9 of 1.
    pub fn new(
        joint: Vec<Vec<f64>>,
        row_marginal: Distribution,
        col_marginal: Distribution,
    ) -> Result<Self> {
        let rows = row_marginal.n_outcomes();
        let cols = col_marginal.n_outcomes();
        if joint.len() as u64 != rows {
            return Err(Error::InvalidCoupling(format!(
                "joint has {} rows, marginal expects {rows}",
                joint.len()
            )));
        }
        let mut flat = Vec::with_capacity((rows * cols) as usize);
        for (i, row) in joint.iter().enumerate() {
            if row.len() as u64 != cols {
                return Err(Error::InvalidCoupling(format!(
                    "row {i} has {} columns, marginal expects {cols}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if x < WEIGHT_NEG_TOL || !x.is_finite() {
                    return Err(Error::InvalidCoupling(format!(
                        "negative entry {x} at ({i},{j})"
                    )));
                }
                flat.push(x.max(0.0));
            }
        }
        let c = Self {
            rows,
            cols,
            joint: flat,
            row_marginal,
            col_marginal,
        };
        c.check_marginals()?;
        Ok(c)
    }

    fn check_marginals(&self) -> Result<()> {
        let mut mass = 0.0;
        let mut col_sums = vec![0.0; self.cols as usize];
        for i in 0..self.rows as usize {
            let mut row_sum = 0.0;
            for j in 0..self.cols as usize {
                let x = self.joint[i * self.cols as usize + j];
                row_sum += x;
                col_sums[j] += x;
                mass += x;
            }
            let expect = self.row_marginal.weight(i as u64);
            if (row_sum - expect).abs() > DEFAULT_MASS_TOL {
                return Err(Error::InvalidCoupling(format!(
                    "row {i} sums to {row_sum}, marginal weight is {expect}"
                )));
            }
        }
        for (j, &s) in col_sums.iter().enumerate() {
            let expect = self.col_marginal.weight(j as u64);
            if (s - expect).abs() > DEFAULT_MASS_TOL {
                return Err(Error::InvalidCoupling(format!(
                    "column {j} sums to {s}, marginal weight is {expect}"
                )));
            }
        }
        check_mass(mass, DEFAULT_MASS_TOL)
            .map_err(|_| Error::InvalidCoupling(format!("total mass {mass}")))
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    pub fn cols(&self) -> u64 {
        self.cols
    }

    pub fn entry(&self, i: u64, j: u64) -> f64 {
        self.joint[(i * self.cols + j) as usize]
    }

    pub fn row_marginal(&self) -> &Distribution {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &Distribution {
        &self.col_marginal
    }

    pub fn joint_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.rows as usize)
            .map(|i| {
                self.joint[i * self.cols as usize..(i + 1) * self.cols as usize].to_vec()
            })
            .collect()
    }

    /// Probability of the equality event: the diagonal mass
    /// `sum_i joint[i][i]` over the shared sample space.
    pub fn equality_probability(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.entry(i, i)).sum())
    }
}

/// The maximal coupling of `p` and `q`: diagonal entries `min(P_i, Q_i)`,
/// residual masses spread over the off-diagonal as the product of the two
/// normalized residuals. Its diagonal mass equals `1 - delta(p, q)`, the
/// largest any coupling can achieve.
pub fn maximal_coupling(p: &Distribution, q: &Distribution) -> Result<Coupling> {
    if p.n_outcomes() != q.n_outcomes() {
        return Err(Error::DimensionMismatch {
            left: p.n_outcomes(),
            right: q.n_outcomes(),
        });
    }
    let n = p.n_outcomes();
    if n > COUPLING_LIMIT {
        return Err(Error::SizeLimit {
            what: "coupling n_outcomes",
            got: n,
            limit: COUPLING_LIMIT,
        });
    }
    let pw = p.dense_weights()?;
    let qw = q.dense_weights()?;
    let n = n as usize;
    let diag: Vec<f64> = (0..n).map(|i| pw[i].min(qw[i])).collect();
    let res_p: Vec<f64> = (0..n).map(|i| pw[i] - diag[i]).collect();
    let res_q: Vec<f64> = (0..n).map(|i| qw[i] - diag[i]).collect();
    let residual_mass: f64 = res_p.iter().sum();
    let mut joint = vec![vec![0.0; n]; n];
    for i in 0..n {
        joint[i][i] = diag[i];
    }
    if residual_mass > 0.0 {
        for i in 0..n {
            if res_p[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                // res_p[i] * res_q[i] == 0 by construction, so the
                // diagonal receives nothing here.
                joint[i][j] += res_p[i] * res_q[j] / residual_mass;
            }
        }
    }
    Coupling::new(joint, p.clone(), q.clone())
}

/// Result of peeling the `(1-lambda)`-weighted component `p_y` out of `p_x`.
#[derive(Clone, Debug)]
pub enum MixtureResidual {
    Feasible(Distribution),
    /// No residual distribution exists: the worst candidate entry and its index.
    Infeasible { index: u64, violation: f64 },
}

impl MixtureResidual {
    pub fn is_feasible(&self) -> bool {
        matches!(self, MixtureResidual::Feasible(_))
    }
}

/// Candidate residual `P'_i = (P_X_i - (1-lambda) P_Y_i) / lambda`.
///
/// Feasible when every candidate entry is at least -1e-12 (clamped to 0).
/// Infeasibility at `lambda = delta(P_X, P_Y)` is the point of the whole
/// exercise: the mixture reading of the distance does not hold.
pub fn mixture_residual(
    p_x: &Distribution,
    p_y: &Distribution,
    lambda: f64,
) -> Result<MixtureResidual> {
    check_lambda(lambda)?;
    if p_x.n_outcomes() != p_y.n_outcomes() {
        return Err(Error::DimensionMismatch {
            left: p_x.n_outcomes(),
            right: p_y.n_outcomes(),
        });
    }
    let n = p_x.n_outcomes();
    let cand = |x: f64, y: f64| (x - (1.0 - lambda) * y) / lambda;

    let mut worst: Option<(u64, f64)> = None;
    let note_worst = |index: u64, value: f64, worst: &mut Option<(u64, f64)>| {
        if value < WEIGHT_NEG_TOL && worst.map_or(true, |(_, w)| value < w) {
            *worst = Some((index, value));
        }
    };

    match (&p_x.weights, &p_y.weights) {
        (
            Weights::Sparse {
                background: bx,
                overrides: ox,
            },
            Weights::Sparse {
                overrides: oy, ..
            },
        ) => {
            let listed: BTreeSet<u64> = ox.keys().chain(oy.keys()).copied().collect();
            let mut overrides = BTreeMap::new();
            for &i in &listed {
                let v = cand(p_x.weight(i), p_y.weight(i));
                note_worst(i, v, &mut worst);
                overrides.insert(i, v.max(0.0));
            }
            let background = cand(*bx, p_y.weight(smallest_unlisted_of(&listed)));
            if (listed.len() as u64) < n {
                note_worst(smallest_unlisted_of(&listed), background, &mut worst);
            }
            if let Some((index, violation)) = worst {
                return Ok(MixtureResidual::Infeasible { index, violation });
            }
            let dist =
                Distribution::sparse_with_tol(n, background.max(0.0), overrides, DEFAULT_MASS_TOL)?;
            Ok(MixtureResidual::Feasible(dist))
        }
        _ => {
            let mut weights = Vec::with_capacity(n as usize);
            for i in 0..n {
                let v = cand(p_x.weight(i), p_y.weight(i));
                note_worst(i, v, &mut worst);
                weights.push(v.max(0.0));
            }
            if let Some((index, violation)) = worst {
                return Ok(MixtureResidual::Infeasible { index, violation });
            }
            Ok(MixtureResidual::Feasible(Distribution::dense_with_tol(
                weights,
                DEFAULT_MASS_TOL,
            )?))
        }
    }
}

fn smallest_unlisted_of(listed: &BTreeSet<u64>) -> u64 {
    let mut i = 0u64;
    while listed.contains(&i) {
        i += 1;
    }
    i
}

// --- JSON forms -------------------------------------------------------------
//
// dense:  {"n_outcomes": N, "weights": [...]}
// sparse: {"n_outcomes": N, "background": b, "overrides": {"index": weight}}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DistributionJson {
    Dense {
        n_outcomes: u64,
        weights: Vec<f64>,
    },
    Sparse {
        n_outcomes: u64,
        background: f64,
        // string keys: JSON object keys are strings, and serde's untagged
        // buffering cannot recover integer keys
        #[serde(default)]
        overrides: BTreeMap<String, f64>,
    },
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let json = match &self.weights {
            Weights::Dense(w) => DistributionJson::Dense {
                n_outcomes: self.n_outcomes,
                weights: w.clone(),
            },
            Weights::Sparse {
                background,
                overrides,
            } => DistributionJson::Sparse {
                n_outcomes: self.n_outcomes,
                background: *background,
                overrides: overrides
                    .iter()
                    .map(|(&i, &w)| (i.to_string(), w))
                    .collect(),
            },
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = DistributionJson::deserialize(deserializer)?;
        Distribution::from_json_form(json, DEFAULT_MASS_TOL).map_err(serde::de::Error::custom)
    }
}

impl Distribution {
    fn from_json_form(json: DistributionJson, mass_tol: f64) -> Result<Self> {
        match json {
            DistributionJson::Dense { n_outcomes, weights } => {
                if weights.len() as u64 != n_outcomes {
                    return Err(Error::DimensionMismatch {
                        left: n_outcomes,
                        right: weights.len() as u64,
                    });
                }
                Self::dense_with_tol(weights, mass_tol)
            }
            DistributionJson::Sparse {
                n_outcomes,
                background,
                overrides,
            } => {
                let mut parsed = BTreeMap::new();
                for (k, w) in overrides {
                    let i: u64 = k.parse().map_err(|_| Error::OutOfRange {
                        name: "override index",
                        value: f64::NAN,
                        range: "unsigned integer string",
                    })?;
                    parsed.insert(i, w);
                }
                Self::sparse_with_tol(n_outcomes, background, parsed, mass_tol)
            }
        }
    }

    /// Parse from JSON with an explicit normalization tolerance.
    pub fn from_json_str(s: &str, mass_tol: f64) -> Result<Self> {
        let json: DistributionJson = serde_json::from_str(s).map_err(|e| Error::InvalidCoupling(e.to_string()))?;
        Self::from_json_form(json, mass_tol)
    }
}

#[derive(Serialize, Deserialize)]
struct CouplingJson {
    rows: u64,
    cols: u64,
    joint: Vec<Vec<f64>>,
    row_marginal: Distribution,
    col_marginal: Distribution,
}

impl Serialize for Coupling {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CouplingJson {
            rows: self.rows,
            cols: self.cols,
            joint: self.joint_matrix(),
            row_marginal: self.row_marginal.clone(),
            col_marginal: self.col_marginal.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = CouplingJson::deserialize(deserializer)?;
        Coupling::new(json.joint, json.row_marginal, json.col_marginal)
            .map_err(serde::de::Error::custom)
    }
}
