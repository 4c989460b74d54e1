//! Density operators, trace norm and trace distance, and binary state
//! discrimination with arbitrary priors.
//!
//! Eigenvalues of a complex Hermitian `h = X + iY` are computed with a
//! cyclic Jacobi iteration on the real-symmetric embedding
//! `[[X, -Y], [Y, X]]` of doubled dimension, whose spectrum is that of
//! `h` with every eigenvalue at multiplicity two.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::classical::Distribution;
use crate::error::{Error, Result};

/// Largest operator dimension admitted.
pub const DIM_LIMIT: usize = 64;
/// Tolerance on `|h_ij - conj(h_ji)|` at construction.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Jacobi stops when the off-diagonal Frobenius norm drops below this.
pub const JACOBI_OFF_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Tolerance on |trace - 1| for density operators.
pub const DENSITY_TRACE_TOL: f64 = 1e-9;
/// Smallest eigenvalue a density operator may have.
pub const DENSITY_PSD_TOL: f64 = -1e-9;

/// A `dim x dim` complex Hermitian matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || dim > DIM_LIMIT {
            return Err(Error::SizeLimit {
                what: "operator dim",
                got: dim as u64,
                limit: DIM_LIMIT as u64,
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: (dim * dim) as u64,
                right: entries.len() as u64,
            });
        }
        for i in 0..dim {
            for j in i..dim {
                let dev = (entries[i * dim + j] - entries[j * dim + i].conj()).norm();
                if dev > HERMITICITY_TOL {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<Complex64> = rows.into_iter().flatten().collect();
        Self::new(dim, entries)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &v) in values.iter().enumerate() {
            entries[i * dim + i] = Complex64::new(v, 0.0);
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i).re).sum()
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim as u64,
                right: other.dim as u64,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(HermitianOperator {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, factor: f64) -> HermitianOperator {
        HermitianOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    /// Real-symmetric `2D x 2D` embedding `[[X, -Y], [Y, X]]`, symmetrized.
    fn embedding(&self) -> Vec<f64> {
        let d = self.dim;
        let m = 2 * d;
        let mut s = vec![0.0; m * m];
        for i in 0..d {
            for j in 0..d {
                let z = self.entry(i, j);
                s[i * m + j] = z.re;
                s[(i + d) * m + (j + d)] = z.re;
                s[i * m + (j + d)] = -z.im;
                s[(i + d) * m + j] = z.im;
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                let avg = 0.5 * (s[i * m + j] + s[j * m + i]);
                s[i * m + j] = avg;
                s[j * m + i] = avg;
            }
        }
        s
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let m = 2 * self.dim;
        let (mut evals, _) = jacobi_eigen_sym(self.embedding(), m)?;
        evals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // each eigenvalue of h shows up twice in the embedding
        Ok(evals.into_iter().step_by(2).collect())
    }

    /// Trace norm: sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|l| l.abs()).sum())
    }
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix, row-major.
///
/// Returns eigenvalues (unsorted) and the rotation product `V` column-major
/// (column `k` is the eigenvector for eigenvalue `k`).
pub(crate) fn jacobi_eigen_sym(mut a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let mut residual = off_norm(&a);
    if residual < JACOBI_OFF_TOL {
        let evals = (0..n).map(|i| a[i * n + i]).collect();
        return Ok((evals, v));
    }
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        residual = off_norm(&a);
        if residual < JACOBI_OFF_TOL {
            let evals = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((evals, v));
        }
    }
    Err(Error::NoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
        residual,
    })
}

/// Positive semidefinite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::BadNormalization {
                mass: trace,
                tol: DENSITY_TRACE_TOL,
            });
        }
        let evals = op.eigenvalues()?;
        if let Some(&min) = evals.first() {
            if min < DENSITY_PSD_TOL {
                return Err(Error::NotPositiveSemidefinite { eigenvalue: min });
            }
        }
        Ok(Self { op })
    }

    /// `|psi><psi|` for a normalized state vector.
    pub fn pure_state(amplitudes: &[Complex64]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::BadNormalization {
                mass: norm2,
                tol: DENSITY_TRACE_TOL,
            });
        }
        let d = amplitudes.len();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(amplitudes[i] * amplitudes[j].conj());
            }
        }
        Self::new(HermitianOperator::new(d, entries)?)
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// Diagonal density operator carrying a classical distribution.
pub fn embed_classical(p: &Distribution) -> Result<DensityOperator> {
    if p.n_outcomes() > DIM_LIMIT as u64 {
        return Err(Error::SizeLimit {
            what: "embedded n_outcomes",
            got: p.n_outcomes(),
            limit: DIM_LIMIT as u64,
        });
    }
    let weights = p.dense_weights()?;
    DensityOperator::new(HermitianOperator::diagonal(&weights)?)
}

/// Trace distance `1/2 ||rho0 - rho1||_1`.
pub fn trace_distance(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    Ok(0.5 * rho0.op.sub(&rho1.op)?.trace_norm()?)
}

/// Optimal probability of correctly deciding between `rho0` (prior `p0`)
/// and `rho1` (prior `p1`): `1/2 + 1/2 ||p0 rho0 - p1 rho1||_1`.
pub fn helstrom_correct_probability(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    p0: f64,
    p1: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) || !(0.0..=1.0).contains(&p1) {
        return Err(Error::OutOfRange {
            name: "prior",
            value: if (0.0..=1.0).contains(&p0) { p1 } else { p0 },
            range: "[0, 1]",
        });
    }
    if (p0 + p1 - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfRange {
            name: "p0 + p1",
            value: p0 + p1,
            range: "within 1e-12 of 1",
        });
    }
    let diff = rho0.op.scale(p0).sub(&rho1.op.scale(p1))?;
    Ok(0.5 + 0.5 * diff.trace_norm()?)
}

/// The equal-prior conditionals `(1/2 + d/2, 1/2 - d/2)` read off a
/// symmetrized decision rule. For the actual maximum-likelihood rule the
/// individual conditionals are not unique and generally differ; see
/// [`ml_decision_conditionals`]. Only their average is rule-independent.
pub fn equal_prior_conditionals(d: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::OutOfRange {
            name: "d",
            value: d,
            range: "[0, 1]",
        });
    }
    Ok((0.5 + 0.5 * d, 0.5 - 0.5 * d))
}

/// Conditionals of the maximum-likelihood rule at equal priors on two
/// classical distributions: accept hypothesis `q` on `A = {i : Q_i >= P_i}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MlDecision {
    pub accept_q_given_q: f64,
    pub accept_q_given_p: f64,
    pub correct_probability: f64,
}

pub fn ml_decision_conditionals(p: &Distribution, q: &Distribution) -> Result<MlDecision> {
    if p.n_outcomes() != q.n_outcomes() {
        return Err(Error::DimensionMismatch {
            left: p.n_outcomes(),
            right: q.n_outcomes(),
        });
    }
    let pw = p.dense_weights()?;
    let qw = q.dense_weights()?;
    let mut q_of_a = 0.0;
    let mut p_of_a = 0.0;
    for i in 0..pw.len() {
        if qw[i] >= pw[i] {
            q_of_a += qw[i];
            p_of_a += pw[i];
        }
    }
    Ok(MlDecision {
        accept_q_given_q: q_of_a,
        accept_q_given_p: p_of_a,
        correct_probability: 0.5 * (1.0 - p_of_a + q_of_a),
    })
}

/// Distance bound for a composed protocol: `min(1, d_ab + d_bc)`.
pub fn composition_bound(d_ab: f64, d_bc: f64) -> Result<f64> {
    for (name, v) in [("d_ab", d_ab), ("d_bc", d_bc)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                range: "[0, 1]",
            });
        }
    }
    Ok((d_ab + d_bc).min(1.0))
}

// --- JSON form --------------------------------------------------------------
//
// {"dim": D, "entries": [[[re, im], ...], ...]}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

fn to_operator_json(op: &HermitianOperator) -> OperatorJson {
    OperatorJson {
        dim: op.dim(),
        entries: (0..op.dim())
            .map(|i| {
                (0..op.dim())
                    .map(|j| {
                        let z = op.entry(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect(),
    }
}

fn from_operator_json(json: OperatorJson) -> Result<HermitianOperator> {
    let mut entries = Vec::with_capacity(json.dim * json.dim);
    for row in &json.entries {
        for &[re, im] in row {
            entries.push(Complex64::new(re, im));
        }
    }
    HermitianOperator::new(json.dim, entries)
}

impl Serialize for HermitianOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        to_operator_json(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = OperatorJson::deserialize(deserializer)?;
        from_operator_json(json).map_err(serde::de::Error::custom)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.op.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let op = HermitianOperator::deserialize(deserializer)?;
        DensityOperator::new(op).map_err(serde::de::Error::custom)
    }
}
