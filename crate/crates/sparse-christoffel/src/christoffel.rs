//! Moment matrices and Christoffel polynomial evaluation.
//!
//! For a basis `{x^α}` and moments `μ`, the moment matrix has entries
//! `M[α,β] = μ_{α+β}`. The Christoffel polynomial is the quadratic form
//! `Λ(z) = v(z)ᵀ M⁻¹ v(z)` where `v(z)` is the monomial vector. No inverse is
//! ever formed: `M = L·Lᵀ` is factorized once and each evaluation is one
//! forward substitution, `Λ(z) = ‖L⁻¹ v(z)‖²`.
//!
//! Monomial moment matrices are Hilbert-like and their conditioning decays
//! rapidly with the degree; callers enforce a degree guardrail and a
//! reciprocal-condition estimate is recorded at factorization time.

use crate::error::{Error, Result};
use crate::linalg::{cholesky_in_place, forward_substitute, lu_solve};
use crate::moments::MomentTable;
use crate::multiindex::{DegreeMode, MultiIndexBasis};

/// Reciprocal-condition estimates below this trigger a warning at
/// factorization time.
pub const RCOND_WARN_THRESHOLD: f64 = 1e-12;

/// A symmetric moment matrix over a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    basis: MultiIndexBasis,
    data: Vec<f64>,
}

impl MomentMatrix {
    /// Assemble `M[α,β] = μ_{α+β}` from a moment table. The table must hold
    /// every moment up to coordinate-wise degree `2 * degree` over its
    /// variables.
    pub fn assemble(table: &MomentTable, degree: usize, mode: DegreeMode) -> Result<Self> {
        let basis = MultiIndexBasis::enumerate(table.vars(), degree, mode)?;
        let m = basis.len();
        let mut data = vec![0.0f64; m * m];
        for (i, a) in basis.indices().iter().enumerate() {
            for (j, b) in basis.indices().iter().enumerate().skip(i) {
                let key: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let value = table.get(&key).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "moment table over {:?} (degree {}) lacks moment {key:?}",
                        table.vars(),
                        table.degree()
                    ))
                })?;
                data[i * m + j] = value;
                data[j * m + i] = value;
            }
        }
        Ok(MomentMatrix { basis, data })
    }

    pub fn basis(&self) -> &MultiIndexBasis {
        &self.basis
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size() + j]
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }
}

/// A fitted Christoffel polynomial for one variable subset: the Cholesky
/// factor of its moment matrix plus the basis it was assembled over.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelFactor {
    basis: MultiIndexBasis,
    lower: Vec<f64>,
    jitter: f64,
    rcond: f64,
}

impl ChristoffelFactor {
    /// Cholesky-factorize `M + jitter·I`.
    ///
    /// Fails with [`Error::SingularMomentMatrix`] when the matrix is not
    /// positive definite, which happens when the sample count is below the
    /// basis size or the measure lives on a lower-dimensional variety.
    /// Records a cheap reciprocal-condition estimate (squared ratio of the
    /// extreme Cholesky pivots) and warns when it drops below
    /// [`RCOND_WARN_THRESHOLD`].
    pub fn factorize(matrix: &MomentMatrix, jitter: f64) -> Result<Self> {
        if !(jitter >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "jitter must be nonnegative, got {jitter}"
            )));
        }
        let m = matrix.size();
        let mut lower = matrix.data().to_vec();
        if jitter > 0.0 {
            for i in 0..m {
                lower[i * m + i] += jitter;
            }
        }
        cholesky_in_place(&mut lower, m).map_err(|pivot| Error::SingularMomentMatrix {
            vars: matrix.basis().vars().to_vec(),
            detail: format!(
                "pivot {pivot} of {m} not positive (basis size {m}, jitter {jitter})"
            ),
        })?;
        let mut min_diag = f64::INFINITY;
        let mut max_diag = 0.0f64;
        for i in 0..m {
            let d = lower[i * m + i];
            min_diag = min_diag.min(d);
            max_diag = max_diag.max(d);
        }
        let rcond = (min_diag / max_diag).powi(2);
        if rcond < RCOND_WARN_THRESHOLD {
            log::warn!(
                "moment matrix over {:?} is ill-conditioned (rcond estimate {rcond:.3e})",
                matrix.basis().vars()
            );
        }
        Ok(ChristoffelFactor {
            basis: matrix.basis().clone(),
            lower,
            jitter,
            rcond,
        })
    }

    /// Convenience path: assemble the moment matrix and factorize it.
    pub fn fit(table: &MomentTable, degree: usize, mode: DegreeMode, jitter: f64) -> Result<Self> {
        ChristoffelFactor::factorize(&MomentMatrix::assemble(table, degree, mode)?, jitter)
    }

    pub fn vars(&self) -> &[usize] {
        self.basis.vars()
    }

    pub fn basis(&self) -> &MultiIndexBasis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn mode(&self) -> DegreeMode {
        self.basis.mode()
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Reciprocal-condition estimate recorded at factorization.
    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub(crate) fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub(crate) fn from_parts(basis: MultiIndexBasis, lower: Vec<f64>, jitter: f64, rcond: f64) -> Self {
        ChristoffelFactor {
            basis,
            lower,
            jitter,
            rcond,
        }
    }

    /// Relative Frobenius error of `L·Lᵀ` against the matrix assembled from
    /// `table` (plus the recorded jitter). Used when loading model files.
    pub(crate) fn reconstruction_error(&self, table: &MomentTable) -> Result<f64> {
        let matrix = MomentMatrix::assemble(table, self.degree(), self.mode())?;
        let m = self.size();
        if matrix.size() != m {
            return Err(Error::ModelFormat(format!(
                "factor over {:?} has size {m}, table yields {}",
                self.vars(),
                matrix.size()
            )));
        }
        let mut err = 0.0f64;
        let mut norm = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let mut prod = 0.0;
                for k in 0..=i.min(j) {
                    prod += self.lower[i * m + k] * self.lower[j * m + k];
                }
                let mut target = matrix.get(i, j);
                if i == j {
                    target += self.jitter;
                }
                err += (prod - target) * (prod - target);
                norm += target * target;
            }
        }
        Ok((err / norm.max(f64::MIN_POSITIVE)).sqrt())
    }

    fn quadratic_form(&self, v: Vec<f64>) -> f64 {
        let mut w = v;
        forward_substitute(&self.lower, self.size(), &mut w);
        w.iter().map(|x| x * x).sum()
    }

    /// Evaluate the Christoffel polynomial at `z`: `‖L⁻¹ v(z)‖²`.
    ///
    /// Strictly positive; at jitter 0 the value is at least 1 for probability
    /// measures.
    pub fn evaluate(&self, z: &[f64]) -> Result<f64> {
        Ok(self.quadratic_form(self.basis.monomial_vector(z)?))
    }

    /// Evaluate the regularized Christoffel polynomial: the same quadratic
    /// form applied to the box average of the monomial vector over the box of
    /// side `epsilon` centred at `z`. Converges to [`Self::evaluate`] as
    /// `epsilon → 0`.
    pub fn evaluate_regularized(&self, z: &[f64], epsilon: f64) -> Result<f64> {
        Ok(self.quadratic_form(self.basis.averaged_monomial_vector(z, epsilon)?))
    }
}

/// Evaluate the Christoffel polynomial at `z` through the constrained
/// quadratic program `min pᵀMp` subject to `p(z) = 1`; the optimal value is
/// the reciprocal of the polynomial.
///
/// This reference route shares no code with the Cholesky path: it solves
/// `M y = v(z)` by LU with partial pivoting, forms the optimizer
/// `p = y / (vᵀy)` explicitly and evaluates `pᵀMp` directly. It is slower and
/// exists to cross-check [`ChristoffelFactor::evaluate`].
pub fn variational_evaluate(
    table: &MomentTable,
    degree: usize,
    mode: DegreeMode,
    z: &[f64],
) -> Result<f64> {
    let matrix = MomentMatrix::assemble(table, degree, mode)?;
    let m = matrix.size();
    let v = matrix.basis().monomial_vector(z)?;
    let y = lu_solve(matrix.data().to_vec(), m, v.clone()).ok_or_else(|| {
        Error::SingularMomentMatrix {
            vars: table.vars().to_vec(),
            detail: "LU elimination hit a zero pivot".into(),
        }
    })?;
    let scale: f64 = v.iter().zip(&y).map(|(a, b)| a * b).sum();
    if !(scale > 0.0) {
        return Err(Error::SingularMomentMatrix {
            vars: table.vars().to_vec(),
            detail: format!("constraint normalizer {scale} is not positive"),
        });
    }
    let p: Vec<f64> = y.iter().map(|x| x / scale).collect();
    let mut objective = 0.0;
    for i in 0..m {
        let mut row = 0.0;
        for j in 0..m {
            row += matrix.get(i, j) * p[j];
        }
        objective += p[i] * row;
    }
    Ok(1.0 / objective)
}
