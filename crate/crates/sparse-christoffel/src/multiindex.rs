//! Exponent vectors and monomial vectors over variable subsets.
//!
//! A [`MultiIndexBasis`] enumerates the exponent vectors `α` over a subset of
//! variables under one of two truncations:
//!
//! * total degree: `Σ αᵢ ≤ n`, with `binomial(n + k, k)` elements for `k` variables,
//! * coordinate-wise degree: `max αᵢ ≤ n`, with `(n + 1)^k` elements.
//!
//! The ordering is graded lexicographic (by total degree, then by exponent
//! tuple with the leading variable dominant) and deterministic, so every matrix
//! assembled over a basis is reproducible bit for bit across runs. The total
//! degree basis is always a prefix of the coordinate-wise basis for the same
//! variables and degree.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree truncation for polynomial bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegreeMode {
    /// All exponents with `Σ αᵢ ≤ n`.
    TotalDegree,
    /// All exponents with `max αᵢ ≤ n`.
    CoordinateWise,
}

impl fmt::Display for DegreeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeMode::TotalDegree => write!(f, "total"),
            DegreeMode::CoordinateWise => write!(f, "coord"),
        }
    }
}

impl std::str::FromStr for DegreeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(DegreeMode::TotalDegree),
            "coord" => Ok(DegreeMode::CoordinateWise),
            other => Err(Error::Parse(format!(
                "unknown degree mode {other:?}, expected \"coord\" or \"total\""
            ))),
        }
    }
}

/// Number of exponent vectors of total degree at most `n` in `k` variables.
pub fn total_degree_dim(n: usize, k: usize) -> usize {
    // binomial(n + k, k), computed without intermediate overflow for the
    // small (n, k) this crate deals with
    let mut acc: usize = 1;
    for i in 1..=k {
        acc = acc * (n + i) / i;
    }
    acc
}

/// Number of exponent vectors of coordinate-wise degree at most `n` in `k`
/// variables, or `None` when `(n + 1)^k` overflows.
pub fn coordinate_dim(n: usize, k: usize) -> Option<usize> {
    (n + 1).checked_pow(u32::try_from(k).ok()?)
}

/// Dimension of the basis in `k` variables for a given mode.
pub fn basis_dim(n: usize, k: usize, mode: DegreeMode) -> Option<usize> {
    match mode {
        DegreeMode::TotalDegree => Some(total_degree_dim(n, k)),
        DegreeMode::CoordinateWise => coordinate_dim(n, k),
    }
}

fn graded_lex(a: &[u32], b: &[u32]) -> Ordering {
    let sa: u32 = a.iter().sum();
    let sb: u32 = b.iter().sum();
    // within one grade the leading variable dominates: (1,0) before (0,1)
    sa.cmp(&sb).then_with(|| b.cmp(a))
}

/// An ordered list of exponent vectors over a variable subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiIndexBasis {
    vars: Vec<usize>,
    degree: usize,
    mode: DegreeMode,
    indices: Vec<Vec<u32>>,
}

impl MultiIndexBasis {
    /// Enumerate the basis over `vars` (1-based variable labels) up to `degree`.
    ///
    /// The first element is always the zero exponent vector.
    pub fn enumerate(vars: &[usize], degree: usize, mode: DegreeMode) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidArgument(
                "basis requires a nonempty variable set".into(),
            ));
        }
        let mut seen = vars.to_vec();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate variable in {vars:?}"
            )));
        }
        if vars.contains(&0) {
            return Err(Error::InvalidArgument(
                "variable labels are 1-based; found 0".into(),
            ));
        }

        let k = vars.len();
        let n = degree as u32;
        let mut indices = Vec::new();
        let mut current = vec![0u32; k];
        'outer: loop {
            if mode == DegreeMode::CoordinateWise || current.iter().sum::<u32>() <= n {
                indices.push(current.clone());
            }
            // odometer over {0..n}^k
            for pos in (0..k).rev() {
                if current[pos] < n {
                    current[pos] += 1;
                    current[pos + 1..].fill(0);
                    continue 'outer;
                }
            }
            break;
        }
        indices.sort_by(|a, b| graded_lex(a, b));

        Ok(MultiIndexBasis {
            vars: vars.to_vec(),
            degree,
            mode,
            indices,
        })
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mode(&self) -> DegreeMode {
        self.mode
    }

    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.vars.len() {
            return Err(Error::InvalidArgument(format!(
                "point has dimension {}, basis has {} variables",
                point.len(),
                self.vars.len()
            )));
        }
        Ok(())
    }

    /// Evaluate every monomial of the basis at `point`.
    ///
    /// The entry for `α` is `Π point_i^{α_i}`; the entry for the zero index is 1.
    pub fn monomial_vector(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_point(point)?;
        Ok(self
            .indices
            .iter()
            .map(|alpha| {
                alpha
                    .iter()
                    .zip(point)
                    .map(|(&e, &z)| z.powi(e as i32))
                    .product()
            })
            .collect())
    }

    /// Evaluate the exact average of every monomial over the axis-aligned box
    /// of side `epsilon` centred at `point`.
    ///
    /// The box has radius `epsilon / 2` per coordinate and Lebesgue volume
    /// `epsilon^k`; each entry is the closed-form per-coordinate product
    /// `Π [ (z_i + ε/2)^{α_i+1} − (z_i − ε/2)^{α_i+1} ] / ((α_i + 1) ε)`,
    /// never a quadrature. As `epsilon → 0` this converges entrywise to
    /// [`Self::monomial_vector`].
    pub fn averaged_monomial_vector(&self, point: &[f64], epsilon: f64) -> Result<Vec<f64>> {
        self.check_point(point)?;
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(self
            .indices
            .iter()
            .map(|alpha| {
                alpha
                    .iter()
                    .zip(point)
                    .map(|(&e, &z)| {
                        let p = e as i32 + 1;
                        let hi = (z + epsilon / 2.0).powi(p);
                        let lo = (z - epsilon / 2.0).powi(p);
                        (hi - lo) / (p as f64 * epsilon)
                    })
                    .product()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(basis: &MultiIndexBasis) -> Vec<Vec<u32>> {
        basis.indices().to_vec()
    }

    #[test]
    fn univariate_modes_coincide() {
        let t = MultiIndexBasis::enumerate(&[1], 2, DegreeMode::TotalDegree).unwrap();
        let c = MultiIndexBasis::enumerate(&[1], 2, DegreeMode::CoordinateWise).unwrap();
        assert_eq!(idx(&t), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(idx(&t), idx(&c));
        assert_eq!(t.len(), total_degree_dim(2, 1));
    }

    #[test]
    fn coordinate_wise_enumeration_and_order() {
        let b = MultiIndexBasis::enumerate(&[1, 2], 1, DegreeMode::CoordinateWise).unwrap();
        assert_eq!(
            idx(&b),
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]
        );
        assert_eq!(b.len(), coordinate_dim(1, 2).unwrap());
    }

    #[test]
    fn total_degree_count() {
        let b = MultiIndexBasis::enumerate(&[1, 2], 2, DegreeMode::TotalDegree).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(b.indices()[0], vec![0, 0]);
    }

    #[test]
    fn total_degree_is_prefix_of_coordinate_wise() {
        for k in 1..=3usize {
            for n in 0..=4usize {
                let vars: Vec<usize> = (1..=k).collect();
                let t = MultiIndexBasis::enumerate(&vars, n, DegreeMode::TotalDegree).unwrap();
                let c = MultiIndexBasis::enumerate(&vars, n, DegreeMode::CoordinateWise).unwrap();
                assert_eq!(&c.indices()[..t.len()], t.indices());
            }
        }
    }

    #[test]
    fn rejects_bad_variable_sets() {
        assert!(MultiIndexBasis::enumerate(&[], 1, DegreeMode::TotalDegree).is_err());
        assert!(MultiIndexBasis::enumerate(&[2, 2], 1, DegreeMode::TotalDegree).is_err());
        assert!(MultiIndexBasis::enumerate(&[0, 1], 1, DegreeMode::TotalDegree).is_err());
    }

    #[test]
    fn monomial_vector_values() {
        let b = MultiIndexBasis::enumerate(&[1, 2], 1, DegreeMode::CoordinateWise).unwrap();
        assert_eq!(b.monomial_vector(&[2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0, 6.0]);

        let origin = b.monomial_vector(&[0.0, 0.0]).unwrap();
        assert_eq!(origin, vec![1.0, 0.0, 0.0, 0.0]);

        let u = MultiIndexBasis::enumerate(&[1], 2, DegreeMode::TotalDegree).unwrap();
        assert_eq!(u.monomial_vector(&[-1.0]).unwrap(), vec![1.0, -1.0, 1.0]);

        assert!(b.monomial_vector(&[1.0]).is_err());
    }

    #[test]
    fn averaged_monomial_values() {
        let u = MultiIndexBasis::enumerate(&[1], 2, DegreeMode::TotalDegree).unwrap();
        // average of y over a symmetric interval is its centre
        let v = u.averaged_monomial_vector(&[0.5], 0.3).unwrap();
        assert!((v[1] - 0.5).abs() < 1e-15);
        // average of y^2 over [-1/2, 1/2] is 1/12
        let v = u.averaged_monomial_vector(&[0.0], 1.0).unwrap();
        assert!((v[2] - 1.0 / 12.0).abs() < 1e-15);
        // the constant monomial always averages to 1
        assert_eq!(v[0], 1.0);

        assert!(u.averaged_monomial_vector(&[0.0], 0.0).is_err());
        assert!(u.averaged_monomial_vector(&[0.0], -1.0).is_err());
    }

    #[test]
    fn averaged_vector_converges_to_monomial_vector() {
        let b = MultiIndexBasis::enumerate(&[1, 2], 4, DegreeMode::CoordinateWise).unwrap();
        for &z in &[[-2.0, 0.7], [0.0, 0.0], [1.3, -1.9], [2.0, 2.0]] {
            let plain = b.monomial_vector(&z).unwrap();
            let avg = b.averaged_monomial_vector(&z, 1e-4).unwrap();
            for (p, a) in plain.iter().zip(&avg) {
                // relative with an absolute floor of 1 for entries that vanish
                let scale = p.abs().max(1.0);
                assert!(
                    (p - a).abs() / scale < 1e-6,
                    "entry {p} vs {a} at point {z:?}"
                );
            }
        }
    }

    // midpoint-rule refinement, independent of the closed form above
    fn midpoint_average(alpha: &[u32], z: &[f64], eps: f64, cells: usize) -> f64 {
        fn rec(alpha: &[u32], z: &[f64], eps: f64, cells: usize, dim: usize) -> f64 {
            if dim == alpha.len() {
                return 1.0;
            }
            let mut acc = 0.0;
            let h = eps / cells as f64;
            for c in 0..cells {
                let y = z[dim] - eps / 2.0 + (c as f64 + 0.5) * h;
                acc += y.powi(alpha[dim] as i32) * rec(alpha, z, eps, cells, dim + 1);
            }
            acc / cells as f64
        }
        rec(alpha, z, eps, cells, 0)
    }

    #[test]
    fn averaged_vector_matches_quadrature_oracle() {
        // Richardson-style refinement of the midpoint rule: midpoint error is
        // O(h^2), so m(2h) and m(h) combine to an O(h^4) estimate.
        let cases = [
            (vec![1usize], 4usize, [0.3, 0.0, 0.0]),
            (vec![1, 2], 3, [0.5, -0.7, 0.0]),
            (vec![1, 2, 3], 2, [0.2, 1.1, -0.4]),
        ];
        for (vars, n, point) in cases {
            let k = vars.len();
            let b = MultiIndexBasis::enumerate(&vars, n, DegreeMode::CoordinateWise).unwrap();
            let closed = b.averaged_monomial_vector(&point[..k], 0.4).unwrap();
            for (alpha, c) in b.indices().iter().zip(&closed) {
                let coarse = midpoint_average(alpha, &point[..k], 0.4, 64);
                let fine = midpoint_average(alpha, &point[..k], 0.4, 128);
                let extrapolated = fine + (fine - coarse) / 3.0;
                assert!(
                    (c - extrapolated).abs() < 1e-10,
                    "alpha {alpha:?}: closed {c} vs quadrature {extrapolated}"
                );
            }
        }
    }
}
