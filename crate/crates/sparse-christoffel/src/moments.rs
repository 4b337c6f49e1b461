//! Moment tables for variable subsets, from samples or analytic measures.
//!
//! A clique's factor needs every moment `μ_α` with `max α_i ≤ 2n` over its
//! variables. Tables are computed once per clique and separators reuse a
//! covering clique's table through [`MomentTable::restrict`], so numerator and
//! denominator factors of the rational function always share exactly the same
//! moment information.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::multiindex::{DegreeMode, MultiIndexBasis};

/// A finite set of points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    data: Vec<f64>,
    num_points: usize,
    dim: usize,
}

impl SampleSet {
    pub fn new(data: Vec<f64>, num_points: usize, dim: usize) -> Result<Self> {
        if num_points == 0 || dim == 0 {
            return Err(Error::InvalidArgument(
                "sample set needs at least one point and one coordinate".into(),
            ));
        }
        if data.len() != num_points * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} values for {num_points} x {dim} samples, got {}",
                num_points * dim,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "sample set contains a non-finite value".into(),
            ));
        }
        Ok(SampleSet {
            data,
            num_points,
            dim,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let num_points = rows.len();
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("ragged sample rows".into()));
        }
        SampleSet::new(rows.concat(), num_points, dim)
    }

    /// Parse headerless CSV: one point per row, `d` comma-separated decimal
    /// floats per line.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| {
                Error::Parse(format!("line {}: {e} in {line:?}", lineno + 1))
            })?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse(format!(
                        "line {}: expected {} columns, got {}",
                        lineno + 1,
                        first.len(),
                        row.len()
                    )));
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("no data rows".into()));
        }
        SampleSet::from_rows(&rows)
    }

    pub fn from_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        SampleSet::parse_csv(&std::fs::read_to_string(path)?)
    }

    /// Write the samples back out in the input CSV format.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.num_points {
            let fields: Vec<String> = self.point(i).iter().map(|v| format!("{v}")).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Per-coordinate `(min, max)` over all points.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for p in self.points() {
            for (b, &x) in bounds.iter_mut().zip(p) {
                b.0 = b.0.min(x);
                b.1 = b.1.max(x);
            }
        }
        bounds
    }
}

/// Where a moment table's numbers came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Empirical,
    Analytic(String),
    Quadrature,
}

/// Moments `α → μ_α` of one variable subset, complete up to a coordinate-wise
/// degree bound.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    vars: Vec<usize>,
    degree: usize,
    entries: BTreeMap<Vec<u32>, f64>,
    provenance: Provenance,
}

impl MomentTable {
    pub(crate) fn from_entries(
        vars: Vec<usize>,
        degree: usize,
        entries: BTreeMap<Vec<u32>, f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        let expected = MultiIndexBasis::enumerate(&vars, degree, DegreeMode::CoordinateWise)?;
        if entries.len() != expected.len() {
            return Err(Error::InvalidArgument(format!(
                "moment table over {vars:?} has {} entries, expected {}",
                entries.len(),
                expected.len()
            )));
        }
        if entries.values().any(|v| !v.is_finite()) {
            return Err(Error::NumericOverflow(format!(
                "non-finite moment over {vars:?}"
            )));
        }
        let zero = vec![0u32; vars.len()];
        match entries.get(&zero) {
            Some(&m0) if (m0 - 1.0).abs() < 1e-9 => {}
            other => {
                return Err(Error::InvalidArgument(format!(
                    "zeroth moment must be 1, got {other:?}"
                )))
            }
        }
        Ok(MomentTable {
            vars,
            degree,
            entries,
            provenance,
        })
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    /// Highest per-coordinate exponent available.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn get(&self, alpha: &[u32]) -> Option<f64> {
        self.entries.get(alpha).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.entries.iter().map(|(a, &v)| (a.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Marginal table over `subvars`: entries are this table's entries with
    /// exponent zero outside `subvars`. Nothing is recomputed from data, so a
    /// separator table restricted out of a clique table is exactly consistent
    /// with it.
    pub fn restrict(&self, subvars: &[usize]) -> Result<MomentTable> {
        let positions: Result<Vec<usize>> = subvars
            .iter()
            .map(|v| {
                self.vars
                    .iter()
                    .position(|w| w == v)
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "variable {v} not in table over {:?}",
                            self.vars
                        ))
                    })
            })
            .collect();
        let positions = positions?;
        let basis =
            MultiIndexBasis::enumerate(subvars, self.degree, DegreeMode::CoordinateWise)?;
        let mut entries = BTreeMap::new();
        for alpha in basis.indices() {
            let mut full = vec![0u32; self.vars.len()];
            for (&p, &e) in positions.iter().zip(alpha) {
                full[p] = e;
            }
            let value = self.entries.get(&full).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "table over {:?} lacks moment {full:?}",
                    self.vars
                ))
            })?;
            entries.insert(alpha.clone(), *value);
        }
        MomentTable::from_entries(
            subvars.to_vec(),
            self.degree,
            entries,
            self.provenance.clone(),
        )
    }
}

/// Empirical moments `(1/N) Σ_k X_k^α` of `samples` restricted to `vars`,
/// complete up to coordinate-wise `degree`.
pub fn empirical_moments(
    samples: &SampleSet,
    vars: &[usize],
    degree: usize,
) -> Result<MomentTable> {
    if let Some(&v) = vars.iter().find(|&&v| v == 0 || v > samples.dim()) {
        return Err(Error::InvalidArgument(format!(
            "variable {v} outside sample dimension {}",
            samples.dim()
        )));
    }
    let basis = MultiIndexBasis::enumerate(vars, degree, DegreeMode::CoordinateWise)?;
    let k = vars.len();
    let mut sums = vec![0.0f64; basis.len()];
    // per-point power table: powers[j][e] = x_{vars[j]}^e
    let mut powers = vec![0.0f64; k * (degree + 1)];
    for point in samples.points() {
        for (j, &v) in vars.iter().enumerate() {
            let x = point[v - 1];
            let row = &mut powers[j * (degree + 1)..(j + 1) * (degree + 1)];
            row[0] = 1.0;
            for e in 1..=degree {
                row[e] = row[e - 1] * x;
            }
        }
        for (s, alpha) in sums.iter_mut().zip(basis.indices()) {
            let mut m = 1.0;
            for (j, &e) in alpha.iter().enumerate() {
                m *= powers[j * (degree + 1) + e as usize];
            }
            *s += m;
        }
    }
    let n = samples.num_points() as f64;
    let mut entries = BTreeMap::new();
    for (alpha, s) in basis.indices().iter().zip(&sums) {
        let value = s / n;
        if !value.is_finite() {
            return Err(Error::NumericOverflow(format!(
                "empirical moment {alpha:?} over {vars:?} is not finite"
            )));
        }
        entries.insert(alpha.clone(), value);
    }
    MomentTable::from_entries(vars.to_vec(), degree, entries, Provenance::Empirical)
}

/// Per-coordinate affine change of variables `y_i = (x_i - center_i) / half_width_i`,
/// mapping a data box onto `[-1, 1]^d`. Christoffel values are invariant under
/// it, raw high-degree moments of unscaled data are not usable without it.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    centers: Vec<f64>,
    half_widths: Vec<f64>,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        AffineMap {
            centers: vec![0.0; dim],
            half_widths: vec![1.0; dim],
        }
    }

    pub fn new(centers: Vec<f64>, half_widths: Vec<f64>) -> Result<Self> {
        if centers.len() != half_widths.len() {
            return Err(Error::InvalidArgument("affine map length mismatch".into()));
        }
        if half_widths.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidArgument(
                "affine map half-widths must be positive".into(),
            ));
        }
        Ok(AffineMap {
            centers,
            half_widths,
        })
    }

    /// Min/max box of the samples mapped onto `[-1, 1]^d`. A degenerate
    /// coordinate (constant in the data) keeps half-width 1 around its value.
    pub fn from_samples(samples: &SampleSet) -> Self {
        let mut centers = Vec::with_capacity(samples.dim());
        let mut half_widths = Vec::with_capacity(samples.dim());
        for (lo, hi) in samples.bounding_box() {
            centers.push(0.5 * (lo + hi));
            let h = 0.5 * (hi - lo);
            half_widths.push(if h > 0.0 { h } else { 1.0 });
        }
        AffineMap {
            centers,
            half_widths,
        }
    }

    pub fn from_box(bounds: &[(f64, f64)]) -> Result<Self> {
        let centers = bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
        let half_widths = bounds.iter().map(|(lo, hi)| 0.5 * (hi - lo)).collect();
        AffineMap::new(centers, half_widths)
    }

    pub fn dim(&self) -> usize {
        self.centers.len()
    }

    pub fn is_identity(&self) -> bool {
        self.centers.iter().all(|&c| c == 0.0) && self.half_widths.iter().all(|&h| h == 1.0)
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "point has dimension {}, map has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(x.iter()
            .zip(&self.centers)
            .zip(&self.half_widths)
            .map(|((&x, &c), &h)| (x - c) / h)
            .collect())
    }

    pub fn apply_to_samples(&self, samples: &SampleSet) -> Result<SampleSet> {
        let mut data = Vec::with_capacity(samples.num_points() * samples.dim());
        for p in samples.points() {
            data.extend(self.apply(p)?);
        }
        SampleSet::new(data, samples.num_points(), samples.dim())
    }

    /// Product of the half-widths: the Jacobian factor relating densities in
    /// raw and mapped coordinates, `f_raw(x) = f_mapped(y) / volume_scale`.
    pub fn volume_scale(&self) -> f64 {
        self.half_widths.iter().product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::AnalyticMeasure;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn two_point_average() {
        let s = SampleSet::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let t = empirical_moments(&s, &[1], 2).unwrap();
        assert_eq!(t.get(&[2]), Some(5.0));
        assert_eq!(t.get(&[0]), Some(1.0));
        let t12 = empirical_moments(&s, &[1, 2], 2).unwrap();
        assert_eq!(t12.get(&[1, 1]), Some(0.5 * (1.0 * 2.0 + 3.0 * 4.0)));
        assert_eq!(t12.get(&[0, 0]), Some(1.0));
    }

    #[test]
    fn rejects_out_of_range_vars() {
        let s = SampleSet::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(empirical_moments(&s, &[3], 2).is_err());
        assert!(empirical_moments(&s, &[0], 2).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let s = SampleSet::from_rows(&[vec![1e200], vec![-1e200]]).unwrap();
        let err = empirical_moments(&s, &[1], 4).unwrap_err();
        assert!(matches!(err, Error::NumericOverflow(_)), "{err}");
    }

    #[test]
    fn monte_carlo_second_moment_within_three_stderr() {
        let mut rng = StdRng::seed_from_u64(11);
        let n = 100_000usize;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-1.0..1.0)]).collect();
        let s = SampleSet::from_rows(&rows).unwrap();
        let t = empirical_moments(&s, &[1], 2).unwrap();
        // Var(x^2) = E x^4 - (E x^2)^2 = 1/5 - 1/9 = 4/45 for uniform [-1,1]
        let stderr = (4.0 / 45.0 / n as f64).sqrt();
        let got = t.get(&[2]).unwrap();
        assert!(
            (got - 1.0 / 3.0).abs() < 3.0 * stderr,
            "got {got}, stderr {stderr}"
        );
    }

    #[test]
    fn empirical_converges_to_analytic_on_fixed_seed() {
        let mut rng = StdRng::seed_from_u64(202);
        let n = 100_000usize;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        let s = SampleSet::from_rows(&rows).unwrap();
        let emp = empirical_moments(&s, &[1, 2], 4).unwrap();
        let ana = AnalyticMeasure::uniform_cube(2).moments(&[1, 2], 4).unwrap();
        for (alpha, value) in emp.entries() {
            let reference = ana.get(alpha).unwrap();
            assert!(
                (value - reference).abs() < 0.02,
                "alpha {alpha:?}: {value} vs {reference}"
            );
        }
    }

    #[test]
    fn restrict_matches_definition() {
        let s = SampleSet::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![-1.0, 0.5]]).unwrap();
        let t = empirical_moments(&s, &[1, 2], 4).unwrap();
        let r = t.restrict(&[1]).unwrap();
        assert_eq!(r.get(&[2]), t.get(&[2, 0]));
        // restriction to the full variable set is the identity
        let full = t.restrict(&[1, 2]).unwrap();
        assert_eq!(full, t);
        assert!(t.restrict(&[3]).is_err());
    }

    #[test]
    fn empirical_matrix_is_gram_of_sample_monomials() {
        use crate::multiindex::{DegreeMode, MultiIndexBasis};
        let mut rng = StdRng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        let s = SampleSet::from_rows(&rows).unwrap();
        let t = empirical_moments(&s, &[1, 2], 4).unwrap();
        let basis = MultiIndexBasis::enumerate(&[1, 2], 2, DegreeMode::CoordinateWise).unwrap();
        // M[i][j] assembled from the table equals the Gram matrix
        // (1/N) Σ v(x) v(x)^T of sample monomial vectors, hence PSD
        let m = basis.len();
        let mut gram = vec![0.0f64; m * m];
        for p in s.points() {
            let v = basis.monomial_vector(p).unwrap();
            for i in 0..m {
                for j in 0..m {
                    gram[i * m + j] += v[i] * v[j];
                }
            }
        }
        for g in gram.iter_mut() {
            *g /= s.num_points() as f64;
        }
        for (i, a) in basis.indices().iter().enumerate() {
            for (j, b) in basis.indices().iter().enumerate() {
                let key: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let from_table = t.get(&key).unwrap();
                assert!((from_table - gram[i * m + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn csv_parsing() {
        let s = SampleSet::parse_csv("1.0,2.0\n3.0,4.5\n").unwrap();
        assert_eq!(s.num_points(), 2);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.point(1), &[3.0, 4.5]);
        assert!(SampleSet::parse_csv("").is_err());
        assert!(SampleSet::parse_csv("1.0,a\n").is_err());
        assert!(SampleSet::parse_csv("1.0,2.0\n3.0\n").is_err());
        let round = SampleSet::parse_csv(&s.to_csv()).unwrap();
        assert_eq!(round, s);
    }

    #[test]
    fn affine_map_from_samples() {
        let s = SampleSet::from_rows(&[vec![0.0, 5.0], vec![4.0, 5.0], vec![2.0, 5.0]]).unwrap();
        let map = AffineMap::from_samples(&s);
        assert_eq!(map.apply(&[0.0, 5.0]).unwrap(), vec![-1.0, 0.0]);
        assert_eq!(map.apply(&[4.0, 5.0]).unwrap(), vec![1.0, 0.0]);
        // degenerate second coordinate keeps half-width 1
        assert_eq!(map.half_widths()[1], 1.0);
        assert_eq!(map.volume_scale(), 2.0);
        let mapped = map.apply_to_samples(&s).unwrap();
        assert_eq!(mapped.point(2), &[0.0, 0.0]);
    }
}
