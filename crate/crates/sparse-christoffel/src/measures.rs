//! Built-in measures with closed-form moments, densities and samplers.
//!
//! These serve as ground truth: their moments are exact, their densities are
//! known pointwise, and membership in their support is decidable, so every
//! statistical routine in the crate can be checked against them.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::GraphicalModel;
use crate::legendre::gauss_legendre;
use crate::moments::{AffineMap, MomentTable, Provenance, SampleSet};
use crate::multiindex::{DegreeMode, MultiIndexBasis};

/// `∫_{-1}^{1} x^k dx`: `2/(k+1)` for even `k`, zero for odd `k`.
fn interval_power_integral(k: u32) -> f64 {
    if k % 2 == 0 {
        2.0 / (k as f64 + 1.0)
    } else {
        0.0
    }
}

/// One coordinate of a product measure.
#[derive(Debug, Clone, PartialEq)]
pub enum CoordinateDensity {
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Density `3 (1 + x^2) / 8` on `[-1, 1]`, strictly positive everywhere
    /// on its support.
    Quadratic,
}

impl CoordinateDensity {
    fn moment(&self, k: u32) -> f64 {
        match self {
            CoordinateDensity::Uniform { lo, hi } => {
                let p = k as i32 + 1;
                (hi.powi(p) - lo.powi(p)) / (p as f64 * (hi - lo))
            }
            CoordinateDensity::Quadratic => {
                0.375 * (interval_power_integral(k) + interval_power_integral(k + 2))
            }
        }
    }

    fn density(&self, x: f64) -> f64 {
        match self {
            CoordinateDensity::Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            CoordinateDensity::Quadratic => {
                if (-1.0..=1.0).contains(&x) {
                    0.375 * (1.0 + x * x)
                } else {
                    0.0
                }
            }
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match self {
            CoordinateDensity::Uniform { lo, hi } => (*lo, *hi),
            CoordinateDensity::Quadratic => (-1.0, 1.0),
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            CoordinateDensity::Uniform { lo, hi } => rng.random_range(*lo..*hi),
            CoordinateDensity::Quadratic => loop {
                // rejection under the flat envelope of height 3/4 = f(±1)
                let x: f64 = rng.random_range(-1.0..1.0);
                let u: f64 = rng.random_range(0.0..1.0);
                if u * 2.0 <= 1.0 + x * x {
                    return x;
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum MeasureKind {
    Product(Vec<CoordinateDensity>),
    /// Density `(1 + x₁x₂)(1 + x₂x₃) / 8` on `[-1, 1]³`. Not a product
    /// measure, but coordinates 1 and 3 are independent given coordinate 2,
    /// so the chain `1 - 2 - 3` is a graphical model for it.
    CoupledChain,
}

/// A probability measure with exact moments, a pointwise density and a
/// support-membership test.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticMeasure {
    id: String,
    kind: MeasureKind,
}

impl AnalyticMeasure {
    /// Uniform probability measure on the box `Π [lo_i, hi_i]`.
    pub fn uniform_box(bounds: &[(f64, f64)]) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidArgument("empty box".into()));
        }
        if bounds.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::InvalidArgument(
                "box bounds must satisfy lo < hi".into(),
            ));
        }
        Ok(AnalyticMeasure {
            id: format!("uniform_box{}", bounds.len()),
            kind: MeasureKind::Product(
                bounds
                    .iter()
                    .map(|&(lo, hi)| CoordinateDensity::Uniform { lo, hi })
                    .collect(),
            ),
        })
    }

    /// Uniform probability measure on `[-1, 1]^d`.
    pub fn uniform_cube(dim: usize) -> Self {
        let mut m = AnalyticMeasure::uniform_box(&vec![(-1.0, 1.0); dim])
            .expect("unit cube is a valid box");
        m.id = format!("uniform{dim}");
        m
    }

    /// Product measure from per-coordinate densities.
    pub fn product(coords: Vec<CoordinateDensity>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("empty product".into()));
        }
        Ok(AnalyticMeasure {
            id: format!("product{}", coords.len()),
            kind: MeasureKind::Product(coords),
        })
    }

    /// The coupled three-variable measure with density
    /// `(1 + x₁x₂)(1 + x₂x₃) / 8` on `[-1, 1]³`.
    pub fn coupled_chain() -> Self {
        AnalyticMeasure {
            id: "coupled".into(),
            kind: MeasureKind::CoupledChain,
        }
    }

    /// Look up a measure by its string id: `uniform<d>`, `quad<d>` (product of
    /// quadratic coordinate densities) or `coupled`.
    pub fn from_id(id: &str) -> Result<Self> {
        if id == "coupled" {
            return Ok(AnalyticMeasure::coupled_chain());
        }
        if let Some(rest) = id.strip_prefix("uniform") {
            if let Ok(d) = rest.parse::<usize>() {
                if d >= 1 {
                    return Ok(AnalyticMeasure::uniform_cube(d));
                }
            }
        }
        if let Some(rest) = id.strip_prefix("quad") {
            if let Ok(d) = rest.parse::<usize>() {
                if d >= 1 {
                    let mut m =
                        AnalyticMeasure::product(vec![CoordinateDensity::Quadratic; d])?;
                    m.id = format!("quad{d}");
                    return Ok(m);
                }
            }
        }
        Err(Error::InvalidArgument(format!(
            "unknown measure id {id:?}; try \"uniform<d>\", \"quad<d>\" or \"coupled\""
        )))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            MeasureKind::Product(coords) => coords.len(),
            MeasureKind::CoupledChain => 3,
        }
    }

    /// The smallest graph that is a graphical model for this measure.
    pub fn default_graph(&self) -> GraphicalModel {
        match &self.kind {
            MeasureKind::Product(coords) => GraphicalModel::empty(coords.len()),
            MeasureKind::CoupledChain => GraphicalModel::chain(3),
        }
    }

    /// Support box, per coordinate.
    pub fn support(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            MeasureKind::Product(coords) => coords.iter().map(|c| c.bounds()).collect(),
            MeasureKind::CoupledChain => vec![(-1.0, 1.0); 3],
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self
                .support()
                .iter()
                .zip(x)
                .all(|((lo, hi), &v)| v >= *lo && v <= *hi)
    }

    pub fn is_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self
                .support()
                .iter()
                .zip(x)
                .all(|((lo, hi), &v)| v > *lo && v < *hi)
    }

    /// Density w.r.t. Lebesgue measure, zero outside the support.
    pub fn density(&self, x: &[f64]) -> f64 {
        match &self.kind {
            MeasureKind::Product(coords) => {
                coords.iter().zip(x).map(|(c, &v)| c.density(v)).product()
            }
            MeasureKind::CoupledChain => {
                if self.contains(x) {
                    (1.0 + x[0] * x[1]) * (1.0 + x[1] * x[2]) / 8.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact moment `μ_α` over the full variable list.
    pub fn moment(&self, alpha: &[u32]) -> f64 {
        debug_assert_eq!(alpha.len(), self.dim());
        match &self.kind {
            MeasureKind::Product(coords) => coords
                .iter()
                .zip(alpha)
                .map(|(c, &k)| c.moment(k))
                .product(),
            MeasureKind::CoupledChain => {
                // expand (1 + x₁x₂)(1 + x₂x₃) = 1 + x₁x₂ + x₂x₃ + x₁x₂²x₃
                let i = interval_power_integral;
                let (a, b, c) = (alpha[0], alpha[1], alpha[2]);
                (i(a) * i(b) * i(c)
                    + i(a + 1) * i(b + 1) * i(c)
                    + i(a) * i(b + 1) * i(c + 1)
                    + i(a + 1) * i(b + 2) * i(c + 1))
                    / 8.0
            }
        }
    }

    /// Exact marginal moments over `vars`, complete up to coordinate-wise
    /// `degree`: the marginal's moments are the full moments with exponent
    /// zero outside `vars`.
    pub fn moments(&self, vars: &[usize], degree: usize) -> Result<MomentTable> {
        if let Some(&v) = vars.iter().find(|&&v| v == 0 || v > self.dim()) {
            return Err(Error::InvalidArgument(format!(
                "variable {v} outside measure dimension {}",
                self.dim()
            )));
        }
        let basis = MultiIndexBasis::enumerate(vars, degree, DegreeMode::CoordinateWise)?;
        let mut entries = BTreeMap::new();
        for alpha in basis.indices() {
            let mut full = vec![0u32; self.dim()];
            for (&v, &e) in vars.iter().zip(alpha) {
                full[v - 1] = e;
            }
            entries.insert(alpha.clone(), self.moment(&full));
        }
        MomentTable::from_entries(
            vars.to_vec(),
            degree,
            entries,
            Provenance::Analytic(self.id.clone()),
        )
    }

    /// Rewrite the measure over `[-1, 1]` coordinates, returning the change of
    /// variables that maps raw space onto the normalized one.
    pub fn normalize(&self) -> (AnalyticMeasure, AffineMap) {
        match &self.kind {
            MeasureKind::Product(coords) => {
                let bounds: Vec<(f64, f64)> = coords.iter().map(|c| c.bounds()).collect();
                let map = AffineMap::from_box(&bounds).expect("valid support box");
                let normalized = coords
                    .iter()
                    .map(|c| match c {
                        CoordinateDensity::Uniform { .. } => {
                            CoordinateDensity::Uniform { lo: -1.0, hi: 1.0 }
                        }
                        CoordinateDensity::Quadratic => CoordinateDensity::Quadratic,
                    })
                    .collect();
                (
                    AnalyticMeasure {
                        id: self.id.clone(),
                        kind: MeasureKind::Product(normalized),
                    },
                    map,
                )
            }
            MeasureKind::CoupledChain => (self.clone(), AffineMap::identity(3)),
        }
    }

    /// Draw `n` independent points with a fixed seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim();
        let mut data = Vec::with_capacity(n * d);
        match &self.kind {
            MeasureKind::Product(coords) => {
                for _ in 0..n {
                    for c in coords {
                        data.push(c.sample(&mut rng));
                    }
                }
            }
            MeasureKind::CoupledChain => {
                // x₂ is uniform; x₁ and x₃ have conditional density
                // (1 + t·y)/2 given x₂ = t, sampled by rejection under the
                // envelope (1 + |t|)/2
                let conditional = |rng: &mut ChaCha8Rng, t: f64| loop {
                    let y: f64 = rng.random_range(-1.0..1.0);
                    let u: f64 = rng.random_range(0.0..1.0);
                    if u * (1.0 + t.abs()) <= 1.0 + t * y {
                        return y;
                    }
                };
                for _ in 0..n {
                    let x2: f64 = rng.random_range(-1.0..1.0);
                    let x1 = conditional(&mut rng, x2);
                    let x3 = conditional(&mut rng, x2);
                    data.extend([x1, x2, x3]);
                }
            }
        }
        SampleSet::new(data, n, d)
    }
}

/// Moments of a user-supplied density on a box by tensor Gauss-Legendre
/// quadrature, normalized so the zeroth moment is exactly 1. Exact (up to
/// rounding) whenever `density` is a polynomial of degree below
/// `2 * points_per_dim - degree`.
pub fn quadrature_moments(
    density: impl Fn(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    vars: &[usize],
    degree: usize,
    points_per_dim: usize,
) -> Result<MomentTable> {
    let d = bounds.len();
    if let Some(&v) = vars.iter().find(|&&v| v == 0 || v > d) {
        return Err(Error::InvalidArgument(format!(
            "variable {v} outside box dimension {d}"
        )));
    }
    let basis = MultiIndexBasis::enumerate(vars, degree, DegreeMode::CoordinateWise)?;
    let (nodes, weights) = gauss_legendre(points_per_dim);

    // per-dimension nodes mapped onto the box
    let mapped: Vec<(Vec<f64>, Vec<f64>)> = bounds
        .iter()
        .map(|&(lo, hi)| {
            let c = 0.5 * (lo + hi);
            let h = 0.5 * (hi - lo);
            (
                nodes.iter().map(|&t| c + h * t).collect(),
                weights.iter().map(|&w| w * h).collect(),
            )
        })
        .collect();

    let mut sums = vec![0.0f64; basis.len()];
    let mut mass = 0.0f64;
    let mut index = vec![0usize; d];
    let mut point = vec![0.0f64; d];
    'grid: loop {
        let mut w = 1.0;
        for (dim, &i) in index.iter().enumerate() {
            point[dim] = mapped[dim].0[i];
            w *= mapped[dim].1[i];
        }
        let fw = w * density(&point);
        mass += fw;
        for (s, alpha) in sums.iter_mut().zip(basis.indices()) {
            let mut m = fw;
            for (&v, &e) in vars.iter().zip(alpha) {
                m *= point[v - 1].powi(e as i32);
            }
            *s += m;
        }
        for dim in (0..d).rev() {
            index[dim] += 1;
            if index[dim] < points_per_dim {
                continue 'grid;
            }
            index[dim] = 0;
        }
        break;
    }

    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "density mass {mass} is not positive"
        )));
    }
    let mut entries = BTreeMap::new();
    for (alpha, s) in basis.indices().iter().zip(&sums) {
        entries.insert(alpha.clone(), s / mass);
    }
    MomentTable::from_entries(vars.to_vec(), degree, entries, Provenance::Quadrature)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_interval_moments() {
        let m = AnalyticMeasure::uniform_cube(1);
        let t = m.moments(&[1], 4).unwrap();
        assert!((t.get(&[2]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.get(&[3]).unwrap(), 0.0);
        assert_eq!(t.get(&[0]).unwrap(), 1.0);
    }

    #[test]
    fn coupled_moments_match_hand_integration() {
        let m = AnalyticMeasure::coupled_chain();
        // ∫ x₁x₂ (1+x₁x₂)/4 over [-1,1]² = 1/9 once the x₂x₃ factor integrates out
        let t = m.moments(&[1, 2], 2).unwrap();
        assert!((t.get(&[1, 1]).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        // odd symmetry in the middle coordinate
        let t2 = m.moments(&[2], 2).unwrap();
        assert_eq!(t2.get(&[1]).unwrap(), 0.0);
        assert!((t2.get(&[2]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_moments_match_quadrature_oracle() {
        for measure in [
            AnalyticMeasure::uniform_cube(2),
            AnalyticMeasure::product(vec![
                CoordinateDensity::Quadratic,
                CoordinateDensity::Uniform { lo: -0.5, hi: 2.0 },
            ])
            .unwrap(),
            AnalyticMeasure::coupled_chain(),
        ] {
            let d = measure.dim();
            let vars: Vec<usize> = (1..=d).collect();
            let analytic = measure.moments(&vars, 4).unwrap();
            let quad = quadrature_moments(
                |x| measure.density(x),
                &measure.support(),
                &vars,
                4,
                12,
            )
            .unwrap();
            for (alpha, value) in analytic.entries() {
                let reference = quad.get(alpha).unwrap();
                assert!(
                    (value - reference).abs() < 1e-10,
                    "{}: alpha {alpha:?}: {value} vs {reference}",
                    measure.id()
                );
            }
        }
    }

    #[test]
    fn restriction_consistency_over_subsets() {
        let m = AnalyticMeasure::coupled_chain();
        let subsets: [&[usize]; 6] = [&[1], &[2], &[3], &[1, 2], &[2, 3], &[1, 3]];
        let full = m.moments(&[1, 2, 3], 6).unwrap();
        for sub in subsets {
            let direct = m.moments(sub, 6).unwrap();
            let restricted = full.restrict(sub).unwrap();
            for (alpha, value) in direct.entries() {
                assert!((value - restricted.get(alpha).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn densities_are_normalized() {
        for measure in [
            AnalyticMeasure::uniform_cube(2),
            AnalyticMeasure::from_id("quad2").unwrap(),
            AnalyticMeasure::coupled_chain(),
        ] {
            let d = measure.dim();
            let vars: Vec<usize> = (1..=d).collect();
            let quad = quadrature_moments(
                |x| measure.density(x),
                &measure.support(),
                &vars,
                0,
                16,
            );
            assert!(quad.is_ok(), "{} density must have unit mass", measure.id());
        }
    }

    #[test]
    fn sampler_matches_moments() {
        for measure in [
            AnalyticMeasure::from_id("quad1").unwrap(),
            AnalyticMeasure::coupled_chain(),
        ] {
            let n = 200_000;
            let s = measure.sample(n, 99).unwrap();
            let d = measure.dim();
            let vars: Vec<usize> = (1..=d).collect();
            let emp = crate::moments::empirical_moments(&s, &vars, 2).unwrap();
            let ana = measure.moments(&vars, 2).unwrap();
            for (alpha, value) in ana.entries() {
                let got = emp.get(alpha).unwrap();
                // moments are bounded by 1, so a flat 4/sqrt(N) window is ~4 sigma
                let tol = 4.0 / (n as f64).sqrt();
                assert!(
                    (got - value).abs() < tol,
                    "{}: alpha {alpha:?}: {got} vs {value}",
                    measure.id()
                );
            }
        }
    }

    #[test]
    fn from_id_parses_and_rejects() {
        assert_eq!(AnalyticMeasure::from_id("uniform3").unwrap().dim(), 3);
        assert_eq!(AnalyticMeasure::from_id("coupled").unwrap().dim(), 3);
        assert_eq!(AnalyticMeasure::from_id("quad4").unwrap().dim(), 4);
        assert!(AnalyticMeasure::from_id("uniform0").is_err());
        assert!(AnalyticMeasure::from_id("gauss3").is_err());
    }

    #[test]
    fn normalization_maps_support_to_unit_cube() {
        let m = AnalyticMeasure::uniform_box(&[(0.0, 4.0), (-2.0, -1.0)]).unwrap();
        let (normalized, map) = m.normalize();
        assert_eq!(normalized.support(), vec![(-1.0, 1.0), (-1.0, 1.0)]);
        assert_eq!(map.apply(&[4.0, -1.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(map.apply(&[2.0, -1.5]).unwrap(), vec![0.0, 0.0]);
        // moments of the normalized measure equal unit-cube moments
        let t = normalized.moments(&[1, 2], 2).unwrap();
        assert!((t.get(&[2, 0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }
}
