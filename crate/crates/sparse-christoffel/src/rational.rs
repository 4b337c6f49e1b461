//! The rational Christoffel function over a junction tree.
//!
//! Given a junction tree with cliques `C_k` and separators `S_k`, the model
//! evaluates
//!
//! ```text
//! Ψ(x) = Π_k Λ(x_{C_k}) / Π_k Λ(x_{S_k})
//! ```
//!
//! where each `Λ` is the coordinate-wise (or, optionally, total-degree)
//! Christoffel polynomial of the corresponding marginal. Every factor is
//! fitted from a moment matrix of size at most `(n+1)^cl(J)` instead of the
//! dense `(n+1)^d`, and there are at most `2d` factors. Outside the support
//! Ψ grows exponentially in the degree while inside it stays polynomially
//! bounded, which is what makes it a support-inference and outlier score.
//! Evaluation runs in the log domain; the plain product is a convenience
//! wrapper that may overflow to `+inf` for far-out points at high degree.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::christoffel::ChristoffelFactor;
use crate::error::{Error, Result};
use crate::graph::{GraphicalModel, JunctionTree};
use crate::measures::AnalyticMeasure;
use crate::moments::{empirical_moments, AffineMap, MomentTable, SampleSet};
use crate::multiindex::{DegreeMode, MultiIndexBasis};

/// Default per-factor degree guardrail: monomial moment matrices are
/// Hilbert-like, and beyond this degree double precision runs out.
pub const DEFAULT_MAX_DEGREE: usize = 12;

/// Tolerance for the `L·Lᵀ ≈ M` verification performed when loading a model
/// file.
pub const LOAD_RECONSTRUCTION_TOL: f64 = 1e-8;

/// Knobs for [`RationalModel`] fitting.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Factor degree `n`; every factor uses the same degree.
    pub degree: usize,
    /// Basis truncation for the factors. Coordinate-wise is the default; the
    /// total-degree variant is cheaper per factor but loses exact product
    /// factorization over product measures.
    pub mode: DegreeMode,
    /// Diagonal shift added to every moment matrix before factorization.
    /// Nonzero jitter voids the exact `Ψ ≥ 1` guarantee.
    pub jitter: f64,
    /// Affinely rescale each coordinate onto `[-1, 1]` (from the sample
    /// bounding box, or the measure's support box) before computing moments.
    pub rescale: bool,
    /// Upper bound on `degree`; raise it explicitly to go past the default.
    pub max_degree: usize,
    /// Keep the log-scores of the training samples inside the model so that
    /// quantile thresholds for outlier flagging are available later.
    pub retain_scores: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            degree: 2,
            mode: DegreeMode::CoordinateWise,
            jitter: 0.0,
            rescale: true,
            max_degree: DEFAULT_MAX_DEGREE,
            retain_scores: true,
        }
    }
}

impl FitOptions {
    pub fn degree(degree: usize) -> Self {
        FitOptions {
            degree,
            ..FitOptions::default()
        }
    }

    pub fn with_mode(mut self, mode: DegreeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_jitter(mut self, jitter: f64) -> Self {
        self.jitter = jitter;
        self
    }

    pub fn with_rescale(mut self, rescale: bool) -> Self {
        self.rescale = rescale;
        self
    }
}

enum Source<'a> {
    Samples(&'a SampleSet),
    Measure(&'a AnalyticMeasure),
}

/// Per-point outlier scores against a fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    /// Log-domain score of each input point.
    pub scores: Vec<f64>,
    /// `scores[i] > threshold`.
    pub flags: Vec<bool>,
    /// The training-score quantile used as decision boundary.
    pub threshold: f64,
}

/// A fitted rational Christoffel function: one Christoffel factor per clique
/// and per (nonempty) separator of a junction tree, plus the affine rescaling
/// applied to the data. Immutable once fitted; evaluation is read-only.
#[derive(Debug, Clone)]
pub struct RationalModel {
    graph: GraphicalModel,
    tree: JunctionTree,
    degree: usize,
    mode: DegreeMode,
    jitter: f64,
    rescale: AffineMap,
    clique_tables: Vec<MomentTable>,
    clique_factors: Vec<ChristoffelFactor>,
    /// Indexed like the cliques; `None` for the root and for empty separators,
    /// whose factor is the constant 1.
    separator_tables: Vec<Option<MomentTable>>,
    separator_factors: Vec<Option<ChristoffelFactor>>,
    training_scores: Option<Vec<f64>>,
    provenance: String,
}

impl RationalModel {
    /// Fit from samples using the junction tree of `graph`'s min-fill chordal
    /// completion.
    pub fn fit_samples(
        samples: &SampleSet,
        graph: &GraphicalModel,
        options: &FitOptions,
    ) -> Result<Self> {
        let tree = JunctionTree::build(graph)?;
        Self::fit_source(Source::Samples(samples), graph.clone(), tree, options)
    }

    /// Fit from exact moments of an analytic measure.
    pub fn fit_measure(
        measure: &AnalyticMeasure,
        graph: &GraphicalModel,
        options: &FitOptions,
    ) -> Result<Self> {
        let tree = JunctionTree::build(graph)?;
        Self::fit_source(Source::Measure(measure), graph.clone(), tree, options)
    }

    /// Fit from samples over an explicitly chosen junction tree. The rational
    /// function depends on this choice; supplying the tree pins it down.
    pub fn fit_samples_with_tree(
        samples: &SampleSet,
        tree: JunctionTree,
        options: &FitOptions,
    ) -> Result<Self> {
        let graph = graph_of_cliques(&tree);
        Self::fit_source(Source::Samples(samples), graph, tree, options)
    }

    /// Fit from an analytic measure over an explicitly chosen junction tree.
    pub fn fit_measure_with_tree(
        measure: &AnalyticMeasure,
        tree: JunctionTree,
        options: &FitOptions,
    ) -> Result<Self> {
        let graph = graph_of_cliques(&tree);
        Self::fit_source(Source::Measure(measure), graph, tree, options)
    }

    fn fit_source(
        source: Source<'_>,
        graph: GraphicalModel,
        tree: JunctionTree,
        options: &FitOptions,
    ) -> Result<Self> {
        if options.degree == 0 {
            return Err(Error::InvalidArgument(
                "fitting needs degree at least 1".into(),
            ));
        }
        if options.degree > options.max_degree {
            return Err(Error::InvalidArgument(format!(
                "degree {} exceeds the guardrail {}; moment matrices of monomials are \
                 numerically hopeless at high degree in double precision, raise \
                 max_degree explicitly to override",
                options.degree, options.max_degree
            )));
        }
        let dim = match &source {
            Source::Samples(s) => s.dim(),
            Source::Measure(m) => m.dim(),
        };
        if dim != tree.num_vars() {
            return Err(Error::InvalidArgument(format!(
                "data dimension {dim} does not match the {}-variable graph",
                tree.num_vars()
            )));
        }

        // one rescaling for the whole model; factor values are invariant
        // under per-coordinate affine maps, raw moments are not
        let (scaled_samples, scaled_measure, rescale) = match &source {
            Source::Samples(s) => {
                let map = if options.rescale {
                    AffineMap::from_samples(s)
                } else {
                    AffineMap::identity(dim)
                };
                (Some(map.apply_to_samples(s)?), None, map)
            }
            Source::Measure(m) => {
                if options.rescale {
                    let (normalized, map) = m.normalize();
                    (None, Some(normalized), map)
                } else {
                    (None, Some((*m).clone()), AffineMap::identity(dim))
                }
            }
        };

        let table_degree = 2 * options.degree;
        let make_table = |vars: &[usize]| -> Result<MomentTable> {
            match (&scaled_samples, &scaled_measure) {
                (Some(s), _) => empirical_moments(s, vars, table_degree),
                (_, Some(m)) => m.moments(vars, table_degree),
                _ => unreachable!("one source is always present"),
            }
        };

        // moment accumulation and factorization are independent per clique
        let fitted: Result<Vec<(MomentTable, ChristoffelFactor)>> = tree
            .cliques()
            .par_iter()
            .map(|clique| {
                let table = make_table(clique)?;
                let factor =
                    ChristoffelFactor::fit(&table, options.degree, options.mode, options.jitter)?;
                Ok((table, factor))
            })
            .collect();
        let (clique_tables, clique_factors): (Vec<_>, Vec<_>) = fitted?.into_iter().unzip();

        // separator moments are restrictions of the owning clique's table,
        // never a second pass over the data
        let mut separator_tables = Vec::with_capacity(tree.cliques().len());
        let mut separator_factors = Vec::with_capacity(tree.cliques().len());
        for (k, sep) in tree.separators().iter().enumerate() {
            if sep.is_empty() {
                separator_tables.push(None);
                separator_factors.push(None);
            } else {
                let table = clique_tables[k].restrict(sep)?;
                let factor =
                    ChristoffelFactor::fit(&table, options.degree, options.mode, options.jitter)?;
                separator_tables.push(Some(table));
                separator_factors.push(Some(factor));
            }
        }

        let provenance = match &source {
            Source::Samples(s) => format!(
                "empirical(points={}, rescale={})",
                s.num_points(),
                options.rescale
            ),
            Source::Measure(m) => format!("analytic({})", m.id()),
        };
        let provenance = format!(
            "{provenance} cliques={} cl={} degree={} mode={}",
            tree.cliques().len(),
            tree.clique_number(),
            options.degree,
            options.mode
        );

        let mut model = RationalModel {
            graph,
            tree,
            degree: options.degree,
            mode: options.mode,
            jitter: options.jitter,
            rescale,
            clique_tables,
            clique_factors,
            separator_tables,
            separator_factors,
            training_scores: None,
            provenance,
        };

        if options.retain_scores {
            if let Source::Samples(s) = &source {
                let scores: Result<Vec<f64>> = (0..s.num_points())
                    .into_par_iter()
                    .map(|i| model.log_evaluate(s.point(i)))
                    .collect();
                model.training_scores = Some(scores?);
            }
        }
        Ok(model)
    }

    pub fn num_vars(&self) -> usize {
        self.tree.num_vars()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mode(&self) -> DegreeMode {
        self.mode
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn graph(&self) -> &GraphicalModel {
        &self.graph
    }

    pub fn junction_tree(&self) -> &JunctionTree {
        &self.tree
    }

    pub fn rescaling(&self) -> &AffineMap {
        &self.rescale
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn clique_factors(&self) -> &[ChristoffelFactor] {
        &self.clique_factors
    }

    pub fn separator_factors(&self) -> &[Option<ChristoffelFactor>] {
        &self.separator_factors
    }

    /// Number of fitted factor matrices (cliques plus nonempty separators),
    /// at most `2d`.
    pub fn num_factors(&self) -> usize {
        self.clique_factors.len() + self.separator_factors.iter().flatten().count()
    }

    /// Largest factor basis, at most `(degree + 1)^cl(J)`.
    pub fn max_factor_size(&self) -> usize {
        self.clique_factors
            .iter()
            .map(ChristoffelFactor::size)
            .max()
            .unwrap_or(0)
    }

    /// Worst reciprocal-condition estimate over all factors.
    pub fn min_rcond(&self) -> f64 {
        self.clique_factors
            .iter()
            .chain(self.separator_factors.iter().flatten())
            .map(ChristoffelFactor::rcond)
            .fold(f64::INFINITY, f64::min)
    }

    /// Log-scores of the training samples, when retained at fit time.
    pub fn training_scores(&self) -> Option<&[f64]> {
        self.training_scores.as_deref()
    }

    fn scaled(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.num_vars() {
            return Err(Error::InvalidArgument(format!(
                "point has dimension {}, model has {}",
                x.len(),
                self.num_vars()
            )));
        }
        self.rescale.apply(x)
    }

    fn factor_logs(&self, z: &[f64], epsilon: Option<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        let take = |vars: &[usize]| -> Vec<f64> { vars.iter().map(|&v| z[v - 1]).collect() };
        let eval = |factor: &ChristoffelFactor, sub: &[f64]| -> Result<f64> {
            match epsilon {
                None => factor.evaluate(sub),
                Some(eps) => factor.evaluate_regularized(sub, eps),
            }
        };
        let mut cliques = Vec::with_capacity(self.clique_factors.len());
        for (factor, clique) in self.clique_factors.iter().zip(self.tree.cliques()) {
            cliques.push(eval(factor, &take(clique))?.ln());
        }
        let mut separators = vec![0.0; self.clique_factors.len()];
        for (k, factor) in self.separator_factors.iter().enumerate() {
            if let Some(factor) = factor {
                separators[k] = eval(factor, &take(&self.tree.separators()[k]))?.ln();
            }
        }
        Ok((cliques, separators))
    }

    /// `log Ψ(x) = Σ_k log Λ(x_{C_k}) - Σ_k log Λ(x_{S_k})`.
    ///
    /// This is the primary evaluation path: outside the support the plain
    /// product grows like `exp(α n ℓ)` and overflows quickly.
    pub fn log_evaluate(&self, x: &[f64]) -> Result<f64> {
        let z = self.scaled(x)?;
        let (cliques, separators) = self.factor_logs(&z, None)?;
        Ok(cliques.iter().sum::<f64>() - separators.iter().sum::<f64>())
    }

    /// `Ψ(x)`, strictly positive, and at least `1 - 1e-9` at jitter 0.
    /// Returns `+inf` when the product overflows; use [`Self::log_evaluate`]
    /// in that regime.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.log_evaluate(x)?.exp())
    }

    /// Log of the regularized function: every factor replaced by its box
    /// average of radius `epsilon / 2`.
    pub fn log_evaluate_regularized(&self, x: &[f64], epsilon: f64) -> Result<f64> {
        let z = self.scaled(x)?;
        let (cliques, separators) = self.factor_logs(&z, Some(epsilon))?;
        Ok(cliques.iter().sum::<f64>() - separators.iter().sum::<f64>())
    }

    /// Regularized rational function `Ψ̃(x; ε)`; converges to
    /// [`Self::evaluate`] as `epsilon → 0`.
    pub fn evaluate_regularized(&self, x: &[f64], epsilon: f64) -> Result<f64> {
        Ok(self.log_evaluate_regularized(x, epsilon)?.exp())
    }

    /// Density estimate `ε^{-d} · Ψ̃(x; ε)^{-1}`, mapped back through the
    /// rescaling Jacobian when rescaling is active. For interior points this
    /// approaches the density as the degree grows and `epsilon` shrinks;
    /// `epsilon` is interpreted in the model's rescaled coordinates.
    pub fn estimate_density(&self, x: &[f64], epsilon: f64) -> Result<f64> {
        let log_reg = self.log_evaluate_regularized(x, epsilon)?;
        let d = self.num_vars() as f64;
        let scaled_density = (-log_reg - d * epsilon.ln()).exp();
        Ok(scaled_density / self.rescale.volume_scale())
    }

    /// Per-factor log values at `x`: one entry per clique and one per clique
    /// index for the separator towards its parent (0 for the root and for
    /// empty separators). Useful for diagnosing which factor witnesses an
    /// exterior point.
    pub fn log_factor_values(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let z = self.scaled(x)?;
        self.factor_logs(&z, None)
    }

    /// Empirical quantile of the stored training scores.
    pub fn score_threshold(&self, quantile: f64) -> Result<f64> {
        if !(quantile > 0.0 && quantile < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "quantile must lie strictly between 0 and 1, got {quantile}"
            )));
        }
        let scores = self.training_scores.as_ref().ok_or_else(|| {
            Error::InvalidArgument(
                "model has no stored training scores; re-fit from samples with \
                 score retention enabled to use quantile thresholds"
                    .into(),
            )
        })?;
        let mut sorted = scores.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
        let n = sorted.len();
        let rank = (quantile * n as f64).ceil() as usize;
        Ok(sorted[rank.clamp(1, n) - 1])
    }

    /// Score `points` and flag those whose log-score exceeds the
    /// `quantile`-threshold of the training scores.
    pub fn score_outliers(&self, points: &SampleSet, quantile: f64) -> Result<OutlierReport> {
        let threshold = self.score_threshold(quantile)?;
        if points.dim() != self.num_vars() {
            return Err(Error::InvalidArgument(format!(
                "points have dimension {}, model has {}",
                points.dim(),
                self.num_vars()
            )));
        }
        let scores: Result<Vec<f64>> = (0..points.num_points())
            .into_par_iter()
            .map(|i| self.log_evaluate(points.point(i)))
            .collect();
        let scores = scores?;
        let flags = scores.iter().map(|&s| s > threshold).collect();
        Ok(OutlierReport {
            scores,
            flags,
            threshold,
        })
    }

    /// Serialize to the self-describing JSON model format.
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            num_vars: self.num_vars(),
            degree: self.degree,
            mode: self.mode,
            jitter: self.jitter,
            provenance: self.provenance.clone(),
            graph_edges: self.graph.edges().collect(),
            added_edges: self.tree.added_edges().to_vec(),
            cliques: self.tree.cliques().to_vec(),
            parents: (0..self.tree.cliques().len())
                .map(|k| self.tree.parent(k))
                .collect(),
            separators: self.tree.separators().to_vec(),
            rescale_centers: self.rescale.centers().to_vec(),
            rescale_half_widths: self.rescale.half_widths().to_vec(),
            clique_factors: self
                .clique_tables
                .iter()
                .zip(&self.clique_factors)
                .map(|(t, f)| FactorFile::pack(t, f))
                .collect(),
            separator_factors: self
                .separator_tables
                .iter()
                .zip(&self.separator_factors)
                .map(|(t, f)| match (t, f) {
                    (Some(t), Some(f)) => Some(FactorFile::pack(t, f)),
                    _ => None,
                })
                .collect(),
            training_scores: self.training_scores.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }

    /// Parse and validate a model produced by [`Self::to_json`]. Every factor
    /// is re-verified: `L·Lᵀ` must reproduce the matrix assembled from the
    /// stored moment table to within [`LOAD_RECONSTRUCTION_TOL`].
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        file.unpack()
    }

    /// Write the model file atomically (temp file then rename).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::cli::write_atomic(path.as_ref(), &self.to_json())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// The chordal graph whose maximal cliques are the tree's cliques; used as
/// the stored graphical model when a tree is supplied directly.
fn graph_of_cliques(tree: &JunctionTree) -> GraphicalModel {
    let mut edges = Vec::new();
    for clique in tree.cliques() {
        for (i, &u) in clique.iter().enumerate() {
            for &v in &clique[i + 1..] {
                edges.push((u, v));
            }
        }
    }
    GraphicalModel::new(tree.num_vars(), edges).expect("cliques yield a valid graph")
}

const MODEL_FORMAT: &str = "sparse-christoffel-model";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct FactorFile {
    vars: Vec<usize>,
    /// Exponent/value pairs of the moment table, in basis order.
    moments: Vec<(Vec<u32>, f64)>,
    /// Row-major lower-triangular Cholesky factor.
    lower: Vec<f64>,
    rcond: f64,
}

impl FactorFile {
    fn pack(table: &MomentTable, factor: &ChristoffelFactor) -> Self {
        FactorFile {
            vars: factor.vars().to_vec(),
            moments: table.entries().map(|(a, v)| (a.to_vec(), v)).collect(),
            lower: factor.lower().to_vec(),
            rcond: factor.rcond(),
        }
    }

    fn unpack(
        &self,
        table_degree: usize,
        degree: usize,
        mode: DegreeMode,
        jitter: f64,
    ) -> Result<(MomentTable, ChristoffelFactor)> {
        let entries = self
            .moments
            .iter()
            .map(|(a, v)| (a.clone(), *v))
            .collect::<std::collections::BTreeMap<_, _>>();
        let table = MomentTable::from_entries(
            self.vars.clone(),
            table_degree,
            entries,
            crate::moments::Provenance::Empirical,
        )
        .map_err(|e| Error::ModelFormat(format!("factor over {:?}: {e}", self.vars)))?;
        let basis = MultiIndexBasis::enumerate(&self.vars, degree, mode)
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        let m = basis.len();
        if self.lower.len() != m * m {
            return Err(Error::ModelFormat(format!(
                "factor over {:?}: lower factor has {} entries, expected {}",
                self.vars,
                self.lower.len(),
                m * m
            )));
        }
        let factor = ChristoffelFactor::from_parts(basis, self.lower.clone(), jitter, self.rcond);
        let err = factor
            .reconstruction_error(&table)
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        if !(err < LOAD_RECONSTRUCTION_TOL) {
            return Err(Error::ModelFormat(format!(
                "factor over {:?}: stored factor does not reproduce its moment \
                 matrix (relative error {err:.3e})",
                self.vars
            )));
        }
        Ok((table, factor))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    num_vars: usize,
    degree: usize,
    mode: DegreeMode,
    jitter: f64,
    provenance: String,
    graph_edges: Vec<(usize, usize)>,
    added_edges: Vec<(usize, usize)>,
    cliques: Vec<Vec<usize>>,
    parents: Vec<Option<usize>>,
    separators: Vec<Vec<usize>>,
    rescale_centers: Vec<f64>,
    rescale_half_widths: Vec<f64>,
    clique_factors: Vec<FactorFile>,
    separator_factors: Vec<Option<FactorFile>>,
    training_scores: Option<Vec<f64>>,
}

impl ModelFile {
    fn unpack(self) -> Result<RationalModel> {
        if self.format != MODEL_FORMAT {
            return Err(Error::ModelFormat(format!(
                "unexpected format tag {:?}",
                self.format
            )));
        }
        if self.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported version {}",
                self.version
            )));
        }
        let graph = GraphicalModel::new(self.num_vars, self.graph_edges.clone())
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        let tree = JunctionTree::from_parts(
            self.num_vars,
            self.cliques.clone(),
            self.parents.clone(),
            self.added_edges.clone(),
        )
        .map_err(|e| Error::ModelFormat(e.to_string()))?;
        if tree.separators() != self.separators.as_slice() {
            return Err(Error::ModelFormat(
                "stored separators disagree with the clique tree".into(),
            ));
        }
        let rescale = AffineMap::new(self.rescale_centers.clone(), self.rescale_half_widths.clone())
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        if rescale.dim() != self.num_vars {
            return Err(Error::ModelFormat("rescaling map dimension mismatch".into()));
        }

        if self.clique_factors.len() != tree.cliques().len()
            || self.separator_factors.len() != tree.cliques().len()
        {
            return Err(Error::ModelFormat("factor count mismatch".into()));
        }
        let table_degree = 2 * self.degree;
        let mut clique_tables = Vec::new();
        let mut clique_factors = Vec::new();
        for (packed, clique) in self.clique_factors.iter().zip(tree.cliques()) {
            if &packed.vars != clique {
                return Err(Error::ModelFormat(format!(
                    "clique factor variables {:?} disagree with clique {clique:?}",
                    packed.vars
                )));
            }
            let (t, f) = packed.unpack(table_degree, self.degree, self.mode, self.jitter)?;
            clique_tables.push(t);
            clique_factors.push(f);
        }
        let mut separator_tables = Vec::new();
        let mut separator_factors = Vec::new();
        for (k, packed) in self.separator_factors.iter().enumerate() {
            match (packed, tree.separators()[k].is_empty()) {
                (None, true) => {
                    separator_tables.push(None);
                    separator_factors.push(None);
                }
                (Some(p), false) => {
                    if p.vars != tree.separators()[k] {
                        return Err(Error::ModelFormat(format!(
                            "separator factor variables {:?} disagree with separator {:?}",
                            p.vars,
                            tree.separators()[k]
                        )));
                    }
                    let (t, f) = p.unpack(table_degree, self.degree, self.mode, self.jitter)?;
                    separator_tables.push(Some(t));
                    separator_factors.push(Some(f));
                }
                _ => {
                    return Err(Error::ModelFormat(format!(
                        "separator factor {k} presence disagrees with the tree"
                    )))
                }
            }
        }
        if let Some(scores) = &self.training_scores {
            if scores.iter().any(|s| !s.is_finite()) {
                return Err(Error::ModelFormat("non-finite training score".into()));
            }
        }

        Ok(RationalModel {
            graph,
            tree,
            degree: self.degree,
            mode: self.mode,
            jitter: self.jitter,
            rescale,
            clique_tables,
            clique_factors,
            separator_tables,
            separator_factors,
            training_scores: self.training_scores,
            provenance: self.provenance,
        })
    }
}
