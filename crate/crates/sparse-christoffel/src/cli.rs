//! Implementations behind the `christoffel` command line tool.
//!
//! Each command returns a [`Summary`] of `key=value` lines for pipeline
//! consumption and writes its output files atomically (temp file, then
//! rename), so a crashed run never leaves a half-written artifact. Exit-code
//! mapping lives in [`crate::error::Error::exit_code`]: 2 for input problems,
//! 3 for numeric failures.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::christoffel::ChristoffelFactor;
use crate::error::{Error, Result};
use crate::graph::{GraphicalModel, JunctionTree};
use crate::measures::AnalyticMeasure;
use crate::moments::SampleSet;
use crate::multiindex::{basis_dim, DegreeMode};
use crate::rational::{FitOptions, RationalModel};

/// Dense evaluation refuses bases larger than this; the whole point of the
/// rational factorization is not to build them.
pub const DENSE_BASIS_LIMIT: usize = 20_000;

/// Machine-readable `key=value` report of one command.
#[derive(Debug, Default, Clone)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn push(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn lines(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Write `content` to `path` atomically: write a sibling temp file, then
/// rename over the target.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!("{}.tmp", file_name.to_string_lossy()));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn format_vars(vars: &[usize]) -> String {
    let inner: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn format_var_sets(sets: &[Vec<usize>]) -> String {
    let parts: Vec<String> = sets.iter().map(|s| format_vars(s)).collect();
    parts.join(";")
}

/// Parse a grid spec `lo:hi:count[,lo:hi:count...]`, one triple per
/// coordinate. `count = 1` pins the coordinate to `lo`.
pub fn parse_grid(spec: &str) -> Result<Vec<(f64, f64, usize)>> {
    let mut axes = Vec::new();
    for part in spec.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!(
                "grid axis {part:?} is not lo:hi:count"
            )));
        }
        let lo: f64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid bound {:?}", fields[0])))?;
        let hi: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid bound {:?}", fields[1])))?;
        let count: usize = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid count {:?}", fields[2])))?;
        if count == 0 {
            return Err(Error::Parse("grid count must be at least 1".into()));
        }
        if count > 1 && !(lo < hi) {
            return Err(Error::Parse(format!(
                "grid axis {part:?} needs lo < hi for count > 1"
            )));
        }
        axes.push((lo, hi, count));
    }
    Ok(axes)
}

fn grid_points(axes: &[(f64, f64, usize)]) -> Vec<Vec<f64>> {
    let coordinate = |&(lo, hi, count): &(f64, f64, usize), i: usize| -> f64 {
        if count == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (count - 1) as f64
        }
    };
    let total: usize = axes.iter().map(|a| a.2).product();
    let mut points = Vec::with_capacity(total);
    let mut index = vec![0usize; axes.len()];
    'outer: loop {
        points.push(
            axes.iter()
                .zip(&index)
                .map(|(axis, &i)| coordinate(axis, i))
                .collect(),
        );
        for dim in (0..axes.len()).rev() {
            index[dim] += 1;
            if index[dim] < axes[dim].2 {
                continue 'outer;
            }
            index[dim] = 0;
        }
        break;
    }
    points
}

/// Configuration shared by the fitting command.
#[derive(Debug, Clone)]
pub struct FitConfig {
    pub samples: Option<PathBuf>,
    pub measure: Option<String>,
    pub graph: Option<PathBuf>,
    pub degree: usize,
    pub mode: DegreeMode,
    pub jitter: f64,
    pub rescale: bool,
    pub max_degree: usize,
    pub retain_scores: bool,
    pub out: PathBuf,
    pub seed: u64,
}

/// Fit a model and write it to `cfg.out`.
pub fn run_fit(cfg: &FitConfig) -> Result<Summary> {
    let start = Instant::now();
    let options = FitOptions {
        degree: cfg.degree,
        mode: cfg.mode,
        jitter: cfg.jitter,
        rescale: cfg.rescale,
        max_degree: cfg.max_degree,
        retain_scores: cfg.retain_scores,
    };

    let model = match (&cfg.samples, &cfg.measure) {
        (Some(path), None) => {
            let samples = SampleSet::from_csv_file(path)?;
            let graph_path = cfg.graph.as_ref().ok_or_else(|| {
                Error::InvalidArgument("--graph is required when fitting from samples".into())
            })?;
            let graph = GraphicalModel::from_file(graph_path)?;
            RationalModel::fit_samples(&samples, &graph, &options)?
        }
        (None, Some(id)) => {
            let measure = AnalyticMeasure::from_id(id)?;
            let graph = match &cfg.graph {
                Some(path) => GraphicalModel::from_file(path)?,
                None => measure.default_graph(),
            };
            RationalModel::fit_measure(&measure, &graph, &options)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "exactly one of --samples and --measure must be given".into(),
            ))
        }
    };
    model.save(&cfg.out)?;

    let tree = model.junction_tree();
    let mut summary = Summary::default();
    summary.push("command", "fit");
    summary.push("seed", cfg.seed);
    summary.push("dim", model.num_vars());
    summary.push("degree", model.degree());
    summary.push("mode", model.mode());
    summary.push("jitter", model.jitter());
    summary.push("cliques", format_var_sets(tree.cliques()));
    summary.push(
        "separators",
        format_var_sets(
            &tree.separators()[1..]
                .iter()
                .filter(|s| !s.is_empty())
                .cloned()
                .collect::<Vec<_>>(),
        ),
    );
    summary.push("clique_number", tree.clique_number());
    summary.push("treewidth_bound", tree.treewidth_upper_bound());
    summary.push("factors", model.num_factors());
    summary.push("max_factor_size", model.max_factor_size());
    let dense = basis_dim(model.degree(), model.num_vars(), model.mode());
    summary.push(
        "dense_basis_size",
        dense.map_or_else(|| "overflow".into(), |v| v.to_string()),
    );
    summary.push("min_rcond", format!("{:.3e}", model.min_rcond()));
    if let Some(scores) = model.training_scores() {
        summary.push("training_points", scores.len());
    }
    summary.push("wall_ms", start.elapsed().as_millis());
    summary.push("model", cfg.out.display());
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct ScoreConfig {
    pub model: PathBuf,
    pub samples: PathBuf,
    pub quantile: f64,
    pub out: PathBuf,
    pub seed: u64,
}

/// Score points against a fitted model and write `index,log_score,flag` CSV.
pub fn run_score(cfg: &ScoreConfig) -> Result<Summary> {
    let start = Instant::now();
    let model = RationalModel::load(&cfg.model)?;
    let points = SampleSet::from_csv_file(&cfg.samples)?;
    let report = model.score_outliers(&points, cfg.quantile)?;

    let mut csv = String::from("index,log_score,flag\n");
    for (i, (score, flag)) in report.scores.iter().zip(&report.flags).enumerate() {
        csv.push_str(&format!("{i},{score},{}\n", u8::from(*flag)));
    }
    write_atomic(&cfg.out, &csv)?;

    let flagged = report.flags.iter().filter(|&&f| f).count();
    let mut summary = Summary::default();
    summary.push("command", "score");
    summary.push("seed", cfg.seed);
    summary.push("points", points.num_points());
    summary.push("quantile", cfg.quantile);
    summary.push("threshold", report.threshold);
    summary.push("flagged", flagged);
    summary.push(
        "flagged_fraction",
        format!("{:.6}", flagged as f64 / points.num_points() as f64),
    );
    summary.push("wall_ms", start.elapsed().as_millis());
    summary.push("scores", cfg.out.display());
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct DensityConfig {
    pub model: PathBuf,
    pub samples: PathBuf,
    pub epsilon: f64,
    pub out: PathBuf,
    pub seed: u64,
}

/// Estimate the density at each input point and write `index,density` CSV.
pub fn run_density(cfg: &DensityConfig) -> Result<Summary> {
    let start = Instant::now();
    let model = RationalModel::load(&cfg.model)?;
    let points = SampleSet::from_csv_file(&cfg.samples)?;

    let mut csv = String::from("index,density\n");
    for i in 0..points.num_points() {
        let d = model.estimate_density(points.point(i), cfg.epsilon)?;
        csv.push_str(&format!("{i},{d}\n"));
    }
    write_atomic(&cfg.out, &csv)?;

    let mut summary = Summary::default();
    summary.push("command", "density");
    summary.push("seed", cfg.seed);
    summary.push("points", points.num_points());
    summary.push("epsilon", cfg.epsilon);
    summary.push("wall_ms", start.elapsed().as_millis());
    summary.push("densities", cfg.out.display());
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct SublevelConfig {
    pub model: PathBuf,
    pub grid: String,
    /// Threshold on Ψ itself; exactly one of `gamma` and `quantile` is given.
    pub gamma: Option<f64>,
    /// Threshold as a quantile of the training scores.
    pub quantile: Option<f64>,
    pub out: PathBuf,
    pub seed: u64,
}

/// Evaluate `log Ψ` over a grid and write it together with the sublevel mask
/// `log Ψ ≤ log γ`.
pub fn run_sublevel(cfg: &SublevelConfig) -> Result<Summary> {
    let start = Instant::now();
    let model = RationalModel::load(&cfg.model)?;
    let log_gamma = match (cfg.gamma, cfg.quantile) {
        (Some(g), None) => {
            if !(g > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "gamma must be positive, got {g}"
                )));
            }
            g.ln()
        }
        (None, Some(q)) => model.score_threshold(q)?,
        _ => {
            return Err(Error::InvalidArgument(
                "exactly one of --gamma and --quantile must be given".into(),
            ))
        }
    };
    let axes = parse_grid(&cfg.grid)?;
    if axes.len() != model.num_vars() {
        return Err(Error::InvalidArgument(format!(
            "grid has {} axes, model has {} variables",
            axes.len(),
            model.num_vars()
        )));
    }

    let mut csv = String::new();
    for dim in 1..=axes.len() {
        csv.push_str(&format!("x{dim},"));
    }
    csv.push_str("log_psi,inside\n");
    let mut inside = 0usize;
    let points = grid_points(&axes);
    for p in &points {
        let log_psi = model.log_evaluate(p)?;
        let is_inside = log_psi <= log_gamma;
        inside += usize::from(is_inside);
        for x in p {
            csv.push_str(&format!("{x},"));
        }
        csv.push_str(&format!("{log_psi},{}\n", u8::from(is_inside)));
    }
    write_atomic(&cfg.out, &csv)?;

    let mut summary = Summary::default();
    summary.push("command", "sublevel");
    summary.push("seed", cfg.seed);
    summary.push("grid_points", points.len());
    summary.push("log_gamma", log_gamma);
    summary.push("inside", inside);
    summary.push(
        "inside_fraction",
        format!("{:.6}", inside as f64 / points.len() as f64),
    );
    summary.push("wall_ms", start.elapsed().as_millis());
    summary.push("grid", cfg.out.display());
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct EvalDenseConfig {
    /// Measure providing the exact moments of the dense factor.
    pub measure: String,
    /// Points at which to evaluate, one per CSV row.
    pub samples: PathBuf,
    pub degree: usize,
    pub mode: DegreeMode,
    pub jitter: f64,
    pub out: PathBuf,
    pub seed: u64,
}

/// Evaluate the unfactored Christoffel polynomial over all variables, for
/// comparison against the rational model. Guardrail: the dense basis must
/// stay below [`DENSE_BASIS_LIMIT`].
pub fn run_eval_dense(cfg: &EvalDenseConfig) -> Result<Summary> {
    let start = Instant::now();
    let measure = AnalyticMeasure::from_id(&cfg.measure)?;
    let d = measure.dim();
    let size = basis_dim(cfg.degree, d, cfg.mode)
        .ok_or_else(|| Error::InvalidArgument("dense basis size overflows".into()))?;
    if size > DENSE_BASIS_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "dense basis has {size} elements (limit {DENSE_BASIS_LIMIT}); \
             this is the regime the rational factorization exists for"
        )));
    }
    let points = SampleSet::from_csv_file(&cfg.samples)?;
    if points.dim() != d {
        return Err(Error::InvalidArgument(format!(
            "points have dimension {}, measure has {d}",
            points.dim()
        )));
    }
    let vars: Vec<usize> = (1..=d).collect();
    let table = measure.moments(&vars, 2 * cfg.degree)?;
    let factor = ChristoffelFactor::fit(&table, cfg.degree, cfg.mode, cfg.jitter)?;

    let mut csv = String::from("index,log_value\n");
    for i in 0..points.num_points() {
        let v = factor.evaluate(points.point(i))?.ln();
        csv.push_str(&format!("{i},{v}\n"));
    }
    write_atomic(&cfg.out, &csv)?;

    let mut summary = Summary::default();
    summary.push("command", "eval-dense");
    summary.push("seed", cfg.seed);
    summary.push("measure", measure.id());
    summary.push("degree", cfg.degree);
    summary.push("mode", cfg.mode);
    summary.push("basis_size", size);
    summary.push("points", points.num_points());
    summary.push("rcond", format!("{:.3e}", factor.rcond()));
    summary.push("wall_ms", start.elapsed().as_millis());
    summary.push("values", cfg.out.display());
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct GraphAnalyzeConfig {
    pub graph: PathBuf,
    /// Where to write the DOT rendering; printed with the summary when absent.
    pub dot_out: Option<PathBuf>,
    pub seed: u64,
}

/// Chordal completion and junction tree report for a graph file.
pub fn run_graph_analyze(cfg: &GraphAnalyzeConfig) -> Result<Summary> {
    let graph = GraphicalModel::from_file(&cfg.graph)?;
    let tree = JunctionTree::build(&graph)?;

    let mut summary = Summary::default();
    summary.push("command", "graph-analyze");
    summary.push("seed", cfg.seed);
    summary.push("dim", graph.num_vars());
    summary.push("edges", graph.num_edges());
    summary.push(
        "added_edges",
        format_var_sets(
            &tree
                .added_edges()
                .iter()
                .map(|&(u, v)| vec![u, v])
                .collect::<Vec<_>>(),
        ),
    );
    summary.push("cliques", format_var_sets(tree.cliques()));
    summary.push(
        "separators",
        format_var_sets(
            &tree.separators()[1..]
                .iter()
                .filter(|s| !s.is_empty())
                .cloned()
                .collect::<Vec<_>>(),
        ),
    );
    summary.push("clique_number", tree.clique_number());
    summary.push("treewidth_bound", tree.treewidth_upper_bound());
    summary.push("clique_intersection", tree.verify_clique_intersection());
    let (c, s) = tree.variable_count_identity();
    summary.push("variable_identity", format!("{c}-{s}={}", c - s));
    match &cfg.dot_out {
        Some(path) => {
            write_atomic(path, &tree.to_dot())?;
            summary.push("dot", path.display());
        }
        None => summary.push("dot_inline", tree.to_dot().replace('\n', " ")),
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let axes = parse_grid("-1:1:3,0:0:1").unwrap();
        assert_eq!(axes, vec![(-1.0, 1.0, 3), (0.0, 0.0, 1)]);
        let pts = grid_points(&axes);
        assert_eq!(
            pts,
            vec![
                vec![-1.0, 0.0],
                vec![0.0, 0.0],
                vec![1.0, 0.0],
            ]
        );
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("2:1:5").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a:1:2").is_err());
    }

    #[test]
    fn atomic_write_creates_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "a,b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n");
        // overwrite goes through the same path
        write_atomic(&path, "c\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "c\n");
        assert!(!path.with_file_name("out.csv.tmp").exists());
    }

    #[test]
    fn summary_formatting() {
        let mut s = Summary::default();
        s.push("alpha", 1);
        s.push("beta", "two");
        assert_eq!(s.lines(), "alpha=1\nbeta=two\n");
        assert_eq!(s.get("beta"), Some("two"));
        assert_eq!(s.get("gamma"), None);
    }
}
