//! Sparse rational Christoffel functions over graphical models.
//!
//! The Christoffel polynomial `Λ_n` of a measure `μ` on `R^d` is the quadratic
//! form of the inverse moment matrix, `Λ_n(x) = v(x)ᵀ M⁻¹ v(x)`. It grows
//! exponentially in `n` outside the support of `μ` and only polynomially
//! inside, which makes its sublevel sets a practical tool for support
//! inference, outlier scoring and density estimation. The catch is the moment
//! matrix: its size explodes with the dimension `d`.
//!
//! This crate exploits conditional-independence structure instead. Given a
//! graphical model for `μ`, it builds a junction tree of the maximal cliques
//! of a chordal completion and fits the rational function
//!
//! ```text
//! Ψ_n(x) = Π_cliques Λ_n(x_C) / Π_separators Λ_n(x_S)
//! ```
//!
//! whose factors only need moment matrices of size `(n+1)^cl(J)`, where
//! `cl(J)` is the largest clique. Ψ keeps the support dichotomy of the dense
//! polynomial, reduces to it exactly for product measures, and its regularized
//! form recovers the density pointwise.
//!
//! Module map:
//!
//! * [`multiindex`]: exponent bases (total-degree and coordinate-wise) and
//!   monomial vectors, plain and box-averaged.
//! * [`graph`]: graphical models, min-fill chordal completion, junction trees
//!   with the running-intersection ordering.
//! * [`moments`]: sample sets, empirical moment tables, restriction, affine
//!   rescaling.
//! * [`measures`]: built-in analytic measures with exact moments, densities,
//!   samplers, plus a Gauss-Legendre quadrature fallback.
//! * [`christoffel`]: moment matrices, Cholesky factors, plain/regularized
//!   evaluation, and an independent variational reference path.
//! * [`rational`]: the fitted model Ψ with log-domain evaluation, density
//!   estimation, outlier scoring and a verified on-disk format.
//! * [`legendre`]: three-term recurrences used as the high-degree oracle.
//! * [`cli`]: the command implementations behind the `christoffel` binary.
//!
//! The runnable examples under `examples/` walk through each capability.

pub mod christoffel;
pub mod cli;
pub mod error;
pub mod graph;
pub mod legendre;
mod linalg;
pub mod measures;
pub mod moments;
pub mod multiindex;
pub mod rational;

pub use christoffel::{variational_evaluate, ChristoffelFactor, MomentMatrix};
pub use error::{Error, Result};
pub use graph::{GraphicalModel, JunctionTree};
pub use measures::{quadrature_moments, AnalyticMeasure, CoordinateDensity};
pub use moments::{empirical_moments, AffineMap, MomentTable, Provenance, SampleSet};
pub use multiindex::{DegreeMode, MultiIndexBasis};
pub use rational::{FitOptions, OutlierReport, RationalModel};
