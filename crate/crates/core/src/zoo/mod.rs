//! Concrete function classes and their precomputed statistics.
//!
//! | class | statistic `p_X` | gain | update |
//! |---|---|---|---|
//! | facility location | per-row top-2 similarity over `X` | `O(n)` | `O(n)` |
//! | saturated coverage | per-row sums `sum_{j in X} s_ij` | `O(n)` | `O(n)` |
//! | graph cut | per-row sums | `O(1)` | `O(n)` |
//! | feature based / clustered concave | per-feature modular mass | `O(nnz(j))` | `O(nnz(j))` |
//! | set cover / clustered | per-item coverage counts | `O(abs(S_j))` | `O(abs(S_j))` |
//! | probabilistic set cover | per-item products `prod (1 - p_uj)` | `O(nnz(j))` | `O(nnz(j))` |
//! | log-det | Cholesky factor of `S_X` | `O(abs(X)^2)` | `O(abs(X)^2)` |
//! | dispersion min / sum / min-sum | min / row sums / nearest in-set distance | `O(abs(X))` | `O(n)` |
//! | mixture | component statistics | sum | sum |
//! | two-layer deep | per-feature mass + layer-1 arguments | `O(nnz(j) * F1)` | same |

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::function::FunctionInstance;
use crate::ground::GroundSet;

mod concave;
mod coverage;
mod deep;
mod dispersion;
mod facility;
mod graph;
mod logdet;
mod mixture;
mod modular_fn;
mod setcover;

pub use concave::SparseConcave;
pub use coverage::SaturatedCoverage;
pub use deep::DeepSubmodular;
pub use dispersion::{Dispersion, DispersionKind};
pub use facility::FacilityLocation;
pub use graph::GraphCut;
pub use logdet::LogDet;
pub use mixture::{mixture_of, plus_modular, Mixture};
pub use modular_fn::Modular;
pub use setcover::{ClusteredSetCover, ProbabilisticSetCover, SetCover};

/// Default saturation fraction `c` in `alpha_i = c * sum_j s_ij`.
pub const DEFAULT_SATURATION: f64 = 0.25;
/// Ridge applied to a rank-deficient log-det kernel when none is given.
pub const DEFAULT_RIDGE: f64 = 1e-6;

/// Non-decreasing concave transforms available to concave-over-modular classes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "snake_case")]
pub enum Concave {
    Sqrt,
    Log1p,
    /// `x^p` with `0 < p < 1`.
    Power(f64),
}

impl Concave {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            Concave::Sqrt => x.sqrt(),
            Concave::Log1p => x.ln_1p(),
            Concave::Power(p) => x.powf(p),
        }
    }

    fn validate(self) -> Result<()> {
        if let Concave::Power(p) = self {
            if !(p > 0.0 && p < 1.0) {
                return invalid(format!("concave power exponent must lie in (0, 1), got {}", p));
            }
        }
        Ok(())
    }
}

/// A serializable description of one function (data + class).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum FunctionSpec {
    FacilityLocation {
        similarity: Vec<Vec<f64>>,
    },
    SaturatedCoverage {
        similarity: Vec<Vec<f64>>,
        /// Explicit per-row thresholds; overrides `fraction`.
        #[serde(default)]
        alpha: Option<Vec<f64>>,
        #[serde(default)]
        fraction: Option<f64>,
    },
    GraphCut {
        similarity: Vec<Vec<f64>>,
        lambda: f64,
    },
    FeatureBased {
        num_features: usize,
        /// Per element: `(feature, score)` pairs.
        features: Vec<Vec<(usize, f64)>>,
        concave: Concave,
    },
    SetCover {
        universe: usize,
        weights: Vec<f64>,
        sets: Vec<Vec<usize>>,
    },
    ClusteredSetCover {
        universe: usize,
        weights: Vec<f64>,
        sets: Vec<Vec<usize>>,
        clusters: Vec<Vec<usize>>,
    },
    ProbabilisticSetCover {
        universe: usize,
        weights: Vec<f64>,
        /// `probs[u][j]`: probability that element `j` covers item `u`.
        probs: Vec<Vec<f64>>,
    },
    ClusteredConcave {
        n: usize,
        clusters: Vec<Vec<usize>>,
        /// `weights[c][i]` is the weight of `clusters[c][i]` in cluster `c`.
        weights: Vec<Vec<f64>>,
        concave: Concave,
    },
    LogDet {
        kernel: Vec<Vec<f64>>,
        #[serde(default)]
        ridge: Option<f64>,
    },
    Dispersion {
        distance: Vec<Vec<f64>>,
        kind: DispersionKind,
    },
    Mixture {
        components: Vec<(f64, FunctionSpec)>,
    },
    DeepSubmodular {
        num_features: usize,
        features: Vec<Vec<(usize, f64)>>,
        /// `mixing[i1][i2]`, non-negative.
        mixing: Vec<Vec<f64>>,
        layer_weights: Vec<f64>,
        inner: Concave,
        outer: Concave,
    },
    Modular {
        weights: Vec<f64>,
    },
}

impl FunctionSpec {
    /// Ground set size implied by the data.
    pub fn n(&self) -> usize {
        match self {
            FunctionSpec::FacilityLocation { similarity }
            | FunctionSpec::SaturatedCoverage { similarity, .. }
            | FunctionSpec::GraphCut { similarity, .. } => similarity.len(),
            FunctionSpec::FeatureBased { features, .. } | FunctionSpec::DeepSubmodular { features, .. } => {
                features.len()
            }
            FunctionSpec::SetCover { sets, .. } | FunctionSpec::ClusteredSetCover { sets, .. } => sets.len(),
            FunctionSpec::ProbabilisticSetCover { probs, .. } => probs.first().map_or(0, |r| r.len()),
            FunctionSpec::ClusteredConcave { n, .. } => *n,
            FunctionSpec::LogDet { kernel, .. } => kernel.len(),
            FunctionSpec::Dispersion { distance, .. } => distance.len(),
            FunctionSpec::Mixture { components } => components.first().map_or(0, |(_, s)| s.n()),
            FunctionSpec::Modular { weights } => weights.len(),
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            FunctionSpec::FacilityLocation { .. } => "facility_location",
            FunctionSpec::SaturatedCoverage { .. } => "saturated_coverage",
            FunctionSpec::GraphCut { .. } => "graph_cut",
            FunctionSpec::FeatureBased { .. } => "feature_based",
            FunctionSpec::SetCover { .. } => "set_cover",
            FunctionSpec::ClusteredSetCover { .. } => "clustered_set_cover",
            FunctionSpec::ProbabilisticSetCover { .. } => "probabilistic_set_cover",
            FunctionSpec::ClusteredConcave { .. } => "clustered_concave",
            FunctionSpec::LogDet { .. } => "log_det",
            FunctionSpec::Dispersion { kind, .. } => match kind {
                DispersionKind::Min => "dispersion_min",
                DispersionKind::Sum => "dispersion_sum",
                DispersionKind::MinSum => "dispersion_min_sum",
            },
            FunctionSpec::Mixture { .. } => "mixture",
            FunctionSpec::DeepSubmodular { .. } => "deep_submodular",
            FunctionSpec::Modular { .. } => "modular",
        }
    }

    /// Builds an instance over the ground set implied by the data.
    pub fn build(&self) -> Result<FunctionInstance> {
        let g = GroundSet::new(self.n())?;
        make_function(&g, self)
    }

    pub(crate) fn build_boxed(&self, n: usize) -> Result<Box<dyn crate::function::MemoFunction>> {
        if self.n() != n {
            return invalid(format!(
                "{} data describes {} elements, ground set has {}",
                self.class_name(),
                self.n(),
                n
            ));
        }
        Ok(match self {
            FunctionSpec::FacilityLocation { similarity } => {
                let s = Matrix::from_rows(similarity, "similarity")?
                    .require_square(n)?
                    .require_non_negative()?;
                Box::new(FacilityLocation::new(Arc::new(s)))
            }
            FunctionSpec::SaturatedCoverage {
                similarity,
                alpha,
                fraction,
            } => {
                let s = Matrix::from_rows(similarity, "similarity")?
                    .require_square(n)?
                    .require_non_negative()?;
                Box::new(SaturatedCoverage::new(
                    s,
                    alpha.clone(),
                    fraction.unwrap_or(DEFAULT_SATURATION),
                )?)
            }
            FunctionSpec::GraphCut { similarity, lambda } => {
                let s = Matrix::from_rows(similarity, "similarity")?
                    .require_square(n)?
                    .require_non_negative()?
                    .require_symmetric()?;
                Box::new(GraphCut::new(s, *lambda)?)
            }
            FunctionSpec::FeatureBased {
                num_features,
                features,
                concave,
            } => {
                concave.validate()?;
                Box::new(SparseConcave::feature_based(*num_features, features, *concave)?)
            }
            FunctionSpec::SetCover {
                universe,
                weights,
                sets,
            } => Box::new(SetCover::new(*universe, weights, sets)?),
            FunctionSpec::ClusteredSetCover {
                universe,
                weights,
                sets,
                clusters,
            } => Box::new(ClusteredSetCover::new(*universe, weights, sets, clusters)?),
            FunctionSpec::ProbabilisticSetCover {
                universe,
                weights,
                probs,
            } => Box::new(ProbabilisticSetCover::new(*universe, weights, probs)?),
            FunctionSpec::ClusteredConcave {
                n: _,
                clusters,
                weights,
                concave,
            } => {
                concave.validate()?;
                Box::new(SparseConcave::clustered(n, clusters, weights, *concave)?)
            }
            FunctionSpec::LogDet { kernel, ridge } => {
                let s = Matrix::from_rows(kernel, "kernel")?
                    .require_square(n)?
                    .require_symmetric()?;
                Box::new(LogDet::new(s, *ridge)?)
            }
            FunctionSpec::Dispersion { distance, kind } => {
                let d = Matrix::from_rows(distance, "distance")?
                    .require_square(n)?
                    .require_non_negative()?
                    .require_symmetric()?;
                for i in 0..n {
                    if d.get(i, i) != 0.0 {
                        return invalid(format!("distance matrix diagonal must be zero (row {})", i));
                    }
                }
                Box::new(Dispersion::new(d, *kind))
            }
            FunctionSpec::Mixture { components } => {
                if components.is_empty() {
                    return invalid("mixture needs at least one component");
                }
                let mut parts = Vec::with_capacity(components.len());
                for (w, spec) in components {
                    if !(w.is_finite() && *w >= 0.0) {
                        return invalid(format!("mixture weight must be finite and non-negative, got {}", w));
                    }
                    parts.push((*w, spec.build_boxed(n)?));
                }
                Box::new(Mixture::new(parts)?)
            }
            FunctionSpec::DeepSubmodular {
                num_features,
                features,
                mixing,
                layer_weights,
                inner,
                outer,
            } => {
                inner.validate()?;
                outer.validate()?;
                Box::new(DeepSubmodular::new(
                    *num_features,
                    features,
                    mixing,
                    layer_weights,
                    *inner,
                    *outer,
                )?)
            }
            FunctionSpec::Modular { weights } => {
                if weights.iter().any(|w| !w.is_finite()) {
                    return invalid("modular weights must be finite");
                }
                Box::new(Modular::new(weights.clone()))
            }
        })
    }
}

/// Validates `spec` against `g` and returns an instance with `X = ∅`.
pub fn make_function(g: &GroundSet, spec: &FunctionSpec) -> Result<FunctionInstance> {
    let func = spec.build_boxed(g.len())?;
    Ok(FunctionInstance::new(func))
}

/// Dense row-major matrix used for similarity, distance and kernel data.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>], what: &str) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return invalid(format!("{}: row {} has {} entries, expected {}", what, i, row.len(), c));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return invalid(format!("{}: non-finite entry at ({}, {})", what, i, j));
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len());
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    fn require_square(self, n: usize) -> Result<Self> {
        if self.rows != n || self.cols != n {
            return invalid(format!(
                "expected a {}x{} matrix, got {}x{}",
                n, n, self.rows, self.cols
            ));
        }
        Ok(self)
    }

    fn require_non_negative(self) -> Result<Self> {
        if let Some(p) = self.data.iter().position(|&v| v < 0.0) {
            return invalid(format!(
                "negative entry {} at ({}, {})",
                self.data[p],
                p / self.cols,
                p % self.cols
            ));
        }
        Ok(self)
    }

    fn require_symmetric(self) -> Result<Self> {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return invalid(format!("matrix is not symmetric at ({}, {}): {} vs {}", i, j, a, b));
                }
            }
        }
        Ok(self)
    }
}

/// Sentinel for "no holder" in index-valued statistics.
pub(crate) const NONE: u32 = u32::MAX;

/// `sum_i max(0, a_i - b_i)`, accumulated in independent lanes so the loop
/// vectorizes (a single running sum is a serial dependency chain).
#[inline]
pub(crate) fn positive_part_sum(a: &[f64], b: &[f64]) -> f64 {
    const LANES: usize = 8;
    let mut acc = [0.0f64; LANES];
    let (ca, cb) = (a.chunks_exact(LANES), b.chunks_exact(LANES));
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| (x - y).max(0.0))
        .sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..LANES {
            acc[l] += (x[l] - y[l]).max(0.0);
        }
    }
    acc.iter().sum::<f64>() + tail
}

pub(crate) fn check_weights(weights: &[f64], what: &str) -> Result<()> {
    for (i, &w) in weights.iter().enumerate() {
        if !(w.is_finite() && w >= 0.0) {
            return invalid(format!("{}[{}] must be finite and non-negative, got {}", what, i, w));
        }
    }
    Ok(())
}
