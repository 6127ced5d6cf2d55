//! Seeded synthetic instances for every function class.
//!
//! Written as `synthetic:<kind>,n=<n>,seed=<seed>[,key=value...]` on the
//! command line. Similarities are clipped dot products of random unit
//! vectors, set systems have a configurable density, log-det kernels are
//! Gram matrices.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use submemo::zoo::{Concave, DispersionKind};
use submemo::FunctionSpec;

use crate::{input_error, BenchError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    FacilityLocation,
    SaturatedCoverage,
    GraphCut,
    FeatureBased,
    SetCover,
    ClusteredSetCover,
    ProbabilisticSetCover,
    ClusteredConcave,
    LogDet,
    DispersionMin,
    DispersionSum,
    DispersionMinSum,
    Mixture,
    DeepSubmodular,
    Modular,
}

impl Kind {
    pub const ALL: [Kind; 15] = [
        Kind::FacilityLocation,
        Kind::SaturatedCoverage,
        Kind::GraphCut,
        Kind::FeatureBased,
        Kind::SetCover,
        Kind::ClusteredSetCover,
        Kind::ProbabilisticSetCover,
        Kind::ClusteredConcave,
        Kind::LogDet,
        Kind::DispersionMin,
        Kind::DispersionSum,
        Kind::DispersionMinSum,
        Kind::Mixture,
        Kind::DeepSubmodular,
        Kind::Modular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::FacilityLocation => "faclocation",
            Kind::SaturatedCoverage => "satcoverage",
            Kind::GraphCut => "graphcut",
            Kind::FeatureBased => "featurebased",
            Kind::SetCover => "setcover",
            Kind::ClusteredSetCover => "clusteredsetcover",
            Kind::ProbabilisticSetCover => "probsetcover",
            Kind::ClusteredConcave => "clusteredconcave",
            Kind::LogDet => "logdet",
            Kind::DispersionMin => "dispersionmin",
            Kind::DispersionSum => "dispersionsum",
            Kind::DispersionMinSum => "dispersionminsum",
            Kind::Mixture => "mixture",
            Kind::DeepSubmodular => "deep",
            Kind::Modular => "modular",
        }
    }
}

impl FromStr for Kind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_lowercase();
        let kind = match key.as_str() {
            "faclocation" | "facilitylocation" => Kind::FacilityLocation,
            "satcoverage" | "saturatedcoverage" => Kind::SaturatedCoverage,
            "graphcut" => Kind::GraphCut,
            "featurebased" => Kind::FeatureBased,
            "setcover" => Kind::SetCover,
            "clusteredsetcover" => Kind::ClusteredSetCover,
            "probsetcover" | "probabilisticsetcover" => Kind::ProbabilisticSetCover,
            "clusteredconcave" => Kind::ClusteredConcave,
            "logdet" => Kind::LogDet,
            "dispersionmin" => Kind::DispersionMin,
            "dispersionsum" => Kind::DispersionSum,
            "dispersionminsum" => Kind::DispersionMinSum,
            "mixture" => Kind::Mixture,
            "deep" | "deepsubmodular" => Kind::DeepSubmodular,
            "modular" => Kind::Modular,
            _ => return input_error(format!("unknown synthetic kind '{}'", s)),
        };
        Ok(kind)
    }
}

/// A parsed `synthetic:` descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthetic {
    pub kind: Kind,
    pub n: usize,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

impl Synthetic {
    pub fn new(kind: Kind, n: usize, seed: u64) -> Self {
        Synthetic {
            kind,
            n,
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Parses `kind,n=..,seed=..,key=value` (the `synthetic:` prefix is optional).
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let body = text.strip_prefix("synthetic:").unwrap_or(text);
        let mut parts = body.split(',').map(str::trim).filter(|p| !p.is_empty());
        let kind: Kind = parts.next().unwrap_or("").parse()?;
        let mut n = None;
        let mut seed = 0;
        let mut params = BTreeMap::new();
        for p in parts {
            let Some((k, v)) = p.split_once('=') else {
                return input_error(format!("synthetic parameter '{}' is not key=value", p));
            };
            match k {
                "n" => n = Some(parse_num::<usize>(k, v)?),
                "seed" => seed = parse_num::<u64>(k, v)?,
                _ => {
                    params.insert(k.to_string(), v.to_string());
                }
            }
        }
        let Some(n) = n else {
            return input_error("synthetic descriptor needs n=<count>");
        };
        if n == 0 {
            return input_error("synthetic ground set must be non-empty");
        }
        Ok(Synthetic { kind, n, seed, params })
    }

    fn f64_param(&self, key: &str, default: f64) -> Result<f64, BenchError> {
        match self.params.get(key) {
            Some(v) => parse_num(key, v),
            None => Ok(default),
        }
    }

    fn usize_param(&self, key: &str, default: usize) -> Result<usize, BenchError> {
        match self.params.get(key) {
            Some(v) => parse_num(key, v),
            None => Ok(default),
        }
    }

    fn concave(&self) -> Result<Concave, BenchError> {
        match self.params.get("concave").map(String::as_str) {
            None | Some("sqrt") => Ok(Concave::Sqrt),
            Some("log1p") => Ok(Concave::Log1p),
            Some(p) => match p.strip_prefix("pow") {
                Some(e) => Ok(Concave::Power(parse_num("concave", e)?)),
                None => input_error(format!("unknown concave '{}' (sqrt, log1p, pow<p>)", p)),
            },
        }
    }

    /// Builds the instance data. Identical descriptors give identical specs.
    pub fn generate(&self) -> Result<FunctionSpec, BenchError> {
        let n = self.n;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let spec = match self.kind {
            Kind::FacilityLocation => FunctionSpec::FacilityLocation {
                similarity: similarity(&mut rng, n, self.usize_param("dim", 8)?, 1.0),
            },
            Kind::SaturatedCoverage => FunctionSpec::SaturatedCoverage {
                similarity: similarity(&mut rng, n, self.usize_param("dim", 8)?, 1.0),
                alpha: None,
                fraction: self
                    .params
                    .get("fraction")
                    .map(|v| parse_num("fraction", v))
                    .transpose()?,
            },
            Kind::GraphCut => FunctionSpec::GraphCut {
                similarity: similarity(&mut rng, n, self.usize_param("dim", 8)?, 0.0),
                lambda: self.f64_param("lambda", 1.0)?,
            },
            Kind::FeatureBased => {
                let features = self.usize_param("features", (n / 10).max(8))?;
                FunctionSpec::FeatureBased {
                    num_features: features,
                    features: sparse_scores(&mut rng, n, features, self.usize_param("nnz", 5)?),
                    concave: self.concave()?,
                }
            }
            Kind::SetCover => {
                let universe = self.usize_param("universe", 2 * n)?;
                FunctionSpec::SetCover {
                    universe,
                    weights: item_weights(&mut rng, universe),
                    sets: set_system(&mut rng, n, universe, self.f64_param("density", 0.1)?),
                }
            }
            Kind::ClusteredSetCover => {
                let universe = self.usize_param("universe", 2 * n)?;
                let weights = item_weights(&mut rng, universe);
                let sets = set_system(&mut rng, n, universe, self.f64_param("density", 0.1)?);
                let k = self.usize_param("clusters", 4)?.max(1);
                let mut clusters = vec![Vec::new(); k];
                for u in 0..universe {
                    clusters[rng.gen_range(0..k)].push(u);
                }
                clusters.retain(|c| !c.is_empty());
                FunctionSpec::ClusteredSetCover {
                    universe,
                    weights,
                    sets,
                    clusters,
                }
            }
            Kind::ProbabilisticSetCover => {
                let universe = self.usize_param("universe", n)?;
                let density = self.f64_param("density", 0.3)?;
                let weights = item_weights(&mut rng, universe);
                let probs = (0..universe)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                if rng.gen::<f64>() < density {
                                    rng.gen::<f64>()
                                } else {
                                    0.0
                                }
                            })
                            .collect()
                    })
                    .collect();
                FunctionSpec::ProbabilisticSetCover {
                    universe,
                    weights,
                    probs,
                }
            }
            Kind::ClusteredConcave => {
                let k = self.usize_param("clusters", (n / 4).max(2))?;
                let mut clusters = vec![Vec::new(); k];
                let mut weights = vec![Vec::new(); k];
                for j in 0..n {
                    let first = rng.gen_range(0..k);
                    clusters[first].push(j);
                    weights[first].push(rng.gen_range(0.1..1.0));
                    let second = rng.gen_range(0..k);
                    if second != first && rng.gen::<f64>() < 0.3 {
                        clusters[second].push(j);
                        weights[second].push(rng.gen_range(0.1..1.0));
                    }
                }
                FunctionSpec::ClusteredConcave {
                    n,
                    clusters,
                    weights,
                    concave: self.concave()?,
                }
            }
            Kind::LogDet => {
                let dim = self.usize_param("dim", n + 2)?;
                let b: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect();
                let scale = 3.0 / dim as f64;
                let kernel = (0..n)
                    .map(|i| (0..n).map(|j| scale * dot(&b[i], &b[j])).collect())
                    .collect();
                let ridge = match self.params.get("ridge") {
                    Some(v) => Some(parse_num("ridge", v)?),
                    None if dim >= n => Some(0.0),
                    None => None,
                };
                FunctionSpec::LogDet { kernel, ridge }
            }
            Kind::DispersionMin | Kind::DispersionSum | Kind::DispersionMinSum => {
                let dim = self.usize_param("dim", 2)?;
                let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect();
                let distance = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                if i == j {
                                    0.0
                                } else {
                                    pts[i]
                                        .iter()
                                        .zip(&pts[j])
                                        .map(|(a, b)| (a - b) * (a - b))
                                        .sum::<f64>()
                                        .sqrt()
                                }
                            })
                            .collect()
                    })
                    .collect();
                let kind = match self.kind {
                    Kind::DispersionMin => DispersionKind::Min,
                    Kind::DispersionSum => DispersionKind::Sum,
                    _ => DispersionKind::MinSum,
                };
                FunctionSpec::Dispersion { distance, kind }
            }
            Kind::Mixture => {
                let parts = [Kind::FacilityLocation, Kind::SetCover, Kind::FeatureBased];
                let mut components = Vec::new();
                for (i, k) in parts.into_iter().enumerate() {
                    let w = rng.gen_range(0.5..2.0);
                    let sub = Synthetic::new(k, n, self.seed.wrapping_mul(31).wrapping_add(i as u64 + 1));
                    components.push((w, sub.generate()?));
                }
                let modular = self.f64_param("modular", 0.0)?;
                if modular > 0.0 {
                    let weights = (0..n).map(|_| -rng.gen_range(0.0..modular)).collect();
                    components.push((1.0, FunctionSpec::Modular { weights }));
                }
                FunctionSpec::Mixture { components }
            }
            Kind::DeepSubmodular => {
                let f2 = self.usize_param("features", 6)?;
                let f1 = self.usize_param("units", 3)?;
                FunctionSpec::DeepSubmodular {
                    num_features: f2,
                    features: sparse_scores(&mut rng, n, f2, self.usize_param("nnz", 3)?),
                    mixing: (0..f1)
                        .map(|_| (0..f2).map(|_| rng.gen_range(0.0..1.0)).collect())
                        .collect(),
                    layer_weights: (0..f1).map(|_| rng.gen_range(0.5..1.5)).collect(),
                    inner: self.concave()?,
                    outer: Concave::Sqrt,
                }
            }
            Kind::Modular => {
                let scale = self.f64_param("scale", 1.0)?;
                FunctionSpec::Modular {
                    weights: (0..n).map(|_| rng.gen_range(-scale..scale)).collect(),
                }
            }
        };
        Ok(spec)
    }
}

impl FromStr for Synthetic {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        Synthetic::parse(s)
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, BenchError> {
    v.trim()
        .parse()
        .map_err(|_| BenchError::Input(format!("parameter {}: cannot parse '{}'", key, v)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit_vectors(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    let dim = dim.max(1);
    (0..n)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = dot(&v, &v).sqrt();
            if norm > 1e-3 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

/// `s_ij = max(0, <u_i, u_j>)`, symmetric, with the given diagonal.
fn similarity(rng: &mut ChaCha8Rng, n: usize, dim: usize, diagonal: f64) -> Vec<Vec<f64>> {
    let u = unit_vectors(rng, n, dim);
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        s[i][i] = diagonal;
        for j in 0..i {
            let v = dot(&u[i], &u[j]).max(0.0);
            s[i][j] = v;
            s[j][i] = v;
        }
    }
    s
}

fn item_weights(rng: &mut ChaCha8Rng, universe: usize) -> Vec<f64> {
    (0..universe).map(|_| rng.gen_range(0.5..1.5)).collect()
}

/// Each item joins each set with probability `density`; no set is empty.
fn set_system(rng: &mut ChaCha8Rng, n: usize, universe: usize, density: f64) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let mut s: Vec<usize> = (0..universe).filter(|_| rng.gen::<f64>() < density).collect();
            if s.is_empty() && universe > 0 {
                s.push(rng.gen_range(0..universe));
            }
            s
        })
        .collect()
}

/// `nnz` distinct features per element with scores in `(0, 1)`.
fn sparse_scores(rng: &mut ChaCha8Rng, n: usize, features: usize, nnz: usize) -> Vec<Vec<(usize, f64)>> {
    let nnz = nnz.clamp(1, features.max(1));
    (0..n)
        .map(|_| {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(nnz);
            while row.len() < nnz {
                let e = rng.gen_range(0..features);
                if row.iter().all(|(f, _)| *f != e) {
                    row.push((e, rng.gen_range(0.01..1.0)));
                }
            }
            row.sort_unstable_by_key(|p| p.0);
            row
        })
        .collect()
}
