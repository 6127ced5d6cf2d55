//! Shared helpers for the integration tests: a straightforward evaluator for
//! every class written directly from its defining formula, and seeded
//! instance generators.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submemo::zoo::DispersionKind;
use submemo::{Concave, FunctionSpec};
use submemo_bench::synth::{Kind, Synthetic};

fn psi(c: Concave, x: f64) -> f64 {
    let x = x.max(0.0);
    match c {
        Concave::Sqrt => x.sqrt(),
        Concave::Log1p => (1.0 + x).ln(),
        Concave::Power(p) => x.powf(p),
    }
}

fn sparse_mass(num: usize, features: &[Vec<(usize, f64)>], x: &[usize]) -> Vec<f64> {
    let mut mass = vec![0.0; num];
    for &j in x {
        for &(e, w) in &features[j] {
            mass[e] += w;
        }
    }
    mass
}

fn log_det(kernel: &[Vec<f64>], ridge: f64, x: &[usize]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let m = DMatrix::from_fn(x.len(), x.len(), |a, b| {
        kernel[x[a]][x[b]] + if a == b { ridge } else { 0.0 }
    });
    m.determinant().ln()
}

fn positive_definite(kernel: &[Vec<f64>]) -> bool {
    let n = kernel.len();
    DMatrix::from_fn(n, n, |a, b| kernel[a][b]).cholesky().is_some()
}

/// `f(X)` computed from the class definition, independent of the library.
pub fn reference_value(spec: &FunctionSpec, x: &[usize]) -> f64 {
    match spec {
        FunctionSpec::FacilityLocation { similarity } => similarity
            .iter()
            .map(|row| x.iter().map(|&j| row[j]).fold(0.0, f64::max))
            .sum(),
        FunctionSpec::SaturatedCoverage {
            similarity,
            alpha,
            fraction,
        } => similarity
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let cap = match alpha {
                    Some(a) => a[i],
                    None => fraction.unwrap_or(0.25) * row.iter().sum::<f64>(),
                };
                x.iter().map(|&j| row[j]).sum::<f64>().min(cap)
            })
            .sum(),
        FunctionSpec::GraphCut { similarity, lambda } => {
            let n = similarity.len();
            let mut v = 0.0;
            for i in 0..n {
                for &j in x {
                    v += lambda * similarity[i][j];
                }
            }
            for &i in x {
                for &j in x {
                    v -= similarity[i][j];
                }
            }
            v
        }
        FunctionSpec::FeatureBased {
            num_features,
            features,
            concave,
        } => sparse_mass(*num_features, features, x)
            .into_iter()
            .map(|m| psi(*concave, m))
            .sum(),
        FunctionSpec::SetCover { weights, sets, .. } => {
            let mut covered = vec![false; weights.len()];
            for &j in x {
                for &u in &sets[j] {
                    covered[u] = true;
                }
            }
            weights.iter().zip(&covered).filter(|(_, &c)| c).map(|(w, _)| w).sum()
        }
        FunctionSpec::ClusteredSetCover {
            weights,
            sets,
            clusters,
            ..
        } => {
            let mut covered = vec![false; weights.len()];
            for &j in x {
                for &u in &sets[j] {
                    covered[u] = true;
                }
            }
            clusters
                .iter()
                .map(|c| c.iter().filter(|&&u| covered[u]).map(|&u| weights[u]).sum::<f64>())
                .sum()
        }
        FunctionSpec::ProbabilisticSetCover { weights, probs, .. } => weights
            .iter()
            .zip(probs)
            .map(|(w, p)| w * (1.0 - x.iter().map(|&j| 1.0 - p[j]).product::<f64>()))
            .sum(),
        FunctionSpec::ClusteredConcave {
            clusters,
            weights,
            concave,
            ..
        } => clusters
            .iter()
            .zip(weights)
            .map(|(members, w)| {
                let mass: f64 = members
                    .iter()
                    .zip(w)
                    .filter(|(m, _)| x.contains(m))
                    .map(|(_, w)| w)
                    .sum();
                psi(*concave, mass)
            })
            .sum(),
        FunctionSpec::LogDet { kernel, ridge } => {
            let r = ridge.unwrap_or_else(|| if positive_definite(kernel) { 0.0 } else { 1e-6 });
            log_det(kernel, r, x)
        }
        FunctionSpec::Dispersion { distance, kind } => {
            if x.len() < 2 {
                return 0.0;
            }
            match kind {
                DispersionKind::Min => {
                    let mut v = f64::INFINITY;
                    for (a, &i) in x.iter().enumerate() {
                        for &j in &x[a + 1..] {
                            v = v.min(distance[i][j]);
                        }
                    }
                    v
                }
                DispersionKind::Sum => x.iter().map(|&i| x.iter().map(|&j| distance[i][j]).sum::<f64>()).sum(),
                DispersionKind::MinSum => x
                    .iter()
                    .map(|&i| {
                        x.iter()
                            .filter(|&&j| j != i)
                            .map(|&j| distance[i][j])
                            .fold(f64::INFINITY, f64::min)
                    })
                    .sum(),
            }
        }
        FunctionSpec::Mixture { components } => components.iter().map(|(w, s)| w * reference_value(s, x)).sum(),
        FunctionSpec::DeepSubmodular {
            num_features,
            features,
            mixing,
            layer_weights,
            inner,
            outer,
        } => {
            let mass = sparse_mass(*num_features, features, x);
            mixing
                .iter()
                .zip(layer_weights)
                .map(|(row, w)| {
                    let a: f64 = row.iter().zip(&mass).map(|(m, &p)| m * psi(*inner, p)).sum();
                    w * psi(*outer, a)
                })
                .sum()
        }
        FunctionSpec::Modular { weights } => x.iter().map(|&j| weights[j]).sum(),
    }
}

/// The twelve classes exercised by the per-class suites; dispersion cycles
/// through its three objectives by seed.
pub const CLASSES: [&str; 12] = [
    "facility_location",
    "saturated_coverage",
    "graph_cut",
    "feature_based",
    "set_cover",
    "clustered_set_cover",
    "probabilistic_set_cover",
    "clustered_concave",
    "log_det",
    "dispersion",
    "mixture",
    "deep_submodular",
];

const CONCAVES: [&str; 3] = ["sqrt", "log1p", "pow0.6"];

/// A random instance of `class` on `n` elements, varying the class
/// parameters with the seed.
pub fn instance(class: &str, n: usize, seed: u64) -> FunctionSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let concave = CONCAVES[rng.gen_range(0..CONCAVES.len())];
    let s = match class {
        "facility_location" => Synthetic::new(Kind::FacilityLocation, n, seed).with("dim", rng.gen_range(2..9)),
        "saturated_coverage" => Synthetic::new(Kind::SaturatedCoverage, n, seed)
            .with("dim", rng.gen_range(2..9))
            .with("fraction", rng.gen_range(0.1..0.6)),
        "graph_cut" => Synthetic::new(Kind::GraphCut, n, seed).with("lambda", rng.gen_range(0.5..3.0)),
        "feature_based" => Synthetic::new(Kind::FeatureBased, n, seed)
            .with("features", rng.gen_range(4..16))
            .with("concave", concave),
        "set_cover" => Synthetic::new(Kind::SetCover, n, seed).with("density", rng.gen_range(0.05..0.3)),
        "clustered_set_cover" => Synthetic::new(Kind::ClusteredSetCover, n, seed).with("clusters", rng.gen_range(1..6)),
        "probabilistic_set_cover" => Synthetic::new(Kind::ProbabilisticSetCover, n, seed),
        "clustered_concave" => Synthetic::new(Kind::ClusteredConcave, n, seed).with("concave", concave),
        "log_det" => Synthetic::new(Kind::LogDet, n, seed),
        "dispersion" => {
            let kind = [Kind::DispersionMin, Kind::DispersionSum, Kind::DispersionMinSum][(seed % 3) as usize];
            Synthetic::new(kind, n, seed)
        }
        "mixture" => {
            let m = Synthetic::new(Kind::Mixture, n, seed);
            if rng.gen_bool(0.5) {
                m.with("modular", rng.gen_range(0.1..2.0))
            } else {
                m
            }
        }
        "deep_submodular" => Synthetic::new(Kind::DeepSubmodular, n, seed).with("concave", concave),
        other => panic!("unknown class {}", other),
    };
    s.generate().expect("synthetic instance")
}

/// Uniformly random subset (each element with probability `p`), ascending.
pub fn random_subset(rng: &mut impl Rng, n: usize, p: f64) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

pub fn tol(v: f64, rel: f64) -> f64 {
    rel * v.abs().max(1.0)
}
