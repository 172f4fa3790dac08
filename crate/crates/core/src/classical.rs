//! Hanbury Brown–Twiss intensity correlations for two phase-averaged coherent
//! beams of equal intensity launched into waveguides `k` and `l`.
//!
//! The closed form is
//!
//! ```text
//! Γᶜ_{q,r} = I₀² (|U_{ql}U_{rk} + U_{qk}U_{rl}|² + |U_{ql}U_{rl}|² + |U_{qk}U_{rk}|²)
//! ```
//!
//! The Monte Carlo estimator samples only the relative phase θ between the
//! two beams. Sample `i` belongs to chunk `i / CHUNK`; chunk `j` draws its
//! phases from ChaCha8 seeded with `seed` on stream `j`. Chunks are reduced
//! in index order, so results do not depend on the worker count.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{CorrelationKind, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::propagator::PropagatorMatrix;

/// Phase samples per RNG stream.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub samples: usize,
    pub seed: u64,
    pub intensity: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 1,
            intensity: 1.0,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::InvalidArgument("need at least one phase sample".into()));
        }
        if !(self.intensity.is_finite() && self.intensity > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "beam intensity must be positive, got {}",
                self.intensity
            )));
        }
        Ok(())
    }
}

fn check_inputs(u: &PropagatorMatrix, k: usize, l: usize) -> Result<()> {
    let n = u.dim();
    if k >= n || l >= n {
        return Err(Error::InvalidArgument(format!(
            "input sites ({k}, {l}) outside lattice of {n} waveguides"
        )));
    }
    if k == l {
        return Err(Error::InvalidArgument(
            "classical correlations need two distinct input waveguides".into(),
        ));
    }
    Ok(())
}

pub fn classical_gamma_analytic(
    u: &PropagatorMatrix,
    k: usize,
    l: usize,
    intensity: f64,
) -> Result<CorrelationMatrix> {
    check_inputs(u, k, l)?;
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beam intensity must be positive, got {intensity}"
        )));
    }
    let n = u.dim();
    let i2 = intensity * intensity;
    let mut g = DMatrix::zeros(n, n);
    for q in 0..n {
        for r in q..n {
            let cross = (u[(q, l)] * u[(r, k)] + u[(q, k)] * u[(r, l)]).norm_sqr();
            let auto = (u[(q, l)] * u[(r, l)]).norm_sqr() + (u[(q, k)] * u[(r, k)]).norm_sqr();
            let v = i2 * (cross + auto);
            g[(q, r)] = v;
            g[(r, q)] = v;
        }
    }
    CorrelationMatrix::new(g, CorrelationKind::Classical { intensity })
}

/// Monte Carlo estimate of `⟨I_q I_r⟩` and its per-entry standard error.
#[derive(Debug, Clone)]
pub struct MonteCarloEstimate {
    pub gamma: CorrelationMatrix,
    /// Sample standard deviation over `√samples`; NaN for a single sample.
    pub stderr: DMatrix<f64>,
    pub samples: usize,
}

/// Running mean and sum of squared deviations over the upper triangle.
struct Moments {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    /// Chan et al. pairwise combination.
    fn merge(mut self, other: Moments) -> Moments {
        let total = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        for p in 0..self.mean.len() {
            let delta = other.mean[p] - self.mean[p];
            self.mean[p] += delta * nb / total as f64;
            self.m2[p] += other.m2[p] + delta * delta * na * nb / total as f64;
        }
        self.count = total;
        self
    }
}

fn chunk_moments(
    fields_k: &[Complex64],
    fields_l: &[Complex64],
    seed: u64,
    chunk: usize,
    count: usize,
    intensity: f64,
) -> Moments {
    let n = fields_k.len();
    let pairs = n * (n + 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);

    let mut intensities = vec![0.0; count * n];
    for row in intensities.chunks_exact_mut(n) {
        let rel = Complex64::from_polar(1.0, TAU * rng.random::<f64>());
        for (q, slot) in row.iter_mut().enumerate() {
            *slot = intensity * (fields_k[q] + fields_l[q] * rel).norm_sqr();
        }
    }

    let mut mean = vec![0.0; pairs];
    for row in intensities.chunks_exact(n) {
        let mut p = 0;
        for q in 0..n {
            let iq = row[q];
            for &ir in &row[q..] {
                mean[p] += iq * ir;
                p += 1;
            }
        }
    }
    let inv = 1.0 / count as f64;
    mean.iter_mut().for_each(|m| *m *= inv);

    let mut m2 = vec![0.0; pairs];
    for row in intensities.chunks_exact(n) {
        let mut p = 0;
        for q in 0..n {
            let iq = row[q];
            for &ir in &row[q..] {
                let d = iq * ir - mean[p];
                m2[p] += d * d;
                p += 1;
            }
        }
    }
    Moments { count, mean, m2 }
}

pub fn classical_gamma_mc(
    u: &PropagatorMatrix,
    k: usize,
    l: usize,
    config: &EnsembleConfig,
) -> Result<MonteCarloEstimate> {
    check_inputs(u, k, l)?;
    config.validate()?;
    let n = u.dim();
    // Output field of unit-amplitude beams: M = conj(U).
    let fields_k: Vec<Complex64> = (0..n).map(|q| u[(q, k)].conj()).collect();
    let fields_l: Vec<Complex64> = (0..n).map(|q| u[(q, l)].conj()).collect();

    let chunks = config.samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let count = CHUNK.min(config.samples - j * CHUNK);
            chunk_moments(&fields_k, &fields_l, config.seed, j, count, config.intensity)
        })
        .collect();
    let total = parts
        .into_iter()
        .reduce(Moments::merge)
        .expect("at least one chunk");

    let samples = total.count as f64;
    let mut gamma = DMatrix::zeros(n, n);
    let mut stderr = DMatrix::zeros(n, n);
    let mut p = 0;
    for q in 0..n {
        for r in q..n {
            let se = if total.count > 1 {
                (total.m2[p] / (samples - 1.0) / samples).sqrt()
            } else {
                f64::NAN
            };
            gamma[(q, r)] = total.mean[p];
            gamma[(r, q)] = total.mean[p];
            stderr[(q, r)] = se;
            stderr[(r, q)] = se;
            p += 1;
        }
    }
    Ok(MonteCarloEstimate {
        gamma: CorrelationMatrix::new(
            gamma,
            CorrelationKind::Classical {
                intensity: config.intensity,
            },
        )?,
        stderr,
        samples: total.count,
    })
}

/// `Γᶜ_{q,r} − √(Γᶜ_{q,q} Γᶜ_{r,r}) / 3`, undefined where either diagonal
/// entry is below `1e-9 · max Γᶜ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundMargin {
    margin: DMatrix<f64>,
    applicable: DMatrix<bool>,
}

impl BoundMargin {
    pub fn get(&self, q: usize, r: usize) -> Option<f64> {
        self.applicable[(q, r)].then(|| self.margin[(q, r)])
    }

    pub fn dim(&self) -> usize {
        self.margin.nrows()
    }

    /// Smallest margin over applicable pairs.
    pub fn min_applicable(&self) -> Option<f64> {
        self.margin
            .iter()
            .zip(self.applicable.iter())
            .filter(|(_, &a)| a)
            .map(|(&m, _)| m)
            .reduce(f64::min)
    }

    pub fn applicable_count(&self) -> usize {
        self.applicable.iter().filter(|&&a| a).count()
    }
}

pub fn classical_bound_margin(gamma: &CorrelationMatrix) -> Result<BoundMargin> {
    if gamma.is_quantum() {
        return Err(Error::KindMismatch {
            expected: "classical",
            got: "quantum",
        });
    }
    let g = gamma.values();
    let n = g.nrows();
    let floor = 1e-9 * gamma.max();
    let margin = DMatrix::from_fn(n, n, |q, r| {
        g[(q, r)] - (g[(q, q)] * g[(r, r)]).sqrt() / 3.0
    });
    let applicable = DMatrix::from_fn(n, n, |q, r| g[(q, q)] >= floor && g[(r, r)] >= floor);
    Ok(BoundMargin { margin, applicable })
}
