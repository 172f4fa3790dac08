//! Two-photon pure states as symmetric amplitude matrices.
//!
//! A state `Σ_{k,l} Ψ_{kl} a†_k a†_l |0⟩` with `Ψ` symmetric has squared norm
//! `2 Σ_{k,l} |Ψ_{kl}|²`, which fixes the amplitudes `1/√2` for both photons
//! in one waveguide and `1/2` for photons in two different waveguides.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::propagator::PropagatorMatrix;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    amplitudes: DMatrix<Complex64>,
}

impl TwoPhotonState {
    /// Accepts a square matrix that is exactly symmetric and normalised to
    /// `2 Σ |Ψ|² = 1` within 1e-12.
    pub fn from_amplitudes(amplitudes: DMatrix<Complex64>) -> Result<Self> {
        if !amplitudes.is_square() {
            return Err(Error::DimensionMismatch {
                expected: amplitudes.nrows(),
                got: amplitudes.ncols(),
            });
        }
        let n = amplitudes.nrows();
        for k in 0..n {
            for l in k + 1..n {
                if amplitudes[(k, l)] != amplitudes[(l, k)] {
                    return Err(Error::InvalidArgument(format!(
                        "amplitude matrix not symmetric at ({k}, {l})"
                    )));
                }
            }
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "state norm 2Σ|Ψ|² = {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn amplitudes(&self) -> &DMatrix<Complex64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn superpose(states: &[TwoPhotonState], coeffs: &[Complex64]) -> Result<Self> {
        superpose(states, coeffs)
    }

    pub fn propagate(&self, u: &PropagatorMatrix) -> Result<Self> {
        propagate(self, u)
    }
}

fn norm_sqr(m: &DMatrix<Complex64>) -> f64 {
    2.0 * m.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

fn check_site(site: usize, n: usize) -> Result<()> {
    if site >= n {
        return Err(Error::InvalidArgument(format!(
            "site {site} outside lattice of {n} waveguides"
        )));
    }
    Ok(())
}

/// One photon in waveguide `k` and one in `l`; `k == l` puts both in the same
/// waveguide.
pub fn fock_pair(k: usize, l: usize, n: usize) -> Result<TwoPhotonState> {
    check_site(k, n)?;
    check_site(l, n)?;
    let mut amplitudes = DMatrix::zeros(n, n);
    if k == l {
        amplitudes[(k, k)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    } else {
        amplitudes[(k, l)] = Complex64::new(0.5, 0.0);
        amplitudes[(l, k)] = Complex64::new(0.5, 0.0);
    }
    Ok(TwoPhotonState { amplitudes })
}

/// Both photons in waveguide `k`, or both in waveguide `l` with relative phase
/// `phase`: `(a†²_k + e^{iφ} a†²_l)|0⟩ / 2`.
pub fn path_entangled_pair(k: usize, l: usize, phase: f64, n: usize) -> Result<TwoPhotonState> {
    check_site(k, n)?;
    check_site(l, n)?;
    if k == l {
        return Err(Error::InvalidArgument(
            "path-entangled pair needs two distinct waveguides".into(),
        ));
    }
    if !phase.is_finite() {
        return Err(Error::InvalidArgument(format!("phase must be finite, got {phase}")));
    }
    let mut amplitudes = DMatrix::zeros(n, n);
    amplitudes[(k, k)] = Complex64::new(0.5, 0.0);
    amplitudes[(l, l)] = Complex64::from_polar(0.5, phase);
    Ok(TwoPhotonState { amplitudes })
}

/// `Σ cᵢ Ψᵢ`, renormalised.
pub fn superpose(states: &[TwoPhotonState], coeffs: &[Complex64]) -> Result<TwoPhotonState> {
    if states.is_empty() || states.len() != coeffs.len() {
        return Err(Error::InvalidArgument(format!(
            "need equal non-empty lists, got {} states and {} coefficients",
            states.len(),
            coeffs.len()
        )));
    }
    let n = states[0].dim();
    let mut sum = DMatrix::<Complex64>::zeros(n, n);
    for (s, &c) in states.iter().zip(coeffs) {
        if s.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: s.dim(),
            });
        }
        sum += &s.amplitudes * c;
    }
    let norm = norm_sqr(&sum);
    let scale: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if !(norm > 1e-24 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::ZeroNorm);
    }
    sum /= Complex64::new(norm.sqrt(), 0.0);
    symmetrize(&mut sum);
    Ok(TwoPhotonState { amplitudes: sum })
}

/// Evolves a state through a lattice: every `a†_l` becomes `Σ_k U*_{lk} a†_k`,
/// so `Φ = Mᵀ Ψ M` with `M = conj(U)`. Lattice propagators are symmetric,
/// where this is the same as `M Ψ Mᵀ`.
pub fn propagate(state: &TwoPhotonState, u: &PropagatorMatrix) -> Result<TwoPhotonState> {
    if state.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: u.dim(),
        });
    }
    let m = u.conjugate();
    let mut phi = &m.transpose() * &state.amplitudes * &m;
    symmetrize(&mut phi);
    Ok(TwoPhotonState { amplitudes: phi })
}

/// Random normalised state with independent uniform real and imaginary parts
/// on the upper triangle.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TwoPhotonState {
    loop {
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            for l in k..n {
                let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(k, l)] = a;
                m[(l, k)] = a;
            }
        }
        let norm = norm_sqr(&m);
        if norm > 1e-6 {
            m /= Complex64::new(norm.sqrt(), 0.0);
            symmetrize(&mut m);
            return TwoPhotonState { amplitudes: m };
        }
    }
}

fn symmetrize(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    for k in 0..n {
        for l in k + 1..n {
            let avg = 0.5 * (m[(k, l)] + m[(l, k)]);
            m[(k, l)] = avg;
            m[(l, k)] = avg;
        }
    }
}
