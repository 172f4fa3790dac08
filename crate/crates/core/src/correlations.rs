//! Photon-number correlations `Γ_{q,r} = ⟨a†_q a†_r a_r a_q⟩` and the
//! Cauchy-Schwarz witness.
//!
//! For a two-photon state with amplitude matrix `Ψ`, `Γ_{q,r} = 4|Ψ_{qr}|²`.
//! Off the diagonal this is the coincidence probability for the unordered
//! pair `{q, r}`; on the diagonal it is the second factorial moment, so the
//! probability of finding both photons in waveguide `q` is `Γ_{q,q} / 2`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::propagator::PropagatorMatrix;
use crate::states::TwoPhotonState;

/// Values in `[-CLAMP_TOL, 0)` are rounding noise and are stored as zero.
pub const CLAMP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationKind {
    Quantum,
    /// Intensity correlations of classical light, with the per-beam intensity.
    Classical { intensity: f64 },
}

impl CorrelationKind {
    pub fn name(&self) -> &'static str {
        match self {
            CorrelationKind::Quantum => "quantum",
            CorrelationKind::Classical { .. } => "classical",
        }
    }
}

/// Real symmetric non-negative matrix over output waveguide pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    values: DMatrix<f64>,
    kind: CorrelationKind,
}

impl CorrelationMatrix {
    pub fn new(mut values: DMatrix<f64>, kind: CorrelationKind) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::DimensionMismatch {
                expected: values.nrows(),
                got: values.ncols(),
            });
        }
        let n = values.nrows();
        for k in 0..n {
            for l in k + 1..n {
                if values[(k, l)] != values[(l, k)] {
                    return Err(Error::NumericalContract(format!(
                        "correlation matrix not symmetric at ({k}, {l})"
                    )));
                }
            }
        }
        for v in values.iter_mut() {
            if !v.is_finite() || *v < -CLAMP_TOL {
                return Err(Error::NumericalContract(format!(
                    "correlation entry {v} is not a non-negative number"
                )));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(Self { values, kind })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    pub fn is_quantum(&self) -> bool {
        self.kind == CorrelationKind::Quantum
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    /// `Σ_{q<r} Γ_{qr} + Σ_q Γ_{qq} / 2`; equals 1 for a normalised
    /// two-photon state.
    pub fn total_probability(&self) -> f64 {
        0.5 * self.values.sum()
    }

    /// Probability of detecting both photons in waveguide `q`.
    pub fn same_site_probability(&self, q: usize) -> f64 {
        0.5 * self.values[(q, q)]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.values.row_iter().map(|r| r.sum()).collect()
    }

    /// Same entries multiplied by `factor`, keeping the kind flag.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(&self.values * factor, self.kind)
    }
}

impl std::ops::Index<(usize, usize)> for CorrelationMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.values[idx]
    }
}

pub fn gamma_matrix(state: &TwoPhotonState) -> CorrelationMatrix {
    let values = state.amplitudes().map(|a| 4.0 * a.norm_sqr());
    // |Ψ_kl|² = |Ψ_lk|² exactly since Ψ is exactly symmetric.
    CorrelationMatrix::new(values, CorrelationKind::Quantum)
        .expect("Γ from a valid state is symmetric and non-negative")
}

/// Mean photon number per waveguide, `⟨n_q⟩ = Σ_r Γ_{q,r}` for two photons.
pub fn photon_numbers(state: &TwoPhotonState) -> Vec<f64> {
    gamma_matrix(state).row_sums()
}

/// Output distribution `|U_{q,k}|²` of a single photon entering waveguide `k`.
pub fn single_photon_map(u: &PropagatorMatrix, k: usize) -> Result<Vec<f64>> {
    if k >= u.dim() {
        return Err(Error::InvalidArgument(format!(
            "site {k} outside lattice of {} waveguides",
            u.dim()
        )));
    }
    Ok(u.matrix().column(k).iter().map(|a| a.norm_sqr()).collect())
}

/// `W_{q,r} = √(Γ_{q,q} Γ_{r,r}) − Γ_{q,r}`. Classical intensity statistics
/// satisfy `W ≥ 0`; a negative entry certifies a nonclassical pair.
pub fn cs_witness(gamma: &CorrelationMatrix) -> DMatrix<f64> {
    let g = gamma.values();
    DMatrix::from_fn(g.nrows(), g.ncols(), |q, r| {
        (g[(q, q)] * g[(r, r)]).sqrt() - g[(q, r)]
    })
}

/// Distance from input `k` to the brightest output site of a single photon,
/// i.e. the ballistic-lobe offset. Ties resolve to the smaller distance.
pub fn lobe_offset(u: &PropagatorMatrix, k: usize) -> Result<usize> {
    let map = single_photon_map(u, k)?;
    let mut best = (0usize, f64::NEG_INFINITY);
    for (q, &p) in map.iter().enumerate() {
        let d = q.abs_diff(k);
        if p > best.1 + 1e-14 || ((p - best.1).abs() <= 1e-14 && d < best.0) {
            best = (d, p);
        }
    }
    Ok(best.0)
}

/// Outer ballistic lobes `(left, right)` for photons launched into sites `k`
/// and `l`: one lobe offset beyond the leftmost and rightmost input.
pub fn outer_lobes(u: &PropagatorMatrix, k: usize, l: usize) -> Result<(usize, usize)> {
    let (lo, hi) = (k.min(l), k.max(l));
    let p = lobe_offset(u, lo)?;
    if p > lo || hi + p >= u.dim() {
        return Err(Error::InvalidArgument(format!(
            "lobes at offset {p} from sites {lo}..{hi} fall outside {} waveguides",
            u.dim()
        )));
    }
    Ok((lo - p, hi + p))
}
