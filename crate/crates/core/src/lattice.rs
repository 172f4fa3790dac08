//! Lattice descriptions and their nearest-neighbour coupling matrices.
//!
//! Sites are 0-based. Bond `k` couples sites `k` and `k + 1`. Couplings are in
//! m⁻¹ and propagation distances in m, so `C·z` is dimensionless.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Either one coupling for every bond or an explicit per-bond list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coupling {
    Uniform(f64),
    PerBond(Vec<f64>),
}

impl From<f64> for Coupling {
    fn from(c: f64) -> Self {
        Coupling::Uniform(c)
    }
}

impl From<Vec<f64>> for Coupling {
    fn from(bonds: Vec<f64>) -> Self {
        Coupling::PerBond(bonds)
    }
}

impl From<&[f64]> for Coupling {
    fn from(bonds: &[f64]) -> Self {
        Coupling::PerBond(bonds.to_vec())
    }
}

/// A validated array of identical single-mode waveguides.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    n: usize,
    bonds: Vec<f64>,
    beta: f64,
}

impl LatticeSpec {
    /// Builds a lattice of `n` sites. A scalar coupling expands to `n - 1`
    /// equal bonds; a sequence must contain exactly `n - 1` entries.
    ///
    /// `beta` is kept for the record only. It contributes a global phase
    /// `e^{iβz}` that cancels from every intensity and correlation.
    pub fn new(n: usize, coupling: impl Into<Coupling>, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidLattice(format!(
                "need at least 2 waveguides, got {n}"
            )));
        }
        let bonds = match coupling.into() {
            Coupling::Uniform(c) => vec![c; n - 1],
            Coupling::PerBond(b) => {
                if b.len() != n - 1 {
                    return Err(Error::InvalidLattice(format!(
                        "{n} waveguides need {} bonds, got {}",
                        n - 1,
                        b.len()
                    )));
                }
                b
            }
        };
        if let Some((k, c)) = bonds
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_finite() || **c < 0.0)
        {
            return Err(Error::InvalidLattice(format!(
                "bond {k} has coupling {c}; couplings must be finite and non-negative"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidLattice(format!(
                "propagation constant must be finite, got {beta}"
            )));
        }
        Ok(Self { n, bonds, beta })
    }

    pub fn uniform(n: usize, coupling: f64) -> Result<Self> {
        Self::new(n, coupling, 0.0)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bonds(&self) -> &[f64] {
        &self.bonds
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_uniform(&self) -> bool {
        self.bonds.windows(2).all(|w| w[0] == w[1])
    }

    /// The middle waveguide, used as label 0 in reports.
    pub fn center(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn coupling_matrix(&self) -> CouplingMatrix {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (k, &c) in self.bonds.iter().enumerate() {
            m[(k, k + 1)] = c;
            m[(k + 1, k)] = c;
        }
        CouplingMatrix(m)
    }
}

/// Real symmetric tridiagonal matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix(DMatrix<f64>);

impl CouplingMatrix {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

impl std::ops::Index<(usize, usize)> for CouplingMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Display label of internal site `index` when the middle waveguide is 0.
pub fn display_label(index: usize, n: usize) -> i64 {
    index as i64 - ((n - 1) / 2) as i64
}

/// Inverse of [`display_label`]; `None` if the label lies outside the lattice.
pub fn site_from_label(label: i64, n: usize) -> Option<usize> {
    let idx = label + ((n - 1) / 2) as i64;
    (0..n as i64).contains(&idx).then_some(idx as usize)
}
