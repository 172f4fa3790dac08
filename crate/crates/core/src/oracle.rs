//! Brute-force Fock-space evolution for small lattices.
//!
//! States are expanded on explicit occupation-number vectors, the hopping
//! Hamiltonian `H = Σ_k C_{k,k+1} (a†_k a_{k+1} + a†_{k+1} a_k)` is built
//! from ladder-operator action with bosonic `√n` factors, and states evolve
//! as `|ψ(z)⟩ = exp(−i z H) |ψ(0)⟩`. Correlations are then read off by
//! applying annihilation operators directly. Nothing here goes through the
//! amplitude-matrix shortcut used by [`crate::states`], which makes it a
//! reference for that path.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::correlations::{CorrelationKind, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::states::TwoPhotonState;

pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 8;

type Occupation = Vec<u8>;

/// Fixed-photon-number sector spanned by occupation vectors.
#[derive(Debug, Clone)]
struct Sector {
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl Sector {
    fn new(n: usize, photons: u8) -> Self {
        let mut states = Vec::new();
        let mut occ = vec![0u8; n];
        fill(&mut occ, 0, photons, &mut states);
        // Lexicographic in the occupied site list, e.g. (0,0) < (0,1) < (1,1).
        states.sort_by_key(|o| std::cmp::Reverse(o.clone()));
        let index = states
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        Self { states, index }
    }

    fn len(&self) -> usize {
        self.states.len()
    }

    /// Matrix of the hopping operator in this sector.
    fn hopping(&self, spec: &LatticeSpec) -> DMatrix<f64> {
        let dim = self.len();
        let mut h = DMatrix::zeros(dim, dim);
        for (j, occ) in self.states.iter().enumerate() {
            for (k, &c) in spec.bonds().iter().enumerate() {
                for (from, to) in [(k + 1, k), (k, k + 1)] {
                    if let Some((out, amp)) = hop(occ, from, to) {
                        h[(self.index[&out], j)] += c * amp;
                    }
                }
            }
        }
        h
    }

    /// `exp(−i z H)` by diagonalising the real symmetric sector Hamiltonian.
    fn evolution(&self, spec: &LatticeSpec, z: f64) -> Result<DMatrix<Complex64>> {
        let h = self.hopping(spec);
        let dim = h.nrows();
        let eig = SymmetricEigen::try_new(h, f64::EPSILON, 1000 * dim)
            .ok_or(Error::EigenNonConvergence(dim))?;
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let phases = DMatrix::from_diagonal(&DVector::from_iterator(
            dim,
            eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -z * l)),
        ));
        Ok(&v * phases * v.transpose())
    }
}

fn fill(occ: &mut Occupation, site: usize, left: u8, out: &mut Vec<Occupation>) {
    if site == occ.len() - 1 {
        occ[site] = left;
        out.push(occ.clone());
        return;
    }
    for here in (0..=left).rev() {
        occ[site] = here;
        fill(occ, site + 1, left - here, out);
    }
    occ[site] = 0;
}

/// `a†_to a_from |occ⟩`.
fn hop(occ: &Occupation, from: usize, to: usize) -> Option<(Occupation, f64)> {
    let (out, a) = lower(occ, from)?;
    let (out, b) = raise(&out, to);
    Some((out, a * b))
}

fn lower(occ: &Occupation, site: usize) -> Option<(Occupation, f64)> {
    let m = occ[site];
    if m == 0 {
        return None;
    }
    let mut out = occ.clone();
    out[site] = m - 1;
    Some((out, (m as f64).sqrt()))
}

fn raise(occ: &Occupation, site: usize) -> (Occupation, f64) {
    let mut out = occ.clone();
    out[site] += 1;
    let factor = (out[site] as f64).sqrt();
    (out, factor)
}

fn check_envelope(n: usize) -> Result<()> {
    if !(MIN_SITES..=MAX_SITES).contains(&n) {
        return Err(Error::OutOfEnvelope(format!(
            "Fock oracle supports {MIN_SITES}..={MAX_SITES} waveguides, got {n}"
        )));
    }
    Ok(())
}

/// Two-photon basis: every unordered site pair `(k, l)` with `k ≤ l`, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct FockBasis {
    n: usize,
    pairs: Vec<(usize, usize)>,
    sector: Sector,
}

impl FockBasis {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn index_of(&self, k: usize, l: usize) -> Option<usize> {
        let (a, b) = (k.min(l), k.max(l));
        self.pairs.iter().position(|&p| p == (a, b))
    }
}

pub fn fock_basis(n: usize) -> Result<FockBasis> {
    check_envelope(n)?;
    let sector = Sector::new(n, 2);
    let pairs = sector
        .states
        .iter()
        .map(|occ| {
            let mut sites = occ
                .iter()
                .enumerate()
                .flat_map(|(s, &m)| std::iter::repeat_n(s, m as usize));
            let a = sites.next().expect("two photons");
            let b = sites.next().expect("two photons");
            (a, b)
        })
        .collect();
    Ok(FockBasis { n, pairs, sector })
}

/// Hopping Hamiltonian on the two-photon basis. Real symmetric, hence
/// Hermitian.
pub fn fock_hamiltonian(spec: &LatticeSpec) -> Result<DMatrix<f64>> {
    let basis = fock_basis(spec.len())?;
    Ok(basis.sector.hopping(spec))
}

/// Two-photon state vector on a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct FockVector {
    pub basis: FockBasis,
    pub amplitudes: DVector<Complex64>,
}

impl FockVector {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `Γ_{q,r} = ‖a_r a_q |ψ⟩‖²`.
    pub fn gamma(&self) -> Result<CorrelationMatrix> {
        let n = self.basis.n;
        let mut g = DMatrix::zeros(n, n);
        for q in 0..n {
            for r in 0..n {
                let mut vacuum: HashMap<Occupation, Complex64> = HashMap::new();
                for (occ, &amp) in self.basis.sector.states.iter().zip(self.amplitudes.iter()) {
                    let Some((once, f1)) = lower(occ, q) else { continue };
                    let Some((twice, f2)) = lower(&once, r) else { continue };
                    *vacuum.entry(twice).or_default() += amp * (f1 * f2);
                }
                g[(q, r)] = vacuum.values().map(|a| a.norm_sqr()).sum();
            }
        }
        CorrelationMatrix::new(g, CorrelationKind::Quantum)
    }
}

/// Expands `Σ Ψ_{kl} a†_k a†_l |0⟩` on the occupation basis:
/// `|1_k 1_l⟩` gets `2Ψ_{kl}` and `|2_k⟩` gets `√2 Ψ_{kk}`.
pub fn embed(state: &TwoPhotonState) -> Result<FockVector> {
    let basis = fock_basis(state.dim())?;
    let psi = state.amplitudes();
    let amplitudes = DVector::from_iterator(
        basis.len(),
        basis.pairs.iter().map(|&(k, l)| {
            if k == l {
                psi[(k, k)] * std::f64::consts::SQRT_2
            } else {
                psi[(k, l)] + psi[(l, k)]
            }
        }),
    );
    Ok(FockVector { basis, amplitudes })
}

pub fn evolve_fock(state: &TwoPhotonState, spec: &LatticeSpec, z: f64) -> Result<FockVector> {
    if state.dim() != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            got: state.dim(),
        });
    }
    let mut v = embed(state)?;
    let evo = v.basis.sector.evolution(spec, z)?;
    v.amplitudes = evo * v.amplitudes;
    Ok(v)
}

pub fn oracle_gamma(state: &TwoPhotonState, spec: &LatticeSpec, z: f64) -> Result<CorrelationMatrix> {
    evolve_fock(state, spec, z)?.gamma()
}

/// `⟨1_k| exp(−i z H) |1_l⟩` in the one-photon sector. Must equal
/// `conj(U(z))` entry for entry.
pub fn single_photon_evolution(spec: &LatticeSpec, z: f64) -> Result<DMatrix<Complex64>> {
    check_envelope(spec.len())?;
    let sector = Sector::new(spec.len(), 1);
    // Sector ordering puts the photon at site 0 first, so index == site.
    sector.evolution(spec, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::gamma_matrix;
    use crate::propagator::evolve_unitary;
    use crate::states::{fock_pair, propagate};
    use std::f64::consts::PI;

    #[test]
    fn basis_layout() {
        let b = fock_basis(2).unwrap();
        assert_eq!(b.pairs(), &[(0, 0), (0, 1), (1, 1)]);
        assert_eq!(fock_basis(3).unwrap().len(), 6);
        let b8 = fock_basis(8).unwrap();
        assert_eq!(b8.len(), 36);
        assert!(b8.pairs().windows(2).all(|w| w[0] < w[1]));
        assert!(fock_basis(1).is_err());
        assert!(fock_basis(9).is_err());
        assert_eq!(b8.index_of(3, 1), b8.index_of(1, 3));
    }

    #[test]
    fn single_photon_sector_ordering() {
        let s = Sector::new(4, 1);
        for (i, occ) in s.states.iter().enumerate() {
            assert_eq!(occ[i], 1);
        }
    }

    #[test]
    fn bosonic_enhancement() {
        let c = 3.0;
        let h = fock_hamiltonian(&LatticeSpec::uniform(2, c).unwrap()).unwrap();
        // basis: (0,0), (0,1), (1,1)
        assert!((h[(1, 0)].abs() - 2f64.sqrt() * c).abs() < 1e-15);
        assert!((h[(1, 2)].abs() - 2f64.sqrt() * c).abs() < 1e-15);
        assert_eq!(h[(0, 2)], 0.0);
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn zero_coupling_gives_zero_hamiltonian() {
        let h = fock_hamiltonian(&LatticeSpec::uniform(5, 0.0).unwrap()).unwrap();
        assert!(h.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hom_dip() {
        let c = 290.0;
        let spec = LatticeSpec::uniform(2, c).unwrap();
        let g = oracle_gamma(&fock_pair(0, 1, 2).unwrap(), &spec, PI / (4.0 * c)).unwrap();
        assert!(g[(0, 1)] <= 1e-12);
        for i in 0..40 {
            let z = i as f64 * 1e-4;
            let g = oracle_gamma(&fock_pair(0, 1, 2).unwrap(), &spec, z).unwrap();
            assert!((g[(0, 1)] - (2.0 * c * z).cos().powi(2)).abs() <= 1e-10);
        }
    }

    #[test]
    fn single_photon_consistency() {
        let spec = LatticeSpec::new(6, vec![1.0, 2.5, 0.3, 4.0, 2.0], 0.0).unwrap();
        let z = 0.83;
        let fock = single_photon_evolution(&spec, z).unwrap();
        let u = evolve_unitary(&spec, z).unwrap().conjugate();
        for (a, b) in fock.iter().zip(u.iter()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn embedding_preserves_norm() {
        let s = fock_pair(1, 3, 5).unwrap();
        assert!((embed(&s).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
        let s = fock_pair(2, 2, 5).unwrap();
        assert!((embed(&s).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_fast_path_amplitudes() {
        let spec = LatticeSpec::new(5, vec![1.2, 0.4, 2.2, 1.7], 0.0).unwrap();
        let z = 0.91;
        let c = Complex64::new(0.6, 0.0);
        let s = crate::states::superpose(
            &[fock_pair(0, 3, 5).unwrap(), fock_pair(2, 2, 5).unwrap()],
            &[c, Complex64::new(0.0, 0.8)],
        )
        .unwrap();
        let fast = propagate(&s, &evolve_unitary(&spec, z).unwrap()).unwrap();
        let slow = evolve_fock(&s, &spec, z).unwrap();
        assert!((slow.norm_sqr() - 1.0).abs() <= 1e-12);
        let fast_vec = embed(&fast).unwrap();
        for (a, b) in fast_vec.amplitudes.iter().zip(slow.amplitudes.iter()) {
            assert!((a - b).norm() <= 1e-10);
        }
        let g_fast = gamma_matrix(&fast);
        let g_slow = slow.gamma().unwrap();
        for (a, b) in g_fast.values().iter().zip(g_slow.values().iter()) {
            assert!((a - b).abs() <= 1e-10);
        }
    }
}
