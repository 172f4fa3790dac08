//! Single-photon propagators `U(z) = exp(i z C)`.
//!
//! Three routes are provided: spectral exponentiation of the finite coupling
//! matrix, the closed-form two-waveguide coupler, and the Bessel-function
//! amplitudes of an unbounded uniform lattice. The global phase `e^{iβz}` is
//! never applied.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

/// Maximum tolerated `max |U U† − I|` before a propagator is rejected.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Complex unitary transfer matrix evaluated at a propagation distance.
///
/// `U[(k, l)]` is the amplitude for a photon entering waveguide `l` to leave
/// from waveguide `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorMatrix {
    u: DMatrix<Complex64>,
    z: f64,
}

impl PropagatorMatrix {
    /// Wraps an arbitrary matrix, checking only that it is square and unitary.
    pub fn from_matrix(u: DMatrix<Complex64>, z: f64) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch {
                expected: u.nrows(),
                got: u.ncols(),
            });
        }
        let p = Self { u, z };
        let defect = p.unitarity_defect();
        if !(defect <= UNITARITY_TOL) {
            return Err(Error::NumericalContract(format!(
                "propagator unitarity defect {defect:e} exceeds {UNITARITY_TOL:e}"
            )));
        }
        Ok(p)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            u: DMatrix::identity(n, n),
            z: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.u
    }

    /// Elementwise complex conjugate: the map applied to creation operators.
    pub fn conjugate(&self) -> DMatrix<Complex64> {
        self.u.map(|c| c.conj())
    }

    /// `max |(U U†)_{kl} − δ_{kl}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = &self.u * self.u.adjoint();
        let n = self.dim();
        let mut worst = 0.0f64;
        for k in 0..n {
            for l in 0..n {
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((prod[(k, l)] - target).norm());
            }
        }
        worst
    }

    /// `max |U_{kl} − U_{lk}|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for k in 0..n {
            for l in k + 1..n {
                worst = worst.max((self.u[(k, l)] - self.u[(l, k)]).norm());
            }
        }
        worst
    }

    /// Matrix product `self · other`, e.g. to compose two propagation steps.
    pub fn compose(&self, other: &PropagatorMatrix) -> Result<PropagatorMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(PropagatorMatrix {
            u: &self.u * &other.u,
            z: self.z + other.z,
        })
    }
}

impl std::ops::Index<(usize, usize)> for PropagatorMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.u[idx]
    }
}

/// Cached eigendecomposition `C = V Λ Vᵀ` of a lattice's coupling matrix.
///
/// Building it costs one O(n³) diagonalisation; each [`SpectralPropagator::at`]
/// call afterwards is a single matrix product.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralPropagator {
    pub fn new(spec: &LatticeSpec) -> Result<Self> {
        let c = spec.coupling_matrix().into_matrix();
        let n = c.nrows();
        let eig = SymmetricEigen::try_new(c, f64::EPSILON, 1000 * n)
            .ok_or(Error::EigenNonConvergence(n))?;
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// `U(z) = V diag(e^{i z λ}) Vᵀ`, symmetrised and checked for unitarity.
    pub fn at(&self, z: f64) -> Result<PropagatorMatrix> {
        if !(z.is_finite() && z >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "propagation distance must be finite and ≥ 0, got {z}"
            )));
        }
        let n = self.dim();
        let v = self.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, z * lambda);
            for k in 0..n {
                scaled[(k, j)] *= phase;
            }
        }
        let mut u = scaled * v.transpose();
        // exp of a symmetric matrix is symmetric; remove rounding asymmetry.
        for k in 0..n {
            for l in k + 1..n {
                let avg = 0.5 * (u[(k, l)] + u[(l, k)]);
                u[(k, l)] = avg;
                u[(l, k)] = avg;
            }
        }
        PropagatorMatrix::from_matrix(u, z)
    }
}

/// `U(z) = exp(i z C)` for a finite lattice with open boundaries.
pub fn evolve_unitary(spec: &LatticeSpec, z: f64) -> Result<PropagatorMatrix> {
    SpectralPropagator::new(spec)?.at(z)
}

/// Closed form for two coupled waveguides:
/// `[[cos Cz, i sin Cz], [i sin Cz, cos Cz]]`.
pub fn coupler_unitary(coupling: f64, z: f64) -> Result<PropagatorMatrix> {
    if !(coupling.is_finite() && coupling >= 0.0 && z.is_finite() && z >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "coupler needs finite C ≥ 0 and z ≥ 0, got C={coupling}, z={z}"
        )));
    }
    let (s, c) = (coupling * z).sin_cos();
    let u = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(0.0, s),
            Complex64::new(c, 0.0),
        ],
    );
    Ok(PropagatorMatrix { u, z })
}

/// Unbounded uniform lattice amplitude `i^{offset} J_offset(2 C z)` for an
/// output site `offset = q − k` away from the input.
pub fn infinite_propagator(offset: i32, cz: f64) -> Result<Complex64> {
    if !(cz.is_finite() && cz >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "C·z must be finite and ≥ 0, got {cz}"
        )));
    }
    let j = bessel_j(offset, 2.0 * cz)?;
    let phase = match offset.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    Ok(phase * j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_distance_is_identity() {
        for n in [2, 5, 30] {
            let spec = LatticeSpec::uniform(n, 290.0).unwrap();
            let u = evolve_unitary(&spec, 0.0).unwrap();
            let id = DMatrix::<Complex64>::identity(n, n);
            assert!(max_diff(u.matrix(), &id) <= 1e-14);
        }
        let u = coupler_unitary(290.0, 0.0).unwrap();
        assert_eq!(u.matrix(), &DMatrix::<Complex64>::identity(2, 2));
    }

    #[test]
    fn spectral_matches_coupler_closed_form() {
        let c = 290.0;
        let spec = LatticeSpec::uniform(2, c).unwrap();
        let prop = SpectralPropagator::new(&spec).unwrap();
        for i in 0..50 {
            let z = i as f64 * 3.7e-4;
            let a = prop.at(z).unwrap();
            let b = coupler_unitary(c, z).unwrap();
            assert!(max_diff(a.matrix(), b.matrix()) <= 1e-12, "z={z}");
        }
    }

    #[test]
    fn beam_splitter_point() {
        let c = 3.0;
        let u = coupler_unitary(c, PI / (4.0 * c)).unwrap();
        for v in u.matrix().iter() {
            assert!((v.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert_eq!(u[(0, 0)].im, 0.0);
        assert_eq!(u[(0, 1)].re, 0.0);
    }

    #[test]
    fn full_crossover() {
        let c = 3.0;
        let u = coupler_unitary(c, PI / (2.0 * c)).unwrap();
        assert!((u[(0, 1)].norm() - 1.0).abs() < 1e-15);
        assert!(u[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn wide_lattice_matches_bessel_amplitudes() {
        let (c, z) = (290.0, 8e-3);
        let spec = LatticeSpec::uniform(201, c).unwrap();
        let u = evolve_unitary(&spec, z).unwrap();
        let k = 100;
        for q in k - 40..=k + 40 {
            let offset = q as i32 - k as i32;
            let want = infinite_propagator(offset, c * z).unwrap();
            assert!((u[(q, k)] - want).norm() <= 1e-8, "offset {offset}");
        }
    }

    #[test]
    fn infinite_lattice_values() {
        assert_eq!(infinite_propagator(0, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let x = 4.64;
        for offset in -12..=12 {
            let amp = infinite_propagator(offset, x / 2.0).unwrap();
            let j = bessel_j(offset, x).unwrap();
            assert!((amp.norm_sqr() - j * j).abs() < 1e-15);
        }
        let mut total = 0.0;
        let mut offset = 0i32;
        loop {
            let p = infinite_propagator(offset, x / 2.0).unwrap().norm_sqr();
            total += if offset == 0 { p } else { 2.0 * p };
            if offset > 0 && p < 1e-18 {
                break;
            }
            offset += 1;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_distances() {
        let spec = LatticeSpec::uniform(3, 1.0).unwrap();
        assert!(evolve_unitary(&spec, -1.0).is_err());
        assert!(evolve_unitary(&spec, f64::NAN).is_err());
        assert!(coupler_unitary(-1.0, 1.0).is_err());
        assert!(infinite_propagator(0, -0.5).is_err());
        assert!(infinite_propagator(600, 1.0).is_err());
    }

    #[test]
    fn non_unitary_matrix_rejected() {
        let m = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(
            PropagatorMatrix::from_matrix(m, 0.0),
            Err(Error::NumericalContract(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn lattice() -> impl Strategy<Value = LatticeSpec> {
            (2usize..60).prop_flat_map(|n| {
                proptest::collection::vec(0.0f64..500.0, n - 1)
                    .prop_map(move |b| LatticeSpec::new(n, b, 0.0).unwrap())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn unitary_and_symmetric(spec in lattice(), z in 0.0f64..0.01) {
                let u = evolve_unitary(&spec, z).unwrap();
                prop_assert!(u.unitarity_defect() <= 1e-10);
                prop_assert!(u.asymmetry() <= 1e-12);
            }

            #[test]
            fn semigroup(spec in lattice(), z1 in 0.0f64..0.01, z2 in 0.0f64..0.01) {
                let prop = SpectralPropagator::new(&spec).unwrap();
                let whole = prop.at(z1 + z2).unwrap();
                let steps = prop.at(z1).unwrap().compose(&prop.at(z2).unwrap()).unwrap();
                prop_assert!(max_diff(whole.matrix(), steps.matrix()) <= 1e-10);
            }
        }
    }
}
