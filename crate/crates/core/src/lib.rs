//! Photon-pair propagation in coupled-waveguide lattices.
//!
//! The crate evolves two-photon Fock and path-entangled states through
//! nearest-neighbour waveguide arrays, computes their photon-number
//! correlation maps, and compares them with the intensity correlations of
//! phase-averaged classical light.
//!
//! ```
//! use wavecorr::{lattice::LatticeSpec, propagator::evolve_unitary, states, correlations};
//!
//! let spec = LatticeSpec::uniform(21, 290.0).unwrap();
//! let u = evolve_unitary(&spec, 4e-3).unwrap();
//! let out = states::fock_pair(10, 11, 21).unwrap().propagate(&u).unwrap();
//! let gamma = correlations::gamma_matrix(&out);
//! assert!((gamma.total_probability() - 1.0).abs() < 1e-10);
//! ```

pub mod bessel;
pub mod classical;
pub mod config;
pub mod correlations;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod output;
pub mod pipeline;
pub mod propagator;
pub mod states;

pub use error::{Error, Result};
