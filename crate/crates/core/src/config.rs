//! JSON run configuration. Every field has a default, and the defaults
//! describe the 89-waveguide AlGaAs experiment: C = 290 m⁻¹ over 8 mm, so
//! 2Cz = 4.64.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::classical::EnsembleConfig;
use crate::error::{Error, Result};
use crate::lattice::{site_from_label, Coupling, LatticeSpec};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeConfig,
    pub input: InputConfig,
    pub classical: ClassicalConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub n: usize,
    /// m⁻¹; a number or one value per bond.
    pub coupling: Coupling,
    /// Propagation length in m.
    pub length: f64,
    pub beta: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            n: 89,
            coupling: Coupling::Uniform(290.0),
            length: 8e-3,
            beta: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    FockPair,
    PathEntangled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub kind: InputKind,
    /// Display-centred labels: the middle waveguide is 0.
    pub sites: [i64; 2],
    /// Relative phase of the second term, path-entangled inputs only.
    pub phase: f64,
}

impl Default for InputConfig {
    fn default() -> Self {
        Self {
            kind: InputKind::FockPair,
            sites: [0, 1],
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalConfig {
    pub enabled: bool,
    pub samples: usize,
    pub seed: u64,
    pub intensity: f64,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        let e = EnsembleConfig::default();
        Self {
            enabled: true,
            samples: e.samples,
            seed: e.seed,
            intensity: e.intensity,
        }
    }
}

impl ClassicalConfig {
    pub fn ensemble(&self) -> EnsembleConfig {
        EnsembleConfig {
            samples: self.samples,
            seed: self.seed,
            intensity: self.intensity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub z_min: f64,
    pub z_max: f64,
    pub steps: usize,
}

impl ScanConfig {
    /// `steps` evenly spaced distances from `z_min` to `z_max` inclusive.
    pub fn points(&self) -> Vec<f64> {
        let span = self.z_max - self.z_min;
        (0..self.steps)
            .map(|i| self.z_min + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Pgm,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "pgm" => Ok(Format::Pgm),
            other => Err(format!("unknown format `{other}` (expected csv, json or pgm)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![Format::Csv],
        }
    }
}

/// A configuration resolved into validated model objects.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub spec: LatticeSpec,
    pub z: f64,
    /// Internal (0-based) input sites.
    pub sites: (usize, usize),
    pub ensemble: Option<EnsembleConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn resolve(&self) -> Result<ResolvedRun> {
        let lat = &self.lattice;
        if lat.n < 2 {
            return Err(Error::config(
                "lattice.n",
                format!("need at least 2 waveguides, got {}", lat.n),
            ));
        }
        if !lat.beta.is_finite() {
            return Err(Error::config("lattice.beta", "must be finite"));
        }
        let spec = LatticeSpec::new(lat.n, lat.coupling.clone(), lat.beta)
            .map_err(|e| Error::config("lattice.coupling", e.to_string()))?;
        if !(lat.length.is_finite() && lat.length >= 0.0) {
            return Err(Error::config(
                "lattice.length",
                format!("must be finite and ≥ 0, got {}", lat.length),
            ));
        }

        let site = |i: usize| {
            let label = self.input.sites[i];
            site_from_label(label, lat.n).ok_or_else(|| {
                Error::config(
                    format!("input.sites[{i}]"),
                    format!("label {label} outside a lattice of {} waveguides", lat.n),
                )
            })
        };
        let sites = (site(0)?, site(1)?);
        if !self.input.phase.is_finite() {
            return Err(Error::config("input.phase", "must be finite"));
        }
        if self.input.kind == InputKind::PathEntangled && sites.0 == sites.1 {
            return Err(Error::config(
                "input.sites",
                "path-entangled input needs two distinct waveguides",
            ));
        }

        let ensemble = if self.classical.enabled {
            if sites.0 == sites.1 {
                return Err(Error::config(
                    "classical.enabled",
                    "classical correlations need two distinct input waveguides",
                ));
            }
            if self.classical.samples < 1 {
                return Err(Error::config("classical.samples", "must be at least 1"));
            }
            if !(self.classical.intensity.is_finite() && self.classical.intensity > 0.0) {
                return Err(Error::config("classical.intensity", "must be positive"));
            }
            Some(self.classical.ensemble())
        } else {
            None
        };

        if let Some(scan) = &self.scan {
            if scan.steps < 2 {
                return Err(Error::config("scan.steps", "must be at least 2"));
            }
            if !(scan.z_min.is_finite() && scan.z_max.is_finite())
                || scan.z_min < 0.0
                || scan.z_max <= scan.z_min
            {
                return Err(Error::config(
                    "scan",
                    format!("need 0 ≤ z_min < z_max, got {} and {}", scan.z_min, scan.z_max),
                ));
            }
        }
        if self.output.formats.is_empty() {
            return Err(Error::config("output.formats", "at least one format required"));
        }

        Ok(ResolvedRun {
            spec,
            z: lat.length,
            sites,
            ensemble,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_experiment_defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let r = cfg.resolve().unwrap();
        assert_eq!(r.spec.len(), 89);
        assert_eq!(r.z, 8e-3);
        assert!((2.0 * r.spec.bonds()[0] * r.z - 4.64).abs() < 1e-12);
        assert_eq!(r.sites, (44, 45));
        assert_eq!(r.ensemble.unwrap().samples, 100_000);
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(RunConfig::from_json("").is_err());
        assert!(RunConfig::from_json("not json").is_err());
        assert!(RunConfig::from_json("{\"lattice\": {\"n\": \"x\"}}").is_err());
        assert!(RunConfig::from_json("{\"bogus\": 1}").is_err());
    }

    #[test]
    fn per_bond_coupling_parses() {
        let cfg = RunConfig::from_json(
            r#"{"lattice": {"n": 3, "coupling": [100, 200]}, "input": {"sites": [-1, 1]}}"#,
        )
        .unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.spec.bonds(), &[100.0, 200.0]);
        assert_eq!(r.sites, (0, 2));
    }

    fn field_of(cfg: &RunConfig) -> String {
        match cfg.resolve().unwrap_err() {
            Error::Config { field, .. } => field,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn diagnostics_name_the_field() {
        let mut cfg = RunConfig::default();
        cfg.lattice.n = 1;
        assert_eq!(field_of(&cfg), "lattice.n");

        let mut cfg = RunConfig::default();
        cfg.lattice.coupling = Coupling::PerBond(vec![1.0; 3]);
        assert_eq!(field_of(&cfg), "lattice.coupling");

        let mut cfg = RunConfig::default();
        cfg.lattice.coupling = Coupling::Uniform(-3.0);
        assert_eq!(field_of(&cfg), "lattice.coupling");

        let mut cfg = RunConfig::default();
        cfg.lattice.length = -1.0;
        assert_eq!(field_of(&cfg), "lattice.length");

        let mut cfg = RunConfig::default();
        cfg.input.sites = [0, 50];
        assert_eq!(field_of(&cfg), "input.sites[1]");

        let mut cfg = RunConfig::default();
        cfg.input.sites = [2, 2];
        assert_eq!(field_of(&cfg), "classical.enabled");
        cfg.classical.enabled = false;
        assert!(cfg.resolve().is_ok());
        cfg.input.kind = InputKind::PathEntangled;
        assert_eq!(field_of(&cfg), "input.sites");

        let mut cfg = RunConfig::default();
        cfg.classical.samples = 0;
        assert_eq!(field_of(&cfg), "classical.samples");

        let mut cfg = RunConfig::default();
        cfg.scan = Some(ScanConfig {
            z_min: 0.0,
            z_max: 1e-2,
            steps: 1,
        });
        assert_eq!(field_of(&cfg), "scan.steps");

        let mut cfg = RunConfig::default();
        cfg.output.formats.clear();
        assert_eq!(field_of(&cfg), "output.formats");
    }

    #[test]
    fn json_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.input.kind = InputKind::PathEntangled;
        cfg.input.phase = std::f64::consts::PI;
        cfg.scan = Some(ScanConfig {
            z_min: 0.0,
            z_max: 8e-3,
            steps: 17,
        });
        cfg.output.formats = vec![Format::Csv, Format::Pgm];
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn scan_points_are_inclusive() {
        let pts = ScanConfig {
            z_min: 1.0,
            z_max: 2.0,
            steps: 5,
        }
        .points();
        assert_eq!(pts, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }
}
