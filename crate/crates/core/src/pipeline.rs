//! End-to-end scenarios: a configured lattice run with file artifacts, the
//! two-waveguide coincidence scan, and the randomized oracle comparison.

use std::collections::BTreeMap;
use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::classical::{classical_bound_margin, classical_gamma_analytic, classical_gamma_mc};
use crate::config::{Format, InputKind, RunConfig};
use crate::correlations::{cs_witness, gamma_matrix, outer_lobes, single_photon_map};
use crate::error::{Error, Result};
use crate::lattice::{display_label, LatticeSpec};
use crate::oracle;
use crate::output::{self, write_columns_csv, write_json, write_matrix_csv, write_pgm};
use crate::propagator::SpectralPropagator;
use crate::states::{fock_pair, path_entangled_pair, random_state, TwoPhotonState};

/// Allowed `|½ΣΓ − 1|` before a run is declared numerically broken.
const CLOSURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub two_c_z: f64,
    pub max_gamma: f64,
    pub min_witness: f64,
    pub total_probability: f64,
    /// Display labels of the outer ballistic lobes, when they fit in the lattice.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lobes: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_gamma_classical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_bound_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_classical_witness: Option<f64>,
    /// Largest |MC − closed form| in units of the per-entry standard error,
    /// over entries above 1e-3 of the maximum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_mc_deviation_sigma: Option<f64>,
    /// PGM file name → value mapped to 65535.
    pub pgm_max: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub directory: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

fn input_state(cfg: &RunConfig, sites: (usize, usize), n: usize) -> Result<TwoPhotonState> {
    match cfg.input.kind {
        InputKind::FockPair => fock_pair(sites.0, sites.1, n),
        InputKind::PathEntangled => path_entangled_pair(sites.0, sites.1, cfg.input.phase, n),
    }
}

/// Runs one configured scenario and writes its artifacts into
/// `config.output.directory`.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let resolved = config.resolve()?;
    let spec = &resolved.spec;
    let n = spec.len();
    let (k, l) = resolved.sites;
    let labels: Vec<i64> = (0..n).map(|i| display_label(i, n)).collect();

    let prop = SpectralPropagator::new(spec)?;
    let u = prop.at(resolved.z)?;
    let out_state = input_state(config, resolved.sites, n)?.propagate(&u)?;
    let gamma = gamma_matrix(&out_state);
    let total = gamma.total_probability();
    if (total - 1.0).abs() > CLOSURE_TOL {
        return Err(Error::NumericalContract(format!(
            "two-photon probability sums to {total}"
        )));
    }
    let witness = cs_witness(&gamma);
    let from_k = single_photon_map(&u, k)?;
    let from_l = single_photon_map(&u, l)?;
    let photon_numbers = gamma.row_sums();

    let classical = match resolved.ensemble {
        Some(ens) => {
            let analytic = classical_gamma_analytic(&u, k, l, ens.intensity)?;
            let mc = classical_gamma_mc(&u, k, l, &ens)?;
            let margin = classical_bound_margin(&analytic)?;
            Some((analytic, mc, margin))
        }
        None => None,
    };

    let scan = match &config.scan {
        Some(scan) => {
            let zs = scan.points();
            let rows = zs
                .iter()
                .map(|&z| single_photon_map(&prop.at(z)?, k))
                .collect::<Result<Vec<_>>>()?;
            Some((zs, rows))
        }
        None => None,
    };

    let two_c_z = 2.0 * spec.bonds().iter().cloned().fold(0.0, f64::max) * resolved.z;
    let mut summary = Summary {
        two_c_z,
        max_gamma: gamma.max(),
        min_witness: witness.min(),
        total_probability: total,
        lobes: spec
            .is_uniform()
            .then(|| outer_lobes(&u, k, l).ok())
            .flatten()
            .map(|(a, b)| (display_label(a, n), display_label(b, n))),
        max_gamma_classical: None,
        min_bound_margin: None,
        min_classical_witness: None,
        max_mc_deviation_sigma: None,
        pgm_max: BTreeMap::new(),
    };
    if let Some((analytic, mc, margin)) = &classical {
        summary.max_gamma_classical = Some(analytic.max());
        summary.min_bound_margin = margin.min_applicable();
        summary.min_classical_witness = Some(cs_witness(analytic).min());
        let floor = 1e-3 * analytic.max();
        let mut worst = 0.0f64;
        for (i, (&exact, &est)) in analytic
            .values()
            .iter()
            .zip(mc.gamma.values().iter())
            .enumerate()
        {
            if exact > floor && mc.stderr[i] > 0.0 {
                worst = worst.max((est - exact).abs() / mc.stderr[i]);
            }
        }
        summary.max_mc_deviation_sigma = (mc.samples > 1).then_some(worst);
    }

    let dir = config.output.directory.clone();
    output::create_dir(&dir)?;
    let mut files = Vec::new();
    let formats = &config.output.formats;
    let label = |i: usize| labels[i];

    if formats.contains(&Format::Csv) {
        let path = dir.join("single_photon.csv");
        write_columns_csv(
            &path,
            &[
                "site".to_string(),
                format!("from_{}", label(k)),
                format!("from_{}", label(l)),
                "mean_photon_number".to_string(),
            ],
            &[
                labels.iter().map(|&x| x as f64).collect(),
                from_k.clone(),
                from_l.clone(),
                photon_numbers.clone(),
            ],
        )?;
        files.push(path);

        let path = dir.join("gamma_quantum.csv");
        write_matrix_csv(&path, &labels, |q, r| Some(gamma[(q, r)]))?;
        files.push(path);
        let path = dir.join("witness.csv");
        write_matrix_csv(&path, &labels, |q, r| Some(witness[(q, r)]))?;
        files.push(path);

        if let Some((analytic, mc, margin)) = &classical {
            for (name, m) in [
                ("gamma_classical.csv", mc.gamma.values()),
                ("gamma_classical_stderr.csv", &mc.stderr),
                ("gamma_classical_analytic.csv", analytic.values()),
            ] {
                let path = dir.join(name);
                write_matrix_csv(&path, &labels, |q, r| Some(m[(q, r)]))?;
                files.push(path);
            }
            let path = dir.join("bound_margin.csv");
            write_matrix_csv(&path, &labels, |q, r| margin.get(q, r))?;
            files.push(path);
        }

        if let Some((zs, rows)) = &scan {
            let path = dir.join("single_photon_scan.csv");
            let mut headers = vec!["z".to_string()];
            headers.extend(labels.iter().map(|l| l.to_string()));
            let mut columns = vec![zs.clone()];
            columns.extend((0..n).map(|q| rows.iter().map(|row| row[q]).collect()));
            write_columns_csv(&path, &headers, &columns)?;
            files.push(path);
        }
    }

    if formats.contains(&Format::Pgm) {
        let mut pgm = |name: &str, m: &DMatrix<f64>| -> Result<()> {
            let path = dir.join(name);
            let max = write_pgm(&path, m)?;
            summary.pgm_max.insert(name.to_string(), max);
            files.push(path);
            Ok(())
        };
        pgm("gamma_quantum.pgm", gamma.values())?;
        if let Some((analytic, mc, _)) = &classical {
            pgm("gamma_classical.pgm", mc.gamma.values())?;
            pgm("gamma_classical_analytic.pgm", analytic.values())?;
        }
        if let Some((_, rows)) = &scan {
            let m = DMatrix::from_fn(rows.len(), n, |i, q| rows[i][q]);
            pgm("single_photon_scan.pgm", &m)?;
        }
    }

    if formats.contains(&Format::Json) {
        let path = dir.join("results.json");
        let mut doc = json!({
            "labels": labels,
            "single_photon": { "from_first": from_k, "from_second": from_l },
            "photon_numbers": photon_numbers,
            "gamma_quantum": output::matrix_rows(gamma.values()),
            "witness": output::matrix_rows(&witness),
        });
        if let Some((analytic, mc, margin)) = &classical {
            let margin_rows: Vec<Vec<Option<f64>>> = (0..n)
                .map(|q| (0..n).map(|r| margin.get(q, r)).collect())
                .collect();
            doc["gamma_classical"] = json!(output::matrix_rows(mc.gamma.values()));
            doc["gamma_classical_stderr"] = json!(output::matrix_rows(&mc.stderr));
            doc["gamma_classical_analytic"] = json!(output::matrix_rows(analytic.values()));
            doc["bound_margin"] = json!(margin_rows);
        }
        if let Some((zs, rows)) = &scan {
            doc["single_photon_scan"] = json!({ "z": zs, "distribution": rows });
        }
        write_json(&path, &doc)?;
        files.push(path);
    }

    let manifest = dir.join("manifest.json");
    files.push(manifest.clone());
    let names: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
        .collect();
    write_json(
        &manifest,
        &json!({
            "config": config,
            "versions": {
                "wavecorr": env!("CARGO_PKG_VERSION"),
                "mc_generator": "ChaCha8, stream per 4096-sample chunk",
            },
            "summary": summary,
            "files": names,
        }),
    )?;

    Ok(RunOutcome {
        directory: dir,
        files,
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomPoint {
    pub z: f64,
    /// Γ₀₁(z) from the full state-propagation pipeline.
    pub coincidence: f64,
}

/// Coincidence probability `Γ₀₁(z)` for one photon in each arm of a
/// two-waveguide coupler, on `steps` evenly spaced points in `[0, z_max]`.
pub fn hom_scan(coupling: f64, z_max: f64, steps: usize) -> Result<Vec<HomPoint>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "scan needs at least 2 steps, got {steps}"
        )));
    }
    if !(z_max.is_finite() && z_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "scan length must be positive, got {z_max}"
        )));
    }
    let spec = LatticeSpec::uniform(2, coupling)?;
    let prop = SpectralPropagator::new(&spec)?;
    let input = fock_pair(0, 1, 2)?;
    (0..steps)
        .map(|i| {
            let z = z_max * i as f64 / (steps - 1) as f64;
            hom_point(&prop, &input, z)
        })
        .collect()
}

/// Single point of the coupler scan at an arbitrary distance.
pub fn hom_coincidence(coupling: f64, z: f64) -> Result<f64> {
    let spec = LatticeSpec::uniform(2, coupling)?;
    let prop = SpectralPropagator::new(&spec)?;
    Ok(hom_point(&prop, &fock_pair(0, 1, 2)?, z)?.coincidence)
}

fn hom_point(prop: &SpectralPropagator, input: &TwoPhotonState, z: f64) -> Result<HomPoint> {
    let out = input.propagate(&prop.at(z)?)?;
    Ok(HomPoint {
        z,
        coincidence: gamma_matrix(&out)[(0, 1)],
    })
}

/// Oracle comparisons must agree to this on every Γ entry.
pub const ORACLE_GAMMA_TOL: f64 = 1e-10;
/// Single-photon sector must agree with `conj(U)` to this.
pub const ORACLE_SINGLE_PHOTON_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct OracleTrial {
    pub bonds: Vec<f64>,
    pub z: f64,
    pub max_gamma_deviation: f64,
    pub max_amplitude_deviation: f64,
    pub single_photon_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub seed: u64,
    pub trials: Vec<OracleTrial>,
    pub max_gamma_deviation: f64,
    pub max_single_photon_deviation: f64,
    pub passed: bool,
}

/// Random lattices (bonds in [0, 400) m⁻¹), distances in [0, 1 cm) and
/// random two-photon states, each evolved by both the amplitude-matrix path
/// and the Fock-space oracle.
pub fn oracle_check(n: usize, trials: usize, seed: u64) -> Result<OracleReport> {
    if !(oracle::MIN_SITES..=oracle::MAX_SITES).contains(&n) {
        return Err(Error::OutOfEnvelope(format!(
            "oracle check supports {}..={} waveguides, got {n}",
            oracle::MIN_SITES,
            oracle::MAX_SITES
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::with_capacity(trials);
    for _ in 0..trials {
        let bonds: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.0..400.0)).collect();
        let z = rng.random_range(0.0..0.01);
        let spec = LatticeSpec::new(n, bonds.clone(), 0.0)?;
        let state = random_state(n, &mut rng);
        let u = SpectralPropagator::new(&spec)?.at(z)?;

        let fast = state.propagate(&u)?;
        let slow = oracle::evolve_fock(&state, &spec, z)?;
        let fast_vec = oracle::embed(&fast)?;
        let max_amplitude_deviation = fast_vec
            .amplitudes
            .iter()
            .zip(slow.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let max_gamma_deviation = gamma_matrix(&fast)
            .values()
            .iter()
            .zip(slow.gamma()?.values().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let single = oracle::single_photon_evolution(&spec, z)?;
        let single_photon_deviation = single
            .iter()
            .zip(u.conjugate().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        results.push(OracleTrial {
            bonds,
            z,
            max_gamma_deviation,
            max_amplitude_deviation,
            single_photon_deviation,
        });
    }
    let max_gamma_deviation = results
        .iter()
        .map(|t| t.max_gamma_deviation)
        .fold(0.0, f64::max);
    let max_single_photon_deviation = results
        .iter()
        .map(|t| t.single_photon_deviation)
        .fold(0.0, f64::max);
    Ok(OracleReport {
        n,
        seed,
        trials: results,
        max_gamma_deviation,
        max_single_photon_deviation,
        passed: max_gamma_deviation <= ORACLE_GAMMA_TOL
            && max_single_photon_deviation <= ORACLE_SINGLE_PHOTON_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hom_scan_matches_cosine() {
        let c = 290.0;
        let rows = hom_scan(c, PI / (2.0 * c), 201).unwrap();
        assert_eq!(rows.len(), 201);
        assert_eq!(rows[0].z, 0.0);
        assert!((rows[0].coincidence - 1.0).abs() <= 1e-12);
        assert!(rows[100].coincidence <= 1e-12);
        assert!((rows[200].coincidence - 1.0).abs() <= 1e-10);
        for p in &rows {
            assert!((p.coincidence - (2.0 * c * p.z).cos().powi(2)).abs() <= 1e-10);
        }
    }

    #[test]
    fn hom_scan_rejects_bad_ranges() {
        assert!(hom_scan(1.0, 1.0, 1).is_err());
        assert!(hom_scan(1.0, 0.0, 10).is_err());
        assert!(hom_scan(1.0, f64::NAN, 10).is_err());
        assert!(hom_scan(-1.0, 1.0, 10).is_err());
    }

    #[test]
    fn oracle_check_small() {
        let r = oracle_check(2, 10, 1).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.trials.len(), 10);
        assert!(matches!(oracle_check(9, 1, 1), Err(Error::OutOfEnvelope(_))));
        assert!(oracle_check(1, 1, 1).is_err());
    }

    #[test]
    fn oracle_check_is_seeded() {
        let a = oracle_check(4, 3, 11).unwrap();
        let b = oracle_check(4, 3, 11).unwrap();
        assert_eq!(a.trials[2].bonds, b.trials[2].bonds);
        assert_eq!(a.trials[2].z, b.trials[2].z);
    }
}
