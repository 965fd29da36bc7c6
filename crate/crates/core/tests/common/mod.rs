//! Shared helpers for the integration suites: scenario fixtures, experiment
//! config builders, and the brute-force score oracle the estimator is
//! checked against.

use std::io::Write as _;
use std::path::PathBuf;

use beamsweep_core::aoa::MeasurementSet;
use beamsweep_core::beams::AngleGrid;
use beamsweep_core::harness::{CodebookSource, ExperimentConfig, Scheme};
use beamsweep_core::propagation::{ClusterConfig, Scenario};
use num_complex::Complex64;

pub fn write_scenario(sc: &Scenario) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(sc.to_json_string().as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

/// The experiment shape shared by the Monte Carlo criteria: paper scenario,
/// synthetic 32-beam quantized codebook, 200 trials, default cluster blur.
pub fn monte_carlo_config(scenario_path: PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        scenario_path,
        codebook: CodebookSource::Synth { n_elements: 8, phase_bits: 2, n_beams: 32, seed: 2 },
        tx_power_dbm: 25.0,
        noise_power_dbm: vec![-40.0],
        n_trials: 200,
        xi_deg: 2.0,
        nu: 0.1,
        epsilon: 0.3,
        mu_list: vec![0.1, 0.3, 0.5],
        beams_used: vec![32],
        schemes: vec![Scheme::VaeCir],
        seed: 20260810,
        cluster: ClusterConfig::default(),
        detect_threshold_rel: 0.1,
        golay_mode: Default::default(),
        confidence_best_two: false,
    }
}

/// One pass/fail line per criterion; panics on failure so the suite reports
/// it.
pub fn criterion(label: &str, ok: bool, details: &str) {
    println!("{label}: {} - {details}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{label} failed: {details}");
}

/// Brute-force score oracle: enumerate every unordered measurement pair,
/// orient by magnitude (earlier sweep position on ties), gate both members
/// at `nu * max |h|`, and accumulate the ratio mismatch per direction.
/// Written against the definitions, independently of the sequential
/// implementation.
pub fn oracle_scores(
    meas: &MeasurementSet,
    grid: &AngleGrid,
    nu: f64,
    mask: Option<&[bool]>,
) -> (Vec<f64>, bool) {
    let mags: Vec<f64> = meas.h_hat.iter().map(|(_, h)| h.norm()).collect();
    let gains: Vec<Vec<f64>> = meas
        .h_hat
        .iter()
        .map(|&(beam_id, _)| {
            let beam = meas.codebook.beam(beam_id).unwrap();
            grid.angles()
                .iter()
                .map(|&t| {
                    beamsweep_core::beams::gain_at(beam, &meas.codebook.grid, t)
                        .unwrap()
                        .norm()
                })
                .collect()
        })
        .collect();
    let h_max = mags.iter().copied().fold(0.0f64, f64::max);
    let gate = nu * h_max;
    let l_total = mags.len();
    let mut scores = vec![0.0f64; grid.len()];
    let mut any = false;
    for i in 0..l_total {
        for j in (i + 1)..l_total {
            let (hi, lo) = if mags[i] > mags[j] || (mags[i] == mags[j] && i < j) { (i, j) } else { (j, i) };
            if mags[hi] < gate || mags[lo] < gate || mags[lo] == 0.0 {
                continue;
            }
            any = true;
            let ratio_h = mags[hi] / mags[lo];
            for (t, slot) in scores.iter_mut().enumerate() {
                if let Some(m) = mask {
                    if !m[t] {
                        continue;
                    }
                }
                if gains[lo][t] == 0.0 {
                    continue;
                }
                *slot += (ratio_h - gains[hi][t] / gains[lo][t]).abs();
            }
        }
    }
    (scores, any)
}

/// Random complex with magnitude in [0, scale].
pub fn random_complex(rng: &mut impl rand::Rng, scale: f64) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.0..scale), rng.random_range(0.0..std::f64::consts::TAU))
}
