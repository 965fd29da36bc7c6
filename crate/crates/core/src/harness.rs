//! Seeded Monte Carlo experiments over scenarios, codebooks, noise levels
//! and beam budgets.
//!
//! One experiment fixes a scenario and codebook, then for every
//! `(noise, beams_used)` cell runs `n_trials` independent trials. Geometry
//! is traced once; each trial redraws the cluster blur and the per-beam
//! noise. Reference dominant paths (the ground truth the schemes are scored
//! against) are identified once per scenario from a noiseless, unblurred
//! sweep of the full codebook; a trial that fails to detect a reference tap
//! scores that path as incorrect rather than dropping it.
//!
//! Every random draw is keyed by `(master seed, cell, trial, stream)`, so
//! results are byte-identical regardless of worker count or scheduling.

use std::collections::BTreeMap;
use std::path::{Path as FsPath, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::aoa::{
    check_confidence_best_two, hp_baseline, rice_baseline, vae_cir, AoaError, MeasurementSet, WeightPolicy,
};
use crate::beams::{load_codebook, quasi_omni, synth_codebook, AngleGrid, BeamError, Codebook};
use crate::cir::{detect_and_aggregate, CirError, CirEstimate, CirEstimator};
use crate::golay::GolayMode;
use crate::preamble::{build_preamble_with_mode, Preamble};
use crate::propagation::{
    apply_channel, blur_clusters, trace_paths, ClusterConfig, GeometryError, Obstacle, PathSet, Scenario,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Beam(#[from] BeamError),
    #[error(transparent)]
    Cir(#[from] CirError),
    #[error(transparent)]
    Aoa(#[from] AoaError),
}

impl HarnessError {
    /// CLI exit code: 1 for configuration problems, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Io { .. } => 1,
            HarnessError::Geometry(_) => 1,
            HarnessError::Beam(BeamError::Io { .. } | BeamError::Parse { .. } | BeamError::Coverage { .. }) => 1,
            _ => 2,
        }
    }
}

// ---- configuration -----------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    VaeCir,
    Rice,
    Hp,
}

/// Codebook source: a measured-pattern file or synthesis parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookSource {
    File(PathBuf),
    Synth { n_elements: usize, phase_bits: u32, n_beams: usize, seed: u64 },
}

fn num_or_list<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn int_or_list<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn default_tx_power() -> f64 {
    25.0
}
fn default_xi() -> f64 {
    2.0
}
fn default_nu() -> f64 {
    0.1
}
fn default_epsilon() -> f64 {
    0.3
}
fn default_mu_list() -> Vec<f64> {
    vec![0.1, 0.3, 0.5]
}
fn default_schemes() -> Vec<Scheme> {
    vec![Scheme::VaeCir, Scheme::Rice, Scheme::Hp]
}
fn default_detect() -> f64 {
    0.1
}

/// Experiment description; the JSON config file mirrors these field names.
/// Scalar `noise_power_dbm`/`beams_used` values are accepted and normalized
/// to single-element sweeps.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario_path: PathBuf,
    pub codebook: CodebookSource,
    #[serde(default = "default_tx_power")]
    pub tx_power_dbm: f64,
    #[serde(deserialize_with = "num_or_list")]
    pub noise_power_dbm: Vec<f64>,
    pub n_trials: usize,
    #[serde(default = "default_xi")]
    pub xi_deg: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_mu_list")]
    pub mu_list: Vec<f64>,
    #[serde(deserialize_with = "int_or_list")]
    pub beams_used: Vec<usize>,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    pub seed: u64,
    #[serde(default)]
    pub cluster: ClusterConfig,
    #[serde(default = "default_detect")]
    pub detect_threshold_rel: f64,
    #[serde(default)]
    pub golay_mode: GolayMode,
    #[serde(default)]
    pub confidence_best_two: bool,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_file(path: impl AsRef<FsPath>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let data = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&data).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |msg: String| Err(HarnessError::Config(msg));
        if self.n_trials < 1 {
            return err("n_trials must be >= 1".into());
        }
        if !(self.xi_deg > 0.0) {
            return err("xi_deg must be > 0".into());
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return err(format!("nu {} must be in [0, 1]", self.nu));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return err(format!("epsilon {} must be in [0, 1]", self.epsilon));
        }
        if self.noise_power_dbm.is_empty() {
            return err("noise_power_dbm must list at least one level".into());
        }
        if self.beams_used.is_empty() {
            return err("beams_used must list at least one count".into());
        }
        if self.schemes.is_empty() {
            return err("schemes must not be empty".into());
        }
        let min_beams = if self.schemes.contains(&Scheme::Hp) { 5 } else { 2 };
        if let Some(&bad) = self.beams_used.iter().find(|&&b| b < min_beams) {
            return err(format!("beams_used {bad} is below the minimum {min_beams} for the configured schemes"));
        }
        if self.schemes.contains(&Scheme::Rice) && self.mu_list.is_empty() {
            return err("mu_list must not be empty when the rice scheme is configured".into());
        }
        Ok(())
    }
}

// ---- records and summaries ------------------------------------------------------

/// One scheme's verdict on one path in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_id: usize,
    pub path_kappa: usize,
    pub true_aoa_deg: f64,
    /// NaN when the trial failed to detect the reference tap.
    pub theta_hat_deg: f64,
    pub scheme: String,
    pub correct: bool,
    pub confident: bool,
    pub noise_dbm: f64,
    pub beams_used: usize,
}

/// Aggregate over one `(scheme, noise, beams_used, path)` group.
///
/// `p_f` is the fraction of *inaccurate* estimates the confidence criterion
/// wrongly accepted; `p_d` the fraction of *accurate* estimates it accepted.
/// Either is `None` when its denominator group is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scheme: String,
    pub noise_dbm: f64,
    pub beams_used: usize,
    pub path_kappa: usize,
    pub n_trials: usize,
    pub p_correct: f64,
    pub p_f: Option<f64>,
    pub p_d: Option<f64>,
}

/// Mix an arbitrary key path into one RNG seed (splitmix64 chain).
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut state = 0x243F6A8885A308D3u64; // arbitrary nonzero init
    for &p in parts {
        state ^= p.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        state = z ^ (z >> 31);
    }
    state
}

/// Evenly spaced, nested beam subsample: `floor(i * total / used)`.
fn beam_subset(total: usize, used: usize) -> Vec<usize> {
    (0..used).map(|i| i * total / used).collect()
}

/// The order the selected beams are swept in: a deterministic shuffle drawn
/// per trial. Real devices sweep their sectors in an irregular order, not
/// sorted by steering angle; an angle-sorted sweep would pin the confidence
/// criterion's "last two measurements" to the two most extreme beams of
/// every sweep.
fn sweep_order(subset: &[usize], seed: u64) -> Vec<usize> {
    use rand::Rng as _;
    use rand::SeedableRng as _;
    let mut v = subset.to_vec();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    for i in (1..v.len()).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
    v
}

/// A reference dominant path: the ground truth one trial scheme run is
/// scored against.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath {
    pub kappa: usize,
    pub tap_index: usize,
    pub true_aoa_deg: f64,
    /// Strongest reference-sweep magnitude; identifies weak paths.
    pub strength: f64,
}

/// Prepared experiment: config plus everything derived once per scenario.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub scenario: Scenario,
    pub codebook: Codebook,
    pub grid: AngleGrid,
    pub preamble: Preamble,
    pub estimator: CirEstimator,
    pub base_paths: PathSet,
    pub reference: Vec<ReferencePath>,
}

impl Experiment {
    pub fn prepare(config: ExperimentConfig) -> Result<Self, HarnessError> {
        config.validate()?;
        let grid = AngleGrid::default_grid();
        let scenario_text =
            std::fs::read_to_string(&config.scenario_path).map_err(|source| HarnessError::Io {
                path: config.scenario_path.display().to_string(),
                source,
            })?;
        let scenario = Scenario::from_json_str(&scenario_text)?;
        let codebook = match &config.codebook {
            CodebookSource::File(path) => load_codebook(path, &grid)?,
            CodebookSource::Synth { n_elements, phase_bits, n_beams, seed } => {
                synth_codebook(*n_elements, *phase_bits, *n_beams, &grid, *seed)
            }
        };
        if let Some(&bad) = config.beams_used.iter().find(|&&b| b > codebook.n_beams()) {
            return Err(HarnessError::Config(format!(
                "beams_used {bad} exceeds the {}-beam codebook",
                codebook.n_beams()
            )));
        }
        let preamble = build_preamble_with_mode(config.golay_mode);
        let estimator = CirEstimator::new(&preamble);
        // Arrivals behind the array are invisible to the patterns.
        let base_paths = trace_paths(&scenario)?.restrict_to_grid(&grid);

        let reference = reference_paths(
            &base_paths,
            &codebook,
            &grid,
            &preamble,
            &estimator,
            config.tx_power_dbm,
            config.detect_threshold_rel,
        )?;
        Ok(Self { config, scenario, codebook, grid, preamble, estimator, base_paths, reference })
    }

    /// Run every `(noise, beams_used)` cell for `n_trials` seeded trials.
    pub fn run(&self) -> Result<(Vec<TrialRecord>, Vec<SummaryRow>), HarnessError> {
        let cfg = &self.config;
        let mut jobs: Vec<(usize, f64, usize, usize)> = Vec::new();
        let mut cell = 0usize;
        for &noise in &cfg.noise_power_dbm {
            for &beams in &cfg.beams_used {
                for trial in 0..cfg.n_trials {
                    jobs.push((cell, noise, beams, trial));
                }
                cell += 1;
            }
        }
        let per_trial: Vec<Vec<TrialRecord>> = jobs
            .par_iter()
            .map(|&(cell_idx, noise, beams, trial)| self.run_trial(cell_idx, noise, beams, trial))
            .collect();
        let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
        let summaries = summarize(cfg, &records);
        Ok((records, summaries))
    }

    fn run_trial(&self, cell_idx: usize, noise_dbm: f64, beams_used: usize, trial: usize) -> Vec<TrialRecord> {
        let cfg = &self.config;
        let trial_key = derive_seed(&[cfg.seed, cell_idx as u64, trial as u64]);
        let blurred = blur_clusters(&self.base_paths, &cfg.cluster, derive_seed(&[trial_key, 1]))
            .restrict_to_grid(&self.grid);
        let omni = quasi_omni(&self.grid);

        let subset = sweep_order(
            &beam_subset(self.codebook.n_beams(), beams_used),
            derive_seed(&[trial_key, 3]),
        );
        let mut estimates: Vec<CirEstimate> = Vec::with_capacity(subset.len());
        for (pos, &beam_idx) in subset.iter().enumerate() {
            let beam = &self.codebook.beams[beam_idx];
            let frame = apply_channel(
                &blurred,
                &omni,
                beam,
                &self.grid,
                &self.preamble.sequence,
                cfg.tx_power_dbm,
                noise_dbm,
                derive_seed(&[trial_key, 2, pos as u64]),
            )
            .expect("trial paths are grid-restricted");
            let out = self
                .estimator
                .correlate_and_combine(&frame.samples.samples)
                .expect("frames cover the preamble");
            estimates.push(self.estimator.estimate_window(&out, beam.beam_id));
        }

        let detected: std::collections::BTreeSet<usize> =
            detect_and_aggregate(&estimates, cfg.detect_threshold_rel)
                .into_iter()
                .map(|d| d.tap_index)
                .collect();

        let mut records = Vec::new();
        let mut push = |kappa: usize, true_aoa: f64, scheme: String, theta: f64, confident: bool| {
            let correct = (theta - true_aoa).abs() <= cfg.xi_deg;
            records.push(TrialRecord {
                trial_id: trial,
                path_kappa: kappa,
                true_aoa_deg: true_aoa,
                theta_hat_deg: theta,
                scheme,
                correct,
                confident,
                noise_dbm,
                beams_used,
            });
        };

        for rp in &self.reference {
            let measured = detected.contains(&rp.tap_index);
            let meas = measured.then(|| {
                let h_hat = estimates
                    .iter()
                    .map(|e| (e.rx_beam_id, e.taps[&rp.tap_index]))
                    .collect();
                MeasurementSet::new(rp.kappa, h_hat, &self.codebook).expect("beams come from the codebook")
            });
            for scheme in &cfg.schemes {
                match scheme {
                    Scheme::VaeCir => {
                        let label = "vae_cir".to_string();
                        match &meas {
                            None => push(rp.kappa, rp.true_aoa_deg, label, f64::NAN, false),
                            Some(m) => {
                                let policy = WeightPolicy::with_nu(cfg.nu);
                                let r = vae_cir(m, &self.grid, &policy, cfg.epsilon)
                                    .expect("beams_used >= 2 is validated");
                                let confident = if cfg.confidence_best_two {
                                    check_confidence_best_two(m, r.theta_hat_deg, cfg.epsilon)
                                        .expect("L >= 2")
                                } else {
                                    r.confident
                                };
                                push(rp.kappa, rp.true_aoa_deg, label, r.theta_hat_deg, confident);
                            }
                        }
                    }
                    Scheme::Rice => {
                        for &mu in &cfg.mu_list {
                            let label = format!("rice_mu{mu:.2}");
                            match &meas {
                                None => push(rp.kappa, rp.true_aoa_deg, label, f64::NAN, false),
                                Some(m) => {
                                    let r = rice_baseline(m, &self.grid, mu, cfg.epsilon)
                                        .expect("beams_used >= 1 is validated");
                                    push(rp.kappa, rp.true_aoa_deg, label, r.theta_hat_deg, r.confident);
                                }
                            }
                        }
                    }
                    Scheme::Hp => {
                        let label = "hp".to_string();
                        match &meas {
                            None => push(rp.kappa, rp.true_aoa_deg, label, f64::NAN, false),
                            Some(m) => {
                                let r = hp_baseline(m, &self.grid, cfg.epsilon)
                                    .expect("beams_used >= 5 is validated for hp");
                                push(rp.kappa, rp.true_aoa_deg, label, r.theta_hat_deg, r.confident);
                            }
                        }
                    }
                }
            }
        }
        records
    }
}

/// Identify the reference dominant paths from a noiseless, unblurred sweep
/// of the full codebook. Each detected tap's ground-truth AOA is the AOA of
/// the strongest geometric path landing in that tap.
fn reference_paths(
    base_paths: &PathSet,
    codebook: &Codebook,
    grid: &AngleGrid,
    preamble: &Preamble,
    estimator: &CirEstimator,
    tx_power_dbm: f64,
    detect_threshold_rel: f64,
) -> Result<Vec<ReferencePath>, HarnessError> {
    if base_paths.paths.is_empty() {
        return Ok(Vec::new());
    }
    let omni = quasi_omni(grid);
    let mut estimates = Vec::with_capacity(codebook.n_beams());
    for beam in &codebook.beams {
        let frame = apply_channel(
            base_paths,
            &omni,
            beam,
            grid,
            &preamble.sequence,
            tx_power_dbm,
            f64::NEG_INFINITY,
            0,
        )?;
        let out = estimator.correlate_and_combine(&frame.samples.samples)?;
        estimates.push(estimator.estimate_window(&out, beam.beam_id));
    }
    let dominant = detect_and_aggregate(&estimates, detect_threshold_rel);
    Ok(dominant
        .into_iter()
        .filter_map(|d| {
            let truth = base_paths
                .paths
                .iter()
                .filter(|p| p.tap_index() == d.tap_index)
                .max_by(|a, b| a.alpha.norm().partial_cmp(&b.alpha.norm()).unwrap())?;
            let strength = estimates
                .iter()
                .map(|e| e.magnitude(d.tap_index))
                .fold(0.0, f64::max);
            Some(ReferencePath {
                kappa: d.kappa,
                tap_index: d.tap_index,
                true_aoa_deg: truth.aoa_deg,
                strength,
            })
        })
        .collect())
}

/// Group records by `(scheme, noise, beams_used, path)` in configuration
/// order and compute the accuracy and criterion rates.
pub fn summarize(config: &ExperimentConfig, records: &[TrialRecord]) -> Vec<SummaryRow> {
    #[derive(Default)]
    struct Acc {
        n: usize,
        correct: usize,
        confident_correct: usize,
        incorrect: usize,
        confident_incorrect: usize,
    }
    let noise_idx =
        |v: f64| config.noise_power_dbm.iter().position(|&n| n == v).unwrap_or(usize::MAX);
    let beams_idx = |v: usize| config.beams_used.iter().position(|&b| b == v).unwrap_or(usize::MAX);
    let mut groups: BTreeMap<(String, usize, usize, usize), Acc> = BTreeMap::new();
    for r in records {
        let key = (r.scheme.clone(), noise_idx(r.noise_dbm), beams_idx(r.beams_used), r.path_kappa);
        let acc = groups.entry(key).or_default();
        acc.n += 1;
        if r.correct {
            acc.correct += 1;
            if r.confident {
                acc.confident_correct += 1;
            }
        } else {
            acc.incorrect += 1;
            if r.confident {
                acc.confident_incorrect += 1;
            }
        }
    }
    groups
        .into_iter()
        .map(|((scheme, ni, bi, kappa), acc)| SummaryRow {
            scheme,
            noise_dbm: config.noise_power_dbm[ni],
            beams_used: config.beams_used[bi],
            path_kappa: kappa,
            n_trials: acc.n,
            p_correct: acc.correct as f64 / acc.n as f64,
            p_f: (acc.incorrect > 0).then(|| acc.confident_incorrect as f64 / acc.incorrect as f64),
            p_d: (acc.correct > 0).then(|| acc.confident_correct as f64 / acc.correct as f64),
        })
        .collect()
}

/// Prepare and run in one step.
pub fn run_experiment(config: ExperimentConfig) -> Result<(Vec<TrialRecord>, Vec<SummaryRow>), HarnessError> {
    Experiment::prepare(config)?.run()
}

// ---- output files -----------------------------------------------------------

pub fn trials_to_csv(records: &[TrialRecord]) -> String {
    let mut out =
        String::from("trial_id,path_kappa,true_aoa_deg,theta_hat_deg,scheme,correct,confident,noise_dbm,beams_used\n");
    for r in records {
        let theta = if r.theta_hat_deg.is_nan() { "NaN".to_string() } else { format!("{:.6}", r.theta_hat_deg) };
        out.push_str(&format!(
            "{},{},{:.6},{},{},{},{},{},{}\n",
            r.trial_id, r.path_kappa, r.true_aoa_deg, theta, r.scheme, r.correct, r.confident, r.noise_dbm, r.beams_used
        ));
    }
    out
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("scheme,noise_dbm,beams_used,path_kappa,n_trials,p_correct,p_f,p_d\n");
    for r in rows {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{},{}\n",
            r.scheme,
            r.noise_dbm,
            r.beams_used,
            r.path_kappa,
            r.n_trials,
            r.p_correct,
            opt(r.p_f),
            opt(r.p_d)
        ));
    }
    out
}

/// Write `trials.csv`, `summary.csv`, `summary.json` and `config.echo.json`.
pub fn write_outputs(
    out_dir: impl AsRef<FsPath>,
    config: &ExperimentConfig,
    records: &[TrialRecord],
    summaries: &[SummaryRow],
) -> Result<(), HarnessError> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let write = |name: &str, data: String| -> Result<(), HarnessError> {
        let path = dir.join(name);
        std::fs::write(&path, data).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    write("trials.csv", trials_to_csv(records))?;
    write("summary.csv", summary_to_csv(summaries))?;
    write(
        "summary.json",
        serde_json::to_string_pretty(summaries).expect("summaries serialize") + "\n",
    )?;
    write(
        "config.echo.json",
        serde_json::to_string_pretty(config).expect("config serializes") + "\n",
    )?;
    Ok(())
}

// ---- paper scenarios -----------------------------------------------------------

fn facing_deg(from: (f64, f64), to: (f64, f64)) -> f64 {
    (to.1 - from.1).atan2(to.0 - from.0).to_degrees()
}

/// The two published evaluation scenarios, transcribed from their captions:
/// a 4x3 m room, three objects each, wall dielectric 2, arrays facing each
/// other.
pub fn transcribe_paper_scenarios() -> (Scenario, Scenario) {
    let obj = |v: [f64; 6]| Obstacle::from(v);
    let tx_a = (-2.0, 0.0);
    let rx_a = (2.0, 0.0);
    let a = Scenario {
        room: (4.0, 3.0),
        objects: vec![
            obj([0.1, 1.0, 0.4, 0.2, 0.0, 3.24]),
            obj([-0.4, -1.0, 0.6, 0.2, 180.0, 3.24]),
            obj([0.0, 1.45, 0.6, 0.1, 0.0, 3.24]),
        ],
        tx: tx_a,
        rx: rx_a,
        tx_boresight_deg: facing_deg(tx_a, rx_a),
        rx_boresight_deg: facing_deg(rx_a, tx_a),
        wall_dielectric: 2.0,
    };
    let tx_b = (-0.6, 1.4);
    let rx_b = (0.6, -1.4);
    let b = Scenario {
        room: (4.0, 3.0),
        objects: vec![
            obj([1.8, -0.2, 0.2, 0.6, 0.0, 3.24]),
            obj([-2.0, -0.5, 0.2, 0.5, 180.0, 3.24]),
            obj([-1.2, 0.8, 0.4, 0.4, 45.0, 3.24]),
        ],
        tx: tx_b,
        rx: rx_b,
        tx_boresight_deg: facing_deg(tx_b, rx_b),
        rx_boresight_deg: facing_deg(rx_b, tx_b),
        wall_dielectric: 2.0,
    };
    (a, b)
}
