//! Signal-level simulator and estimation toolkit for 60 GHz beam-swept
//! angle-of-arrival inference.
//!
//! The pipeline, end to end:
//!
//! 1. [`golay`] / [`preamble`] — the 802.11ad control-PHY channel-estimation
//!    preamble built from Golay complementary sequences, pi/2-BPSK modulated.
//! 2. [`beams`] — directional gain patterns: measured-pattern CSV ingestion
//!    and quantized-phase synthetic codebooks, normalized to a common peak
//!    power gain.
//! 3. [`propagation`] — image-method ray tracing (first/second-order
//!    reflections) in a 2D room, optional intra-cluster blurring, and the
//!    beam-weighted multipath channel plus additive Gaussian noise.
//! 4. [`cir`] — Golay correlator channel estimation with its length-127
//!    zero-correlation zone, per-beam tap extraction, and dominant-path
//!    detection.
//! 5. [`aoa`] — the variation-based estimator (`vae_cir`), its confidence
//!    criterion, and the two published score-based baselines.
//! 6. [`harness`] — seeded Monte Carlo experiments over scenarios, codebooks,
//!    noise levels and beam budgets, with CSV/JSON outputs.

pub mod aoa;
pub mod beams;
pub mod cir;
pub mod golay;
pub mod harness;
pub mod preamble;
pub mod propagation;

pub use aoa::{check_confidence, hp_baseline, rice_baseline, vae_cir, EstimationResult, MeasurementSet, WeightPolicy};
pub use beams::{load_codebook, quasi_omni, save_codebook, synth_codebook, AngleGrid, BeamPattern, Codebook};
pub use cir::{detect_and_aggregate, CirEstimate, CirEstimator, CorrelatorOutput, DominantPathIndex};
pub use golay::{build_composites, correlate, generate_ga128_gb128, BipolarSequence, GolayMode, GolayPair};
pub use preamble::{build_preamble, build_preamble_with_mode, modulate_pi2bpsk, ComplexSequence, Preamble, CHIP_PERIOD_S};
pub use propagation::{apply_channel, blur_clusters, trace_paths, ClusterConfig, Path, PathSet, ReceivedFrame, Scenario};
