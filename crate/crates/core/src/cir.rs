//! Golay correlator channel estimation and dominant-tap bookkeeping.
//!
//! The receiver correlates the frame against the four modulated composite
//! sequences and combines them pairwise with a 256-chip stagger. Each branch
//! has a correlation peak of exactly 512 at `i_p + tap` and a length-127
//! zero-correlation zone around it, so every resolvable channel tap can be
//! read off without interference from its neighbours:
//!
//! ```text
//! r_ru[i] = (r * gau256~)[i]       + (r * gbu256~)[i + 256]
//! r_rv[i] = (r * gav256~)[i + 512] + (r * gbv256~)[i + 768]   (tap-aligned)
//! h^u[d]  = r_ru[i_p + d] / 512,   h^v[d] = r_rv[i_p + d] / 512
//! h[d]    = (h^u[d] + h^v[d]) / 2
//! ```
//!
//! The branch offsets (256, and 512 for the v alignment) come from the
//! preamble layout, never from constants baked in here. Internally the four
//! correlations are evaluated through the pair's delay/weight cascade after a
//! single pi/2 derotation, which is algebraically identical to the direct-sum
//! definition (a tested equivalence) and about two orders of magnitude
//! faster.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use num_complex::Complex64;
use thiserror::Error;

use crate::golay::DelayWeightCascade;
use crate::preamble::{quarter_turn, Preamble};

#[derive(Debug, Error)]
pub enum CirError {
    #[error("tap index {tap} outside the validity window 0..={window}")]
    TapOutOfWindow { tap: usize, window: usize },
    #[error("frame of {got} samples is shorter than the {need}-sample preamble")]
    FrameTooShort { got: usize, need: usize },
    #[error("csv parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Combined u/v correlator outputs, both indexed so that tap `d` of the
/// channel sits at index `i_p + d`.
#[derive(Debug, Clone)]
pub struct CorrelatorOutput {
    pub r_ru: Vec<Complex64>,
    pub r_rv: Vec<Complex64>,
    /// Peak base index (start of gau256 inside the preamble).
    pub i_p: usize,
}

/// Per-beam estimated taps.
#[derive(Debug, Clone, PartialEq)]
pub struct CirEstimate {
    pub rx_beam_id: u32,
    pub taps: BTreeMap<usize, Complex64>,
}

impl CirEstimate {
    pub fn magnitude(&self, tap: usize) -> f64 {
        self.taps.get(&tap).map_or(0.0, |h| h.norm())
    }

    pub fn max_magnitude(&self) -> f64 {
        self.taps.values().map(|h| h.norm()).fold(0.0, f64::max)
    }
}

/// A dominant path: one tap index, labeled in tap order, with the beams that
/// detected it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominantPathIndex {
    /// 1-based label, ordered by tap index.
    pub kappa: usize,
    pub tap_index: usize,
    pub detected_by: Vec<u32>,
}

/// Correlator configured for one preamble build.
#[derive(Debug, Clone)]
pub struct CirEstimator {
    cascade: DelayWeightCascade,
    i_p: usize,
    v_offset: usize,
    half_len: usize,
    preamble_len: usize,
    peak: f64,
    tap_window: usize,
}

impl CirEstimator {
    pub fn new(preamble: &Preamble) -> Self {
        let half_len = preamble.pair.a.len();
        Self {
            cascade: preamble.cascade.clone(),
            i_p: preamble.layout.peak_base_index(),
            v_offset: preamble.layout.v_branch_offset(),
            half_len,
            preamble_len: preamble.layout.total_len,
            peak: (4 * half_len) as f64,
            tap_window: half_len,
        }
    }

    /// Largest tap index the zero-correlation zone can isolate.
    pub fn tap_window(&self) -> usize {
        self.tap_window
    }

    pub fn peak_base_index(&self) -> usize {
        self.i_p
    }

    /// Correlate a received frame against the modulated composites and fold
    /// the four branches into tap-aligned u and v outputs.
    pub fn correlate_and_combine(&self, r: &[Complex64]) -> Result<CorrelatorOutput, CirError> {
        if r.len() < self.preamble_len {
            return Err(CirError::FrameTooShort { got: r.len(), need: self.preamble_len });
        }
        // One derotation turns every correlation with a modulated composite
        // into a real-reference correlation times a quarter-turn:
        //   (r * x~)[i] = j^i * (r' * x)[i]  with  r'[m] = r[m] * j^-m.
        let derotated: Vec<Complex64> = r
            .iter()
            .enumerate()
            .map(|(m, &v)| v * quarter_turn(m).conj())
            .collect();
        let (ca, cb) = self.cascade.correlate_pair(&derotated);

        // Composite correlations decompose over the two 128-halves:
        //   gau256 = [-gb, -ga], gbu256 = [gb, -ga],
        //   gav256 = [-gb,  ga], gbv256 = [-gb, -ga].
        let half = self.half_len as i64;
        let seg = 2 * self.half_len as i64; // composite length (256)
        let c_gau = |i: i64| -cb.at(i) - ca.at(i + half);
        let c_gbu = |i: i64| cb.at(i) - ca.at(i + half);
        let c_gav = |i: i64| -cb.at(i) + ca.at(i + half);
        let c_gbv = |i: i64| -cb.at(i) - ca.at(i + half);

        let out_len = self.i_p + self.tap_window + 1;
        let v_off = self.v_offset as i64;
        let mut r_ru = Vec::with_capacity(out_len);
        let mut r_rv = Vec::with_capacity(out_len);
        for i in 0..out_len as i64 {
            // All branch offsets are multiples of four chips, so a single
            // j^i factor carries the modulation through the combination.
            let rot = quarter_turn(i as usize);
            r_ru.push(rot * (c_gau(i) + c_gbu(i + seg)));
            r_rv.push(rot * (c_gav(i + v_off) + c_gbv(i + v_off + seg)));
        }
        Ok(CorrelatorOutput { r_ru, r_rv, i_p: self.i_p })
    }

    /// Average the u and v branch estimates at the requested taps.
    pub fn estimate_taps(
        &self,
        out: &CorrelatorOutput,
        tap_indices: &[usize],
        rx_beam_id: u32,
    ) -> Result<CirEstimate, CirError> {
        let mut taps = BTreeMap::new();
        for &d in tap_indices {
            if d > self.tap_window || out.i_p + d >= out.r_ru.len() {
                return Err(CirError::TapOutOfWindow { tap: d, window: self.tap_window });
            }
            let hu = out.r_ru[out.i_p + d] / self.peak;
            let hv = out.r_rv[out.i_p + d] / self.peak;
            taps.insert(d, 0.5 * (hu + hv));
        }
        Ok(CirEstimate { rx_beam_id, taps })
    }

    /// Estimate every tap in the validity window.
    pub fn estimate_window(&self, out: &CorrelatorOutput, rx_beam_id: u32) -> CirEstimate {
        let taps: Vec<usize> = (0..=self.tap_window).collect();
        self.estimate_taps(out, &taps, rx_beam_id).expect("window taps are valid")
    }
}

/// Flag per-beam taps at or above `detect_threshold_rel` of that beam's own
/// maximum, merge the flags across beams by exact tap index, and label the
/// merged taps in tap order.
pub fn detect_and_aggregate(
    estimates: &[CirEstimate],
    detect_threshold_rel: f64,
) -> Vec<DominantPathIndex> {
    let mut merged: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for est in estimates {
        let peak = est.max_magnitude();
        if peak <= 0.0 {
            continue;
        }
        for (&tap, h) in &est.taps {
            if h.norm() >= detect_threshold_rel * peak {
                merged.entry(tap).or_default().push(est.rx_beam_id);
            }
        }
    }
    merged
        .into_iter()
        .enumerate()
        .map(|(k, (tap_index, detected_by))| DominantPathIndex { kappa: k + 1, tap_index, detected_by })
        .collect()
}

/// CSV export of per-beam tap estimates: `rx_beam_id,tap_index,re,im`.
pub fn cir_to_csv(estimates: &[CirEstimate]) -> String {
    let mut out = String::from("rx_beam_id,tap_index,re,im\n");
    for est in estimates {
        for (tap, h) in &est.taps {
            out.push_str(&format!("{},{},{},{}\n", est.rx_beam_id, tap, h.re, h.im));
        }
    }
    out
}

pub fn write_cir_csv(estimates: &[CirEstimate], path: impl AsRef<FsPath>) -> Result<(), CirError> {
    let path = path.as_ref();
    std::fs::write(path, cir_to_csv(estimates)).map_err(|source| CirError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parse the CSV export, grouping rows into per-beam estimates in order of
/// first appearance.
pub fn cir_from_csv(data: &str) -> Result<Vec<CirEstimate>, CirError> {
    let mut lines = data.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "rx_beam_id,tap_index,re,im" => {}
        other => {
            return Err(CirError::Parse {
                line: 1,
                message: format!("expected header rx_beam_id,tap_index,re,im, got {:?}", other.map(|o| o.1)),
            })
        }
    }
    let mut order: Vec<u32> = Vec::new();
    let mut by_beam: BTreeMap<u32, BTreeMap<usize, Complex64>> = BTreeMap::new();
    for (idx, line) in lines {
        let lineno = idx as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(CirError::Parse { line: lineno, message: format!("expected 4 fields, got {}", fields.len()) });
        }
        let parse_err = |what: &str| CirError::Parse { line: lineno, message: format!("bad {what} value") };
        let beam: u32 = fields[0].trim().parse().map_err(|_| parse_err("rx_beam_id"))?;
        let tap: usize = fields[1].trim().parse().map_err(|_| parse_err("tap_index"))?;
        let re: f64 = fields[2].trim().parse().map_err(|_| parse_err("re"))?;
        let im: f64 = fields[3].trim().parse().map_err(|_| parse_err("im"))?;
        if !order.contains(&beam) {
            order.push(beam);
        }
        by_beam.entry(beam).or_default().insert(tap, Complex64::new(re, im));
    }
    Ok(order
        .into_iter()
        .map(|beam| CirEstimate { rx_beam_id: beam, taps: by_beam.remove(&beam).unwrap_or_default() })
        .collect())
}

pub fn read_cir_csv(path: impl AsRef<FsPath>) -> Result<Vec<CirEstimate>, CirError> {
    let path = path.as_ref();
    let data = std::fs::read_to_string(path).map_err(|source| CirError::Io {
        path: path.display().to_string(),
        source,
    })?;
    cir_from_csv(&data)
}
