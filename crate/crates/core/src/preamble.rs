//! Control-PHY preamble assembly and pi/2-BPSK constellation mapping.
//!
//! The channel-estimation-relevant part of the preamble is the 1280-chip
//! sequence `[-Ga128, Gu512, Gv512, -Gb128]`, rotated by pi/2 per chip.
//! Transmit and receive filters are assumed to have a flat combined in-band
//! response, so everything is simulated directly on the chip grid; the
//! continuous-time pulse is never materialized.
//!
//! The quarter-turn rotation is applied with exact `{1, j, -1, -j}` factors
//! so that correlation peaks and zero-correlation zones come out bit-exact,
//! not merely within a float tolerance.

use num_complex::Complex64;

use crate::golay::{
    build_composites, BipolarSequence, CompositeSequences, DelayWeightCascade, GolayMode, GolayPair,
};

/// Chip period for control and SC PHY, in seconds.
pub const CHIP_PERIOD_S: f64 = 0.57e-9;

/// Total length of the channel-estimation preamble in chips.
pub const PREAMBLE_LEN: usize = 1280;

/// Complex baseband samples on the chip grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence {
    pub samples: Vec<Complex64>,
    /// Sample period in seconds (`T_c`).
    pub sample_period: f64,
}

impl ComplexSequence {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }
}

/// One named span of the preamble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub name: &'static str,
    pub start: usize,
    pub len: usize,
}

/// Where each field sits inside the 1280-chip preamble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreambleLayout {
    pub segments: Vec<Segment>,
    pub total_len: usize,
}

impl PreambleLayout {
    fn standard() -> Self {
        let segments = vec![
            Segment { name: "-ga128", start: 0, len: 128 },
            Segment { name: "gu512", start: 128, len: 512 },
            Segment { name: "gv512", start: 640, len: 512 },
            Segment { name: "-gb128", start: 1152, len: 128 },
        ];
        Self { segments, total_len: PREAMBLE_LEN }
    }

    fn segment(&self, name: &str) -> &Segment {
        self.segments
            .iter()
            .find(|s| s.name == name)
            .unwrap_or_else(|| panic!("unknown preamble segment {name}"))
    }

    /// Index where `gau256` starts inside the preamble; this is the
    /// correlator peak base index `i_p` (128 for the standard layout).
    pub fn peak_base_index(&self) -> usize {
        self.segment("gu512").start
    }

    /// Offset of `gav256` relative to `gau256`; the v-branch correlator uses
    /// this to bring both tap estimates into the same coordinates.
    pub fn v_branch_offset(&self) -> usize {
        self.segment("gv512").start - self.segment("gu512").start
    }
}

/// The assembled preamble plus everything the receiver needs to match it.
#[derive(Debug, Clone)]
pub struct Preamble {
    /// The pi/2-BPSK modulated transmit sequence (unit-magnitude chips).
    pub sequence: ComplexSequence,
    pub layout: PreambleLayout,
    pub composites: CompositeSequences,
    pub pair: GolayPair,
    pub cascade: DelayWeightCascade,
    pub mode: GolayMode,
}

/// Exact value of `exp(j * pi * k / 2)`.
#[inline]
pub fn quarter_turn(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// pi/2-BPSK: `out[n] = x[n] * exp(j * pi * (n + phase_offset_index) / 2)`.
pub fn modulate_pi2bpsk(x: &BipolarSequence, phase_offset_index: usize) -> Vec<Complex64> {
    x.values()
        .iter()
        .enumerate()
        .map(|(n, &v)| f64::from(v) * quarter_turn(n + phase_offset_index))
        .collect()
}

/// Inverse rotation; recovers the bipolar symbols from a modulated sequence.
pub fn demodulate_pi2bpsk(x: &[Complex64], phase_offset_index: usize) -> Vec<Complex64> {
    x.iter()
        .enumerate()
        .map(|(n, &v)| v * quarter_turn(n + phase_offset_index).conj())
        .collect()
}

/// Build the 1280-chip control-PHY preamble with the standard Golay vectors.
pub fn build_preamble() -> Preamble {
    build_preamble_with_mode(GolayMode::Standard)
}

/// Build the preamble from either base-pair construction.
///
/// The rotation index runs continuously across the whole 1280 chips (it does
/// not reset at field boundaries); every field starts at a multiple of four
/// chips, so the correlator peak phases come out exactly real either way.
pub fn build_preamble_with_mode(mode: GolayMode) -> Preamble {
    let cascade = DelayWeightCascade::for_mode(mode);
    let pair = cascade.generate_pair();
    let composites = build_composites(&pair.a, &pair.b).expect("generated pair is complementary");
    let layout = PreambleLayout::standard();

    let chips = BipolarSequence::concat(&[
        &pair.a.negated(),
        &composites.gu512,
        &composites.gv512,
        &pair.b.negated(),
    ]);
    debug_assert_eq!(chips.len(), layout.total_len);
    let samples = modulate_pi2bpsk(&chips, 0);
    Preamble {
        sequence: ComplexSequence { samples, sample_period: CHIP_PERIOD_S },
        layout,
        composites,
        pair,
        cascade,
        mode,
    }
}
