//! 802.11ad Golay complementary sequences and exact correlation primitives.
//!
//! The control/SC PHY preamble is assembled from a length-128 complementary
//! pair (the standard's `Ga128`/`Gb128`, built by a delay/weight recursion)
//! and the length-256/512 composites derived from it. A complementary pair
//! `(a, b)` satisfies
//!
//! ```text
//! R_a[i] + R_b[i] = 2*len   for i = 0
//!                 = 0       for every other lag in the support
//! ```
//!
//! which is what makes interference-free channel-tap extraction possible.
//! Bipolar correlations are accumulated in integer arithmetic so the property
//! is checked exactly, never within a float tolerance.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GolayError {
    #[error("sequence element at index {index} is {found}, expected +1 or -1")]
    NotBipolar { index: usize, found: i8 },
    #[error("pair halves have different lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("expected a complementary pair of length {expected_len}, got {len}")]
    WrongLength { expected_len: usize, len: usize },
    #[error("pair is not complementary: R_a[{lag}] + R_b[{lag}] = {value}, expected {expected}")]
    NotComplementary { lag: i64, value: i64, expected: i64 },
}

/// A sequence over {+1, -1}.
///
/// The artifact's own Golay sequences have lengths 128, 256, 512 or 1280, but
/// the type itself accepts any positive length (short vectors are useful in
/// tests and for the modulator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipolarSequence {
    values: Vec<i8>,
}

impl BipolarSequence {
    pub fn new(values: Vec<i8>) -> Result<Self, GolayError> {
        for (index, &v) in values.iter().enumerate() {
            if v != 1 && v != -1 {
                return Err(GolayError::NotBipolar { index, found: v });
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Global sign flip.
    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Concatenation of several sequences, in order.
    pub fn concat(parts: &[&BipolarSequence]) -> Self {
        let mut values = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
        for p in parts {
            values.extend_from_slice(&p.values);
        }
        Self { values }
    }

    /// Aperiodic autocorrelation with integer accumulation.
    ///
    /// Returns values for lags `-(n-1) ..= n-1`; lag `i` is at index
    /// `i + n - 1`.
    pub fn autocorrelation(&self) -> Vec<i64> {
        let n = self.values.len();
        let mut out = vec![0i64; 2 * n - 1];
        for (k, slot) in out.iter_mut().enumerate() {
            let lag = k as i64 - (n as i64 - 1);
            let lo = lag.max(0) as usize;
            let hi = ((n as i64 - 1) + lag.min(0)) as usize;
            let mut acc = 0i64;
            for m in lo..=hi {
                acc += i64::from(self.values[m]) * i64::from(self.values[(m as i64 - lag) as usize]);
            }
            *slot = acc;
        }
        out
    }
}

/// A Golay complementary pair of equal-length bipolar sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GolayPair {
    pub a: BipolarSequence,
    pub b: BipolarSequence,
}

impl GolayPair {
    pub fn new(a: BipolarSequence, b: BipolarSequence) -> Result<Self, GolayError> {
        if a.len() != b.len() {
            return Err(GolayError::LengthMismatch { a: a.len(), b: b.len() });
        }
        Ok(Self { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Exact complementarity check: the summed autocorrelations must be
    /// `2*len` at lag 0 and 0 at every other lag.
    pub fn verify(&self) -> Result<(), GolayError> {
        if self.a.len() != self.b.len() {
            return Err(GolayError::LengthMismatch { a: self.a.len(), b: self.b.len() });
        }
        let n = self.a.len() as i64;
        let ra = self.a.autocorrelation();
        let rb = self.b.autocorrelation();
        for (k, (&x, &y)) in ra.iter().zip(rb.iter()).enumerate() {
            let lag = k as i64 - (n - 1);
            let expected = if lag == 0 { 2 * n } else { 0 };
            if x + y != expected {
                return Err(GolayError::NotComplementary { lag, value: x + y, expected });
            }
        }
        Ok(())
    }

    pub fn is_complementary(&self) -> bool {
        self.verify().is_ok()
    }
}

/// Which construction generates the base length-128 pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GolayMode {
    /// The 802.11ad delay/weight recursion (subclause 21.11 vectors).
    Standard,
    /// The classic doubling construction `A' = [A B]`, `B' = [A -B]`; any
    /// valid complementary pair works for all downstream math.
    Doubling,
}

impl Default for GolayMode {
    fn default() -> Self {
        GolayMode::Standard
    }
}

/// Delay/weight cascade description of a Golay pair.
///
/// `A_0 = B_0 = delta`, and per stage `k`:
///
/// ```text
/// A_k(n) = W_k * A_{k-1}(n) + B_{k-1}(n - D_k)
/// B_k(n) = W_k * A_{k-1}(n) - B_{k-1}(n - D_k)
/// ```
///
/// The generated pair is the time reversal of `(A_K, B_K)`, matching the
/// standard's `Ga128(n) = A_7(128 - n)` convention. The same cascade, run as
/// a filter bank over a received sequence, performs both matched correlations
/// in `O(N * stages)` instead of `O(N * len)`; `correlate_pair` uses that.
#[derive(Debug, Clone)]
pub struct DelayWeightCascade {
    delays: Vec<usize>,
    weights: Vec<i8>,
}

impl DelayWeightCascade {
    /// 802.11ad subclause 21.11 parameters for the length-128 pair.
    pub fn standard_128() -> Self {
        Self {
            delays: vec![1, 8, 2, 4, 16, 32, 64],
            weights: vec![-1, -1, -1, -1, 1, -1, -1],
        }
    }

    /// Doubling construction cascade for length `2^stages`.
    pub fn doubling(stages: u32) -> Self {
        Self {
            delays: (0..stages).map(|k| 1usize << k).collect(),
            weights: vec![1; stages as usize],
        }
    }

    pub fn for_mode(mode: GolayMode) -> Self {
        match mode {
            GolayMode::Standard => Self::standard_128(),
            GolayMode::Doubling => Self::doubling(7),
        }
    }

    /// Length of the generated sequences.
    pub fn len(&self) -> usize {
        1 + self.delays.iter().sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The pair generated by this cascade (time-reversed impulse responses).
    pub fn generate_pair(&self) -> GolayPair {
        let len = self.len();
        let mut a = vec![0i64; len];
        let mut b = vec![0i64; len];
        a[0] = 1;
        b[0] = 1;
        let mut support = 1usize;
        for (&d, &w) in self.delays.iter().zip(&self.weights) {
            let w = i64::from(w);
            let mut na = vec![0i64; support + d];
            let mut nb = vec![0i64; support + d];
            for n in 0..support {
                na[n] += w * a[n];
                nb[n] += w * a[n];
                na[n + d] += b[n];
                nb[n + d] -= b[n];
            }
            support += d;
            a[..support].copy_from_slice(&na);
            b[..support].copy_from_slice(&nb);
        }
        debug_assert_eq!(support, len);
        let rev = |v: &[i64]| {
            BipolarSequence::new(v.iter().rev().map(|&x| x as i8).collect())
                .expect("cascade output is bipolar")
        };
        GolayPair { a: rev(&a), b: rev(&b) }
    }

    /// Correlate `x` against both generated sequences at once.
    ///
    /// Returns `(corr_a, corr_b)` where `corr_a.at(i) = sum_m x[i+m] * ga[m]`
    /// over the valid overlap (the references are real, so no conjugation is
    /// involved). Correlating with the time-reversed impulse response is a
    /// convolution with the cascade itself, so this runs the delay/weight
    /// filter bank, one butterfly per stage.
    pub fn correlate_pair(&self, x: &[Complex64]) -> (Correlation, Correlation) {
        let len = self.len();
        let out_len = x.len() + len - 1;
        let mut u: Vec<Complex64> = Vec::with_capacity(out_len);
        u.extend_from_slice(x);
        u.resize(out_len, Complex64::ZERO);
        let mut v = u.clone();
        let mut scratch_u = vec![Complex64::ZERO; out_len];
        let mut scratch_v = vec![Complex64::ZERO; out_len];
        for (&d, &w) in self.delays.iter().zip(&self.weights) {
            let w = f64::from(w);
            for t in 0..out_len {
                let delayed = if t >= d { v[t - d] } else { Complex64::ZERO };
                let scaled = w * u[t];
                scratch_u[t] = scaled + delayed;
                scratch_v[t] = scaled - delayed;
            }
            std::mem::swap(&mut u, &mut scratch_u);
            std::mem::swap(&mut v, &mut scratch_v);
        }
        // conv(x, A_K)[t] corresponds to corr(x, ga)[t - (len-1)].
        let min_lag = -(len as i64 - 1);
        (Correlation { values: u, min_lag }, Correlation { values: v, min_lag })
    }
}

/// The composite sequences the CE field is built from.
///
/// Layout (per the standard's CE field structure):
/// `gau256 = [-gb, -ga]`, `gbu256 = [gb, -ga]`, `gav256 = [-gb, ga]`,
/// `gbv256 = [-gb, -ga]`, with `gu512 = gau256 || gbu256` and
/// `gv512 = gav256 || gbv256`. Both 256 pairs are complementary with peak
/// `2 * 256 = 512`.
#[derive(Debug, Clone)]
pub struct CompositeSequences {
    pub gau256: BipolarSequence,
    pub gbu256: BipolarSequence,
    pub gav256: BipolarSequence,
    pub gbv256: BipolarSequence,
    pub gu512: BipolarSequence,
    pub gv512: BipolarSequence,
}

/// Build the 256/512 composites from a length-128 complementary pair.
///
/// Rejects inputs that are not a complementary pair of length 128.
pub fn build_composites(ga: &BipolarSequence, gb: &BipolarSequence) -> Result<CompositeSequences, GolayError> {
    if ga.len() != 128 {
        return Err(GolayError::WrongLength { expected_len: 128, len: ga.len() });
    }
    let pair = GolayPair::new(ga.clone(), gb.clone())?;
    pair.verify()?;

    let neg_ga = ga.negated();
    let neg_gb = gb.negated();
    let gau256 = BipolarSequence::concat(&[&neg_gb, &neg_ga]);
    let gbu256 = BipolarSequence::concat(&[gb, &neg_ga]);
    let gav256 = BipolarSequence::concat(&[&neg_gb, ga]);
    let gbv256 = BipolarSequence::concat(&[&neg_gb, &neg_ga]);
    let gu512 = BipolarSequence::concat(&[&gau256, &gbu256]);
    let gv512 = BipolarSequence::concat(&[&gav256, &gbv256]);
    Ok(CompositeSequences { gau256, gbu256, gav256, gbv256, gu512, gv512 })
}

/// Generate the 802.11ad length-128 pair (`Ga128`, `Gb128`).
pub fn generate_ga128_gb128() -> GolayPair {
    DelayWeightCascade::standard_128().generate_pair()
}

/// A cross-correlation over its full lag support.
#[derive(Debug, Clone)]
pub struct Correlation {
    values: Vec<Complex64>,
    min_lag: i64,
}

impl Correlation {
    pub fn min_lag(&self) -> i64 {
        self.min_lag
    }

    pub fn max_lag(&self) -> i64 {
        self.min_lag + self.values.len() as i64 - 1
    }

    /// Value at a lag; zero outside the support.
    pub fn at(&self, lag: i64) -> Complex64 {
        let idx = lag - self.min_lag;
        if idx < 0 || idx >= self.values.len() as i64 {
            Complex64::ZERO
        } else {
            self.values[idx as usize]
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Direct-sum cross-correlation `(x * y)[i] = sum_n x[n] * conj(y[n-i])`
/// over the full support `-(len_y - 1) ..= len_x - 1`.
///
/// This is the contract definition; fast paths elsewhere must match it.
pub fn correlate(x: &[Complex64], y: &[Complex64]) -> Correlation {
    assert!(!x.is_empty() && !y.is_empty(), "correlate requires non-empty sequences");
    let n = x.len() as i64;
    let m = y.len() as i64;
    let min_lag = -(m - 1);
    let mut values = Vec::with_capacity((n + m - 1) as usize);
    for i in min_lag..n {
        let n0 = i.max(0);
        let n1 = (m - 1 + i).min(n - 1);
        let mut acc = Complex64::ZERO;
        for k in n0..=n1 {
            acc += x[k as usize] * y[(k - i) as usize].conj();
        }
        values.push(acc);
    }
    Correlation { values, min_lag }
}

/// Convenience: complex view of a bipolar sequence (no modulation).
pub fn to_complex(x: &BipolarSequence) -> Vec<Complex64> {
    x.values().iter().map(|&v| Complex64::new(f64::from(v), 0.0)).collect()
}
