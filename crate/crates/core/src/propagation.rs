//! Indoor multipath generation and the beam-weighted received signal.
//!
//! Geometry is a 2D room with rectangular objects that both block and
//! reflect. Propagation paths are found with the image method: the
//! line-of-sight path plus every unblocked first- and second-order specular
//! reflection off walls and object faces. Reflection losses use the Fresnel
//! coefficient for perpendicular polarization at the geometric incidence
//! angle with the surface's dielectric constant.
//!
//! Traced paths can be blurred into clusters (exponential excess delays,
//! Laplacian angular offsets, power-conserving amplitudes) to mimic the
//! intra-cluster structure of measured 60 GHz channels. Those blur defaults
//! are configurable stand-ins, not measured values.
//!
//! `apply_channel` places each path on the chip grid with a ceiling tap
//! index, weights it by the transmit and receive beam gains along its
//! departure/arrival angles, scales by the transmit amplitude, and adds
//! circular complex Gaussian noise of a configured power.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beams::{gain_at, AngleGrid, BeamError, BeamPattern};
use crate::preamble::{ComplexSequence, CHIP_PERIOD_S};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// 802.11ad channel 2 center frequency.
pub const CARRIER_HZ: f64 = 60.48e9;
pub const BANDWIDTH_HZ: f64 = 1.76e9;

const EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("{endpoint} at ({x}, {y}) lies inside object {object}")]
    EndpointInsideObject { endpoint: &'static str, x: f64, y: f64, object: usize },
    #[error("{endpoint} at ({x}, {y}) lies outside the room")]
    EndpointOutsideRoom { endpoint: &'static str, x: f64, y: f64 },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

// ---- scenario ---------------------------------------------------------------

/// A rectangular obstacle, serialized as the six-element tuple
/// `(x, y, length, width, orientation_deg, dielectric)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 6]", into = "[f64; 6]")]
pub struct Obstacle {
    pub x: f64,
    pub y: f64,
    pub length: f64,
    pub width: f64,
    pub orientation_deg: f64,
    pub dielectric: f64,
}

impl From<[f64; 6]> for Obstacle {
    fn from(v: [f64; 6]) -> Self {
        Self { x: v[0], y: v[1], length: v[2], width: v[3], orientation_deg: v[4], dielectric: v[5] }
    }
}

impl From<Obstacle> for [f64; 6] {
    fn from(o: Obstacle) -> Self {
        [o.x, o.y, o.length, o.width, o.orientation_deg, o.dielectric]
    }
}

/// Room, obstacles and the two device positions/orientations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Room (length, width) in meters; the origin is the room center.
    pub room: (f64, f64),
    pub objects: Vec<Obstacle>,
    pub tx: (f64, f64),
    pub rx: (f64, f64),
    pub tx_boresight_deg: f64,
    pub rx_boresight_deg: f64,
    pub wall_dielectric: f64,
}

impl Scenario {
    pub fn from_json_str(s: &str) -> Result<Self, GeometryError> {
        serde_json::from_str(s).map_err(|e| GeometryError::InvalidScenario(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// tx/rx must be in the room (walls included) and outside every object.
    /// Objects are allowed to overhang walls; faces outside the room never
    /// produce valid reflections.
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.room.0 > 0.0 && self.room.1 > 0.0) {
            return Err(GeometryError::InvalidScenario("room dimensions must be positive".into()));
        }
        if self.wall_dielectric <= 1.0 {
            return Err(GeometryError::InvalidScenario("wall dielectric must exceed 1".into()));
        }
        for (i, o) in self.objects.iter().enumerate() {
            if o.dielectric <= 1.0 {
                return Err(GeometryError::InvalidScenario(format!("object {i} dielectric must exceed 1")));
            }
            if !(o.length > 0.0 && o.width > 0.0) {
                return Err(GeometryError::InvalidScenario(format!("object {i} dimensions must be positive")));
            }
        }
        for (name, p) in [("tx", self.tx), ("rx", self.rx)] {
            let v = V2 { x: p.0, y: p.1 };
            if !inside_room(v, self.room, EPS) {
                return Err(GeometryError::EndpointOutsideRoom { endpoint: name, x: p.0, y: p.1 });
            }
            for (i, o) in self.objects.iter().enumerate() {
                if point_strictly_inside(o, v) {
                    return Err(GeometryError::EndpointInsideObject { endpoint: name, x: p.0, y: p.1, object: i });
                }
            }
        }
        Ok(())
    }

    /// The reciprocal scenario: devices and boresights exchanged.
    pub fn swapped(&self) -> Self {
        let mut s = self.clone();
        std::mem::swap(&mut s.tx, &mut s.rx);
        std::mem::swap(&mut s.tx_boresight_deg, &mut s.rx_boresight_deg);
        s
    }
}

// ---- paths ------------------------------------------------------------------

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    /// Complex gain before transmit-power scaling.
    pub alpha: Complex64,
    /// Propagation delay in seconds.
    pub tau: f64,
    pub aod_deg: f64,
    pub aoa_deg: f64,
    /// Reflection count (0 = line of sight).
    pub order: u8,
    pub cluster_id: u32,
}

impl Path {
    /// Discrete tap index on the chip grid.
    pub fn tap_index(&self) -> usize {
        tap_index(self.tau)
    }
}

/// `ceil(tau / T_c)`: the sample delay a path lands on.
pub fn tap_index(tau: f64) -> usize {
    (tau / CHIP_PERIOD_S).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    pub paths: Vec<Path>,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    /// Set when the delay spread exceeds the 128-tap estimator window.
    pub delay_spread_exceeded: bool,
}

impl PathSet {
    pub fn from_paths(paths: Vec<Path>) -> Self {
        let delay_spread_exceeded = match (
            paths.iter().map(|p| p.tau).reduce(f64::min),
            paths.iter().map(|p| p.tau).reduce(f64::max),
        ) {
            (Some(lo), Some(hi)) => hi - lo > 128.0 * CHIP_PERIOD_S,
            _ => false,
        };
        Self { paths, carrier_hz: CARRIER_HZ, bandwidth_hz: BANDWIDTH_HZ, delay_spread_exceeded }
    }

    /// Drop paths whose arrival or departure angles fall outside `grid`
    /// (patterns only cover the forward half-plane).
    pub fn restrict_to_grid(&self, grid: &AngleGrid) -> PathSet {
        let paths = self
            .paths
            .iter()
            .filter(|p| grid.contains(p.aoa_deg) && grid.contains(p.aod_deg))
            .copied()
            .collect();
        PathSet::from_paths(paths)
    }
}

// ---- small 2D vector helpers -------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
struct V2 {
    x: f64,
    y: f64,
}

impl V2 {
    fn sub(self, o: V2) -> V2 {
        V2 { x: self.x - o.x, y: self.y - o.y }
    }
    fn add(self, o: V2) -> V2 {
        V2 { x: self.x + o.x, y: self.y + o.y }
    }
    fn scale(self, s: f64) -> V2 {
        V2 { x: self.x * s, y: self.y * s }
    }
    fn dot(self, o: V2) -> f64 {
        self.x * o.x + self.y * o.y
    }
    fn cross(self, o: V2) -> f64 {
        self.x * o.y - self.y * o.x
    }
    fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
    fn angle_deg(self) -> f64 {
        self.y.atan2(self.x).to_degrees()
    }
}

fn inside_room(p: V2, room: (f64, f64), tol: f64) -> bool {
    p.x.abs() <= room.0 / 2.0 + tol && p.y.abs() <= room.1 / 2.0 + tol
}

fn wrap_deg(a: f64) -> f64 {
    let mut a = a % 360.0;
    if a > 180.0 {
        a -= 360.0;
    } else if a <= -180.0 {
        a += 360.0;
    }
    a
}

// ---- mirrors ----------------------------------------------------------------

/// A reflecting face: segment `p0 -> p1` with unit normal on its front side.
#[derive(Debug, Clone, Copy)]
struct Face {
    p0: V2,
    p1: V2,
    normal: V2,
    dielectric: f64,
}

impl Face {
    fn signed_dist(&self, p: V2) -> f64 {
        p.sub(self.p0).dot(self.normal)
    }

    fn reflect(&self, p: V2) -> V2 {
        let d = self.signed_dist(p);
        p.sub(self.normal.scale(2.0 * d))
    }

    /// Intersection of segment `a -> b` with this face segment; returns the
    /// point if it lies strictly within both (up to EPS).
    fn intersect_segment(&self, a: V2, b: V2) -> Option<V2> {
        let r = b.sub(a);
        let s = self.p1.sub(self.p0);
        let denom = r.cross(s);
        if denom.abs() < 1e-15 {
            return None;
        }
        let qp = self.p0.sub(a);
        let t = qp.cross(s) / denom; // along a->b
        let u = qp.cross(r) / denom; // along p0->p1
        if t < EPS || t > 1.0 - EPS || u < EPS || u > 1.0 - EPS {
            return None;
        }
        Some(a.add(r.scale(t)))
    }
}

fn object_corners(o: &Obstacle) -> [V2; 4] {
    let (s, c) = o.orientation_deg.to_radians().sin_cos();
    let hl = o.length / 2.0;
    let hw = o.width / 2.0;
    let rot = |lx: f64, ly: f64| V2 { x: o.x + lx * c - ly * s, y: o.y + lx * s + ly * c };
    [rot(hl, -hw), rot(hl, hw), rot(-hl, hw), rot(-hl, -hw)]
}

fn object_faces(o: &Obstacle) -> Vec<Face> {
    let corners = object_corners(o);
    (0..4)
        .map(|i| {
            let p0 = corners[i];
            let p1 = corners[(i + 1) % 4];
            let edge = p1.sub(p0);
            let len = edge.norm();
            // Corners wind counterclockwise, so the outward normal is the
            // edge rotated -90 degrees.
            let normal = V2 { x: edge.y / len, y: -edge.x / len };
            Face { p0, p1, normal, dielectric: o.dielectric }
        })
        .collect()
}

fn wall_faces(room: (f64, f64), dielectric: f64) -> Vec<Face> {
    let hx = room.0 / 2.0;
    let hy = room.1 / 2.0;
    let c = [
        V2 { x: -hx, y: -hy },
        V2 { x: hx, y: -hy },
        V2 { x: hx, y: hy },
        V2 { x: -hx, y: hy },
    ];
    (0..4)
        .map(|i| {
            let p0 = c[i];
            let p1 = c[(i + 1) % 4];
            let edge = p1.sub(p0);
            let len = edge.norm();
            // Counterclockwise winding; inward normal is the edge rotated +90.
            let normal = V2 { x: -edge.y / len, y: edge.x / len };
            Face { p0, p1, normal, dielectric }
        })
        .collect()
}

fn point_strictly_inside(o: &Obstacle, p: V2) -> bool {
    let (s, c) = o.orientation_deg.to_radians().sin_cos();
    let d = V2 { x: p.x - o.x, y: p.y - o.y };
    let lx = d.x * c + d.y * s;
    let ly = -d.x * s + d.y * c;
    lx.abs() < o.length / 2.0 - EPS && ly.abs() < o.width / 2.0 - EPS
}

/// Does the open segment `a -> b` pass through the interior of `o`?
/// Touching a face (e.g. ending on a reflection point) does not block.
fn segment_blocked_by(o: &Obstacle, a: V2, b: V2) -> bool {
    let (s, c) = o.orientation_deg.to_radians().sin_cos();
    let to_local = |p: V2| {
        let d = V2 { x: p.x - o.x, y: p.y - o.y };
        V2 { x: d.x * c + d.y * s, y: -d.x * s + d.y * c }
    };
    let la = to_local(a);
    let lb = to_local(b);
    let dir = lb.sub(la);
    let hl = o.length / 2.0;
    let hw = o.width / 2.0;

    // Liang-Barsky clip of the segment to the box.
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [
        (-dir.x, la.x + hl),
        (dir.x, hl - la.x),
        (-dir.y, la.y + hw),
        (dir.y, hw - la.y),
    ] {
        if p.abs() < 1e-15 {
            if q < 0.0 {
                return false;
            }
            continue;
        }
        let r = q / p;
        if p < 0.0 {
            t0 = t0.max(r);
        } else {
            t1 = t1.min(r);
        }
        if t0 > t1 {
            return false;
        }
    }
    if t1 - t0 < 1e-7 {
        return false;
    }
    // Require the midpoint of the clipped span to be strictly interior, so
    // grazing along a face does not count as blockage.
    let tm = 0.5 * (t0 + t1);
    let m = la.add(dir.scale(tm));
    m.x.abs() < hl - EPS && m.y.abs() < hw - EPS
}

fn segment_clear(objects: &[Obstacle], a: V2, b: V2) -> bool {
    objects.iter().all(|o| !segment_blocked_by(o, a, b))
}

/// Fresnel reflection coefficient, perpendicular polarization.
fn fresnel_perp(cos_incidence: f64, eps_r: f64) -> f64 {
    let cos_i = cos_incidence.clamp(0.0, 1.0);
    let sin2 = 1.0 - cos_i * cos_i;
    let root = (eps_r - sin2).sqrt();
    (cos_i - root) / (cos_i + root)
}

// ---- tracing ----------------------------------------------------------------

/// Image-method ray trace: line of sight plus all unblocked first- and
/// second-order specular reflections.
pub fn trace_paths(scenario: &Scenario) -> Result<PathSet, GeometryError> {
    scenario.validate()?;
    let tx = V2 { x: scenario.tx.0, y: scenario.tx.1 };
    let rx = V2 { x: scenario.rx.0, y: scenario.rx.1 };
    let lambda = SPEED_OF_LIGHT / CARRIER_HZ;

    let mut faces = wall_faces(scenario.room, scenario.wall_dielectric);
    for o in &scenario.objects {
        faces.extend(object_faces(o));
    }

    struct Candidate {
        length: f64,
        reflectance: f64,
        first_point: V2,
        last_point: V2,
        order: u8,
    }
    let mut candidates: Vec<Candidate> = Vec::new();

    // Line of sight.
    let los = rx.sub(tx);
    if los.norm() > EPS && segment_clear(&scenario.objects, tx, rx) {
        candidates.push(Candidate { length: los.norm(), reflectance: 1.0, first_point: rx, last_point: tx, order: 0 });
    }

    // First order.
    for f in &faces {
        if f.signed_dist(tx) < EPS || f.signed_dist(rx) < EPS {
            continue;
        }
        let img = f.reflect(tx);
        let Some(q) = f.intersect_segment(img, rx) else { continue };
        if !inside_room(q, scenario.room, EPS) {
            continue;
        }
        if !segment_clear(&scenario.objects, tx, q) || !segment_clear(&scenario.objects, q, rx) {
            continue;
        }
        let inc = q.sub(tx);
        let cos_i = (inc.dot(f.normal) / inc.norm()).abs();
        candidates.push(Candidate {
            length: img.sub(rx).norm(),
            reflectance: fresnel_perp(cos_i, f.dielectric),
            first_point: q,
            last_point: q,
            order: 1,
        });
    }

    // Second order.
    for (i, f1) in faces.iter().enumerate() {
        if f1.signed_dist(tx) < EPS {
            continue;
        }
        let img1 = f1.reflect(tx);
        for (j, f2) in faces.iter().enumerate() {
            if i == j || f2.signed_dist(rx) < EPS {
                continue;
            }
            // Coplanar mirrors cannot form a second-order image pair.
            if f1.normal.cross(f2.normal).abs() < 1e-12
                && f1.signed_dist(f2.p0).abs() < 1e-12
            {
                continue;
            }
            let img2 = f2.reflect(img1);
            let Some(q2) = f2.intersect_segment(img2, rx) else { continue };
            let Some(q1) = f1.intersect_segment(img1, q2) else { continue };
            if !inside_room(q1, scenario.room, EPS) || !inside_room(q2, scenario.room, EPS) {
                continue;
            }
            if q2.sub(q1).norm() < EPS {
                continue;
            }
            // The leg q1 -> q2 must leave f1's front and hit f2's front.
            if f1.signed_dist(q2) < EPS || f2.signed_dist(q1) < EPS {
                continue;
            }
            if !segment_clear(&scenario.objects, tx, q1)
                || !segment_clear(&scenario.objects, q1, q2)
                || !segment_clear(&scenario.objects, q2, rx)
            {
                continue;
            }
            let inc1 = q1.sub(tx);
            let inc2 = q2.sub(q1);
            let cos1 = (inc1.dot(f1.normal) / inc1.norm()).abs();
            let cos2 = (inc2.dot(f2.normal) / inc2.norm()).abs();
            candidates.push(Candidate {
                length: img2.sub(rx).norm(),
                reflectance: fresnel_perp(cos1, f1.dielectric) * fresnel_perp(cos2, f2.dielectric),
                first_point: q1,
                last_point: q2,
                order: 2,
            });
        }
    }

    let mut paths: Vec<Path> = candidates
        .iter()
        .map(|c| {
            let aod = wrap_deg(c.first_point.sub(tx).angle_deg() - scenario.tx_boresight_deg);
            let aoa = wrap_deg(c.last_point.sub(rx).angle_deg() - scenario.rx_boresight_deg);
            let mag = lambda / (4.0 * std::f64::consts::PI * c.length) * c.reflectance;
            let phase = -2.0 * std::f64::consts::PI * c.length / lambda;
            Path {
                alpha: Complex64::from_polar(mag.abs(), if mag < 0.0 { phase + std::f64::consts::PI } else { phase }),
                tau: c.length / SPEED_OF_LIGHT,
                aod_deg: aod,
                aoa_deg: aoa,
                order: c.order,
                cluster_id: 0,
            }
        })
        .collect();

    paths.sort_by(|a, b| {
        (a.tau, a.aoa_deg, a.aod_deg)
            .partial_cmp(&(b.tau, b.aoa_deg, b.aod_deg))
            .expect("finite path parameters")
    });
    // Collinear mirror combinations can rediscover the same specular path.
    paths.dedup_by(|a, b| {
        (a.tau - b.tau).abs() < 1e-15
            && (a.aoa_deg - b.aoa_deg).abs() < 1e-9
            && (a.aod_deg - b.aod_deg).abs() < 1e-9
    });
    for (i, p) in paths.iter_mut().enumerate() {
        p.cluster_id = i as u32;
    }
    Ok(PathSet::from_paths(paths))
}

// ---- cluster blur -------------------------------------------------------------

/// Intra-cluster blur parameters. These defaults are stand-ins for the
/// external channel document's table, exposed so studies can change them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterConfig {
    /// Extra rays per cluster (0 disables blurring).
    pub n_rays: usize,
    /// Mean excess delay and power-decay constant, nanoseconds.
    pub gamma_ns: f64,
    /// Laplacian scale of the AOA/AOD offsets, degrees.
    pub sigma_deg: f64,
    /// Intra-cluster ray power relative to the central ray at zero excess
    /// delay, dB (the cluster K-factor analog); the exponential decay
    /// applies on top of this.
    pub ray_power_db: f64,
    /// Total cluster power relative to the central ray's input power.
    pub power_factor: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self { n_rays: 4, gamma_ns: 4.5, sigma_deg: 5.0, ray_power_db: -25.0, power_factor: 1.0 }
    }
}

fn laplace(rng: &mut impl Rng, scale: f64) -> f64 {
    let u: f64 = rng.random_range(-0.5..0.5);
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Blur each path into a cluster: the central ray plus `n_rays` rays with
/// exponential excess delays, exponentially decaying powers, random phases
/// and Laplacian angular offsets. Total cluster power is exactly
/// `power_factor` times the input path power. Deterministic given the seed.
pub fn blur_clusters(paths: &PathSet, config: &ClusterConfig, seed: u64) -> PathSet {
    if config.n_rays == 0 {
        return paths.clone();
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let excess = Exp::new(1.0 / config.gamma_ns).expect("positive decay constant");
    let ray_scale = 10f64.powf(config.ray_power_db / 10.0);
    let mut out = Vec::with_capacity(paths.paths.len() * (1 + config.n_rays));
    for p in &paths.paths {
        let mut rays = Vec::with_capacity(1 + config.n_rays);
        // (weight, excess delay ns, phase, d_aoa, d_aod); central ray first.
        rays.push((1.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64));
        for _ in 0..config.n_rays {
            let delay_ns = excess.sample(&mut rng);
            let weight = ray_scale * (-delay_ns / config.gamma_ns).exp();
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let d_aoa = laplace(&mut rng, config.sigma_deg);
            let d_aod = laplace(&mut rng, config.sigma_deg);
            rays.push((weight, delay_ns, phase, d_aoa, d_aod));
        }
        let total: f64 = rays.iter().map(|r| r.0).sum();
        let scale = (config.power_factor / total).sqrt();
        for (weight, delay_ns, phase, d_aoa, d_aod) in rays {
            out.push(Path {
                alpha: p.alpha * Complex64::from_polar(weight.sqrt() * scale, phase),
                tau: p.tau + delay_ns * 1e-9,
                aod_deg: p.aod_deg + d_aod,
                aoa_deg: p.aoa_deg + d_aoa,
                order: p.order,
                cluster_id: p.cluster_id,
            });
        }
    }
    PathSet::from_paths(out)
}

// ---- channel application -------------------------------------------------------

/// `10^((dBm - 30) / 10)` watts; `-inf` maps to exactly zero.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    if dbm == f64::NEG_INFINITY {
        0.0
    } else {
        10f64.powf((dbm - 30.0) / 10.0)
    }
}

/// One received preamble under a particular receive beam.
#[derive(Debug, Clone)]
pub struct ReceivedFrame {
    pub samples: ComplexSequence,
    pub rx_beam_id: u32,
    pub noise_power_dbm: f64,
    pub seed: u64,
}

/// Received samples `r[n] = sum_k h_k s[n - ceil(tau_k/T_c)] + z[n]` with
/// `h_k = sqrt(P_t) * alpha_k * G_tx(aod_k) * G_rx(aoa_k)`.
///
/// Paths whose ceiled tap indices collide simply sum into one tap. Noise is
/// circular complex Gaussian with per-sample power set by `noise_power_dbm`,
/// a pure function of `seed`.
pub fn apply_channel(
    paths: &PathSet,
    tx_beam: &BeamPattern,
    rx_beam: &BeamPattern,
    grid: &AngleGrid,
    preamble: &ComplexSequence,
    tx_power_dbm: f64,
    noise_power_dbm: f64,
    seed: u64,
) -> Result<ReceivedFrame, BeamError> {
    let amp = dbm_to_watts(tx_power_dbm).sqrt();
    let mut taps: Vec<(usize, Complex64)> = Vec::with_capacity(paths.paths.len());
    let mut max_tap = 0usize;
    for p in &paths.paths {
        let h = amp
            * p.alpha
            * gain_at(tx_beam, grid, p.aod_deg)?
            * gain_at(rx_beam, grid, p.aoa_deg)?;
        let d = p.tap_index();
        max_tap = max_tap.max(d);
        taps.push((d, h));
    }

    let len = preamble.len() + max_tap;
    let mut samples = vec![Complex64::ZERO; len];
    for (d, h) in taps {
        for (n, &s) in preamble.samples.iter().enumerate() {
            samples[n + d] += h * s;
        }
    }

    let noise_power = dbm_to_watts(noise_power_dbm);
    if noise_power > 0.0 {
        let sigma = (noise_power / 2.0).sqrt();
        let normal = Normal::new(0.0, sigma).expect("finite sigma");
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for s in &mut samples {
            *s += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
    }

    Ok(ReceivedFrame {
        samples: ComplexSequence { samples, sample_period: preamble.sample_period },
        rx_beam_id: rx_beam.beam_id,
        noise_power_dbm,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beams::quasi_omni;
    use crate::preamble::build_preamble;

    fn empty_room() -> Scenario {
        Scenario {
            room: (4.0, 3.0),
            objects: vec![],
            tx: (-2.0, 0.0),
            rx: (2.0, 0.0),
            tx_boresight_deg: 0.0,
            rx_boresight_deg: 180.0,
            wall_dielectric: 2.0,
        }
    }

    #[test]
    fn empty_room_los_delay_and_angles() {
        let ps = trace_paths(&empty_room()).unwrap();
        let los = ps.paths.iter().find(|p| p.order == 0).expect("LOS exists");
        assert!((los.aoa_deg).abs() < 1e-9);
        assert!((los.aod_deg).abs() < 1e-9);
        assert!((los.tau - 4.0 / SPEED_OF_LIGHT).abs() < 1e-15);
        assert_eq!(los.tap_index(), 24);
    }

    #[test]
    fn empty_room_wall_bounces_are_symmetric() {
        let ps = trace_paths(&empty_room()).unwrap();
        let first: Vec<&Path> = ps.paths.iter().filter(|p| p.order == 1).collect();
        assert_eq!(first.len(), 2, "top and bottom wall bounces");
        let want = (3.0f64 / 4.0).atan().to_degrees();
        let mut aoas: Vec<f64> = first.iter().map(|p| p.aoa_deg).collect();
        aoas.sort_by(f64::total_cmp);
        assert!((aoas[0] + want).abs() < 1e-9);
        assert!((aoas[1] - want).abs() < 1e-9);
        assert!((first[0].alpha.norm() - first[1].alpha.norm()).abs() < 1e-15);
        // left/right wall images are degenerate (devices sit on those walls)
        assert!(ps.paths.iter().all(|p| p.tau > 0.0));
    }

    #[test]
    fn blocking_object_removes_los() {
        let mut sc = empty_room();
        sc.objects.push(Obstacle {
            x: 0.0,
            y: 0.0,
            length: 0.4,
            width: 0.4,
            orientation_deg: 0.0,
            dielectric: 3.24,
        });
        let ps = trace_paths(&sc).unwrap();
        assert!(ps.paths.iter().all(|p| p.order != 0), "LOS must be blocked");
    }

    #[test]
    fn endpoint_inside_object_is_an_error() {
        let mut sc = empty_room();
        sc.tx = (0.0, 0.0);
        sc.objects.push(Obstacle {
            x: 0.0,
            y: 0.0,
            length: 1.0,
            width: 1.0,
            orientation_deg: 0.0,
            dielectric: 3.24,
        });
        assert!(matches!(trace_paths(&sc), Err(GeometryError::EndpointInsideObject { .. })));
    }

    #[test]
    fn reciprocity_swaps_angles() {
        let mut sc = empty_room();
        sc.tx = (-1.3, 0.4);
        sc.rx = (1.7, -0.6);
        sc.objects.push(Obstacle {
            x: 0.3,
            y: 0.9,
            length: 0.5,
            width: 0.3,
            orientation_deg: 30.0,
            dielectric: 3.24,
        });
        let fwd = trace_paths(&sc).unwrap();
        let rev = trace_paths(&sc.swapped()).unwrap();
        assert_eq!(fwd.paths.len(), rev.paths.len());
        let mut rev_sorted: Vec<Path> = rev.paths.clone();
        rev_sorted.sort_by(|a, b| a.tau.total_cmp(&b.tau));
        for (f, r) in fwd.paths.iter().zip(&rev_sorted) {
            assert!((f.tau - r.tau).abs() < 1e-15);
            assert!((f.aoa_deg - r.aod_deg).abs() < 1e-9);
            assert!((f.aod_deg - r.aoa_deg).abs() < 1e-9);
            assert!((f.alpha.norm() - r.alpha.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn scenario_json_round_trip() {
        let sc = empty_room();
        let json = sc.to_json_string();
        let back = Scenario::from_json_str(&json).unwrap();
        assert_eq!(sc, back);
        assert!(Scenario::from_json_str("{\"room\": [4,3]}").is_err());
    }

    #[test]
    fn blur_identity_when_disabled() {
        let ps = trace_paths(&empty_room()).unwrap();
        let cfg = ClusterConfig { n_rays: 0, ..ClusterConfig::default() };
        assert_eq!(blur_clusters(&ps, &cfg, 42), ps);
    }

    #[test]
    fn blur_counts_and_preserves_cluster_power() {
        let ps = trace_paths(&empty_room()).unwrap();
        let n_in = ps.paths.len();
        let cfg = ClusterConfig::default();
        let b1 = blur_clusters(&ps, &cfg, 1);
        let b2 = blur_clusters(&ps, &cfg, 2);
        assert_eq!(b1.paths.len(), n_in * (1 + cfg.n_rays));
        assert_ne!(b1, b2, "different seeds draw different offsets");
        for parent in &ps.paths {
            for blurred in [&b1, &b2] {
                let power: f64 = blurred
                    .paths
                    .iter()
                    .filter(|p| p.cluster_id == parent.cluster_id)
                    .map(|p| p.alpha.norm_sqr())
                    .sum();
                assert!((power - parent.alpha.norm_sqr()).abs() <= 1e-12 * parent.alpha.norm_sqr());
            }
        }
        // cluster ids preserved
        let ids_in: Vec<u32> = ps.paths.iter().map(|p| p.cluster_id).collect();
        let ids_out: std::collections::BTreeSet<u32> = b1.paths.iter().map(|p| p.cluster_id).collect();
        assert_eq!(ids_out.into_iter().collect::<Vec<_>>(), ids_in);
    }

    #[test]
    fn blur_is_deterministic() {
        let ps = trace_paths(&empty_room()).unwrap();
        let cfg = ClusterConfig::default();
        assert_eq!(blur_clusters(&ps, &cfg, 9), blur_clusters(&ps, &cfg, 9));
    }

    #[test]
    fn single_path_is_a_shifted_scaled_preamble() {
        let grid = AngleGrid::default_grid();
        let p = build_preamble();
        let h = Complex64::new(0.25, -0.1);
        let ps = PathSet::from_paths(vec![Path {
            alpha: h,
            tau: 10.0 * CHIP_PERIOD_S - 1e-12, // ceils to tap 10
            aod_deg: 0.0,
            aoa_deg: 0.0,
            order: 0,
            cluster_id: 0,
        }]);
        let omni = quasi_omni(&grid);
        let frame = apply_channel(&ps, &omni, &omni, &grid, &p.sequence, 30.0, f64::NEG_INFINITY, 0).unwrap();
        // 30 dBm -> 1 W -> unit amplitude
        assert_eq!(frame.samples.len(), p.sequence.len() + 10);
        for n in 0..10 {
            assert_eq!(frame.samples.samples[n], Complex64::ZERO);
        }
        for (n, &s) in p.sequence.samples.iter().enumerate() {
            assert!((frame.samples.samples[n + 10] - h * s).norm() < 1e-15);
        }
    }

    #[test]
    fn resolvable_paths_occupy_distinct_taps() {
        let grid = AngleGrid::default_grid();
        let p = build_preamble();
        let ps = PathSet::from_paths(vec![
            Path { alpha: Complex64::new(1.0, 0.0), tau: 3.1 * CHIP_PERIOD_S, aod_deg: 0.0, aoa_deg: 0.0, order: 0, cluster_id: 0 },
            Path { alpha: Complex64::new(0.5, 0.0), tau: 4.1 * CHIP_PERIOD_S, aod_deg: 0.0, aoa_deg: 0.0, order: 0, cluster_id: 1 },
        ]);
        assert_eq!(ps.paths[0].tap_index(), 4);
        assert_eq!(ps.paths[1].tap_index(), 5);
        let omni = quasi_omni(&grid);
        let frame = apply_channel(&ps, &omni, &omni, &grid, &p.sequence, 30.0, f64::NEG_INFINITY, 0).unwrap();
        // the first chip of each shifted copy lands on its own tap
        assert!((frame.samples.samples[4] - p.sequence.samples[0]).norm() < 1e-12);
        assert!((frame.samples.samples[5] - (0.5 * p.sequence.samples[0] + p.sequence.samples[1])).norm() < 1e-12);
    }

    #[test]
    fn noiseless_ratio_identity_across_beams() {
        use crate::beams::synth_codebook;
        let grid = AngleGrid::default_grid();
        let cb = synth_codebook(8, 4, 8, &grid, 5);
        let theta = 17.0;
        let pathset = PathSet::from_paths(vec![Path {
            alpha: Complex64::new(3e-4, 1e-4),
            tau: 20.0 * CHIP_PERIOD_S,
            aod_deg: -5.0,
            aoa_deg: theta,
            order: 0,
            cluster_id: 0,
        }]);
        let p = build_preamble();
        let omni = quasi_omni(&grid);
        let tap = pathset.paths[0].tap_index();
        let mut mags = Vec::new();
        for beam in &cb.beams {
            let f = apply_channel(&pathset, &omni, beam, &grid, &p.sequence, 25.0, f64::NEG_INFINITY, 0).unwrap();
            // with exactly one path, the tap sample is h * s[0]
            mags.push(f.samples.samples[tap].norm());
        }
        for (l1, b1) in cb.beams.iter().enumerate() {
            for (l2, b2) in cb.beams.iter().enumerate() {
                let g1 = gain_at(b1, &grid, theta).unwrap().norm();
                let g2 = gain_at(b2, &grid, theta).unwrap().norm();
                if g2 == 0.0 || mags[l2] == 0.0 {
                    continue;
                }
                let lhs = mags[l1] / mags[l2];
                let rhs = g1 / g2;
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0),
                    "beams {l1},{l2}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn noise_power_matches_configuration() {
        let grid = AngleGrid::default_grid();
        let omni = quasi_omni(&grid);
        let ps = PathSet::from_paths(vec![]);
        // Long "preamble" of zeros: the frame is pure noise.
        let quiet = ComplexSequence { samples: vec![Complex64::ZERO; 1_000_000], sample_period: CHIP_PERIOD_S };
        let dbm = -40.0;
        let frame = apply_channel(&ps, &omni, &omni, &grid, &quiet, 25.0, dbm, 77).unwrap();
        let mean_power: f64 =
            frame.samples.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / frame.samples.len() as f64;
        let want = dbm_to_watts(dbm);
        assert!((mean_power - want).abs() < 0.02 * want, "{mean_power} vs {want}");
        // pure function of seed
        let again = apply_channel(&ps, &omni, &omni, &grid, &quiet, 25.0, dbm, 77).unwrap();
        assert_eq!(frame.samples.samples, again.samples.samples);
    }

    #[test]
    fn energy_identity_single_path() {
        let grid = AngleGrid::default_grid();
        let p = build_preamble();
        let g = Complex64::new(2e-4, -1.5e-4);
        let ps = PathSet::from_paths(vec![Path {
            alpha: g,
            tau: 7.0 * CHIP_PERIOD_S,
            aod_deg: 0.0,
            aoa_deg: 0.0,
            order: 0,
            cluster_id: 0,
        }]);
        let omni = quasi_omni(&grid);
        let tx_dbm = 25.0;
        let frame = apply_channel(&ps, &omni, &omni, &grid, &p.sequence, tx_dbm, f64::NEG_INFINITY, 0).unwrap();
        let energy: f64 = frame.samples.samples.iter().map(|s| s.norm_sqr()).sum();
        let want = g.norm_sqr() * 1280.0 * dbm_to_watts(tx_dbm);
        assert!((energy - want).abs() <= 1e-9 * want);
    }

    #[test]
    fn delay_spread_warning_flag() {
        let mk = |tau: f64| Path {
            alpha: Complex64::new(1.0, 0.0),
            tau,
            aod_deg: 0.0,
            aoa_deg: 0.0,
            order: 0,
            cluster_id: 0,
        };
        let ok = PathSet::from_paths(vec![mk(CHIP_PERIOD_S), mk(100.0 * CHIP_PERIOD_S)]);
        assert!(!ok.delay_spread_exceeded);
        let wide = PathSet::from_paths(vec![mk(CHIP_PERIOD_S), mk(200.0 * CHIP_PERIOD_S)]);
        assert!(wide.delay_spread_exceeded);
    }
}
