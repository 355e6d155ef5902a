//! Synthetic multipath channel scenes.
//!
//! A base station with a half-wavelength uniform linear array serves users on
//! a 1 m grid. Each user sees a line-of-sight path (unless a blocker cuts it)
//! plus seeded random reflections. The grid is tiled into areas, each of which
//! becomes one dataset.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{complex_to_real, Dataset, Label};
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::math::{atan2, cos, pow, sin, sqrt};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;
const PI: f64 = core::f64::consts::PI;
/// Extra length of a reflected path over the direct distance, meters.
const EXCESS_LENGTH: (f64, f64) = (5.0, 100.0);
/// Reflection loss relative to the line-of-sight gain, dB.
const REFLECTION_LOSS_DB: (f64, f64) = (10.0, 20.0);

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    /// Whether the segment `p → q` touches the rectangle (Liang-Barsky).
    pub fn intersects_segment(&self, p: [f64; 2], q: [f64; 2]) -> bool {
        let d = [q[0] - p[0], q[1] - p[1]];
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        let checks = [
            (-d[0], p[0] - self.x_min),
            (d[0], self.x_max - p[0]),
            (-d[1], p[1] - self.y_min),
            (d[1], self.y_max - p[1]),
        ];
        for (pk, qk) in checks {
            if pk == 0.0 {
                if qk < 0.0 {
                    return false;
                }
            } else {
                let r = qk / pk;
                if pk < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

/// Scene parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SceneConfig {
    pub n_bs_antennas: usize,
    pub n_subcarriers: usize,
    /// Grid extent in meters (1 m resolution, users at cell centers).
    pub grid_width: usize,
    pub grid_height: usize,
    pub bs_position: [f64; 2],
    /// Line-of-sight path plus `n_paths − 1` reflections.
    pub n_paths: usize,
    pub blockers: Vec<Rect>,
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    pub seed: u64,
    pub tile_rows: usize,
    pub tile_cols: usize,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            n_bs_antennas: 32,
            n_subcarriers: 32,
            grid_width: 100,
            grid_height: 52,
            bs_position: [50.0, -10.0],
            n_paths: 5,
            blockers: vec![
                Rect::new(18.0, 14.0, 28.0, 22.0),
                Rect::new(62.0, 8.0, 70.0, 16.0),
                Rect::new(40.0, 30.0, 52.0, 36.0),
                Rect::new(80.0, 34.0, 88.0, 44.0),
            ],
            carrier_ghz: 3.5,
            bandwidth_mhz: 20.0,
            seed: 0,
            tile_rows: 4,
            tile_cols: 5,
        }
    }
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_bs_antennas", self.n_bs_antennas),
            ("n_subcarriers", self.n_subcarriers),
            ("grid_width", self.grid_width),
            ("grid_height", self.grid_height),
            ("n_paths", self.n_paths),
            ("tile_rows", self.tile_rows),
            ("tile_cols", self.tile_cols),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(invalid!("{name} must be positive"));
            }
        }
        if self.grid_width % self.tile_cols != 0 || self.grid_height % self.tile_rows != 0 {
            return Err(invalid!(
                "a {}x{} m grid cannot be split evenly into {} rows x {} columns of tiles",
                self.grid_width,
                self.grid_height,
                self.tile_rows,
                self.tile_cols
            ));
        }
        if !(self.carrier_ghz > 0.0) || !(self.bandwidth_mhz > 0.0) {
            return Err(invalid!("carrier and bandwidth must be positive"));
        }
        if !self.bs_position.iter().all(|v| v.is_finite()) {
            return Err(invalid!("base station position must be finite"));
        }
        Ok(())
    }

    pub fn n_areas(&self) -> usize {
        self.tile_rows * self.tile_cols
    }

    /// Tile index of a grid cell.
    pub fn area_of(&self, cell_x: usize, cell_y: usize) -> usize {
        let tile_w = self.grid_width / self.tile_cols;
        let tile_h = self.grid_height / self.tile_rows;
        (cell_y / tile_h) * self.tile_cols + cell_x / tile_w
    }

    fn subcarrier_spacing_hz(&self) -> f64 {
        self.bandwidth_mhz * 1e6 / self.n_subcarriers as f64
    }

    fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / (self.carrier_ghz * 1e9)
    }
}

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: f64,
    /// Seconds.
    pub delay: f64,
    /// Departure angle from array broadside, radians.
    pub angle: f64,
}

/// One user of a scene.
#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub position: [f64; 2],
    pub los: bool,
    pub area: usize,
    pub beam: usize,
    pub paths: Vec<Path>,
    /// `n_bs_antennas × n_subcarriers`, row-major.
    pub channel: Vec<Complex64>,
}

/// A generated scene.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScene {
    pub config: SceneConfig,
    pub users: Vec<User>,
}

impl ChannelScene {
    pub fn users_in_area(&self, area: usize) -> impl Iterator<Item = &User> + '_ {
        self.users.iter().filter(move |u| u.area == area)
    }

    pub fn area_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.config.n_areas()];
        for u in &self.users {
            counts[u.area] += 1;
        }
        counts
    }
}

fn distance(p: [f64; 2], q: [f64; 2]) -> f64 {
    sqrt((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]))
}

/// Angle from broadside (`+y`) of the direction `from → to`; `sin θ = dx/d`.
fn departure_angle(from: [f64; 2], to: [f64; 2]) -> f64 {
    atan2(to[0] - from[0], to[1] - from[1])
}

/// Builds every user's channel. Users inside a blocker are skipped.
///
/// Every user draws its reflections from its own RNG stream, so results do
/// not depend on generation order.
pub fn generate_scene(config: &SceneConfig) -> Result<ChannelScene> {
    config.validate()?;
    let bs = config.bs_position;

    let mut users = Vec::new();
    for cy in 0..config.grid_height {
        for cx in 0..config.grid_width {
            let index = (cy * config.grid_width + cx) as u64;
            let pos = [cx as f64 + 0.5, cy as f64 + 0.5];
            if config.blockers.iter().any(|r| r.contains(pos)) {
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(index);
            let los = !config.blockers.iter().any(|r| r.intersects_segment(bs, pos));
            let paths = user_paths(config, pos, los, &mut rng);
            let channel = synthesize(config, &paths);
            let beam = best_beam(&channel, config.n_bs_antennas, config.n_subcarriers);
            users.push(User {
                position: pos,
                los,
                area: config.area_of(cx, cy),
                beam,
                paths,
                channel,
            });
        }
    }
    Ok(ChannelScene {
        config: config.clone(),
        users,
    })
}

/// Line-of-sight path (if unblocked) plus `n_paths − 1` reflections with
/// uniform departure angle, excess length and loss.
fn user_paths(config: &SceneConfig, pos: [f64; 2], los: bool, rng: &mut ChaCha8Rng) -> Vec<Path> {
    let bs = config.bs_position;
    let lambda = config.wavelength();
    let d = distance(bs, pos);
    let los_gain = lambda / (4.0 * PI * d);
    let mut paths = Vec::with_capacity(config.n_paths);
    if los {
        paths.push(Path {
            gain: los_gain,
            delay: d / SPEED_OF_LIGHT,
            angle: departure_angle(bs, pos),
        });
    }
    let uniform = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| lo + (hi - lo) * rng.random::<f64>();
    for _ in 1..config.n_paths {
        let angle = uniform(rng, (-PI / 2.0, PI / 2.0));
        let length = d + uniform(rng, EXCESS_LENGTH);
        let loss_db = uniform(rng, REFLECTION_LOSS_DB);
        paths.push(Path {
            gain: los_gain * pow(10.0, -loss_db / 20.0),
            delay: length / SPEED_OF_LIGHT,
            angle,
        });
    }
    paths
}

/// `H[m][s] = Σ_l α_l e^{−j2π f_s (τ_l − τ_0)} e^{−jπ m sin θ_l}`, with `τ_0`
/// the first arrival (the receiver is synchronized to it).
pub fn synthesize(config: &SceneConfig, paths: &[Path]) -> Vec<Complex64> {
    let (n_ant, n_sub) = (config.n_bs_antennas, config.n_subcarriers);
    let df = config.subcarrier_spacing_hz();
    let t0 = paths.iter().map(|p| p.delay).fold(f64::INFINITY, f64::min);
    let mut h = vec![Complex64::new(0.0, 0.0); n_ant * n_sub];
    for p in paths {
        let st = sin(p.angle);
        let tau = p.delay - t0;
        for m in 0..n_ant {
            let spatial = -PI * m as f64 * st;
            for s in 0..n_sub {
                let phase = spatial - 2.0 * PI * df * s as f64 * tau;
                h[m * n_sub + s] += Complex64::new(p.gain * cos(phase), p.gain * sin(phase));
            }
        }
    }
    h
}

/// Index of the DFT-codebook beam with the most received power summed over
/// subcarriers; ties go to the lowest index.
pub fn best_beam(channel: &[Complex64], n_ant: usize, n_sub: usize) -> usize {
    let powers = beam_powers(channel, n_ant, n_sub);
    let mut best = 0;
    for (b, &p) in powers.iter().enumerate() {
        if p > powers[best] {
            best = b;
        }
    }
    best
}

/// `Σ_s |f_bᴴ H[:, s]|²` for every codebook beam `f_b[m] = e^{−j2π mb/N}/√N`.
pub fn beam_powers(channel: &[Complex64], n_ant: usize, n_sub: usize) -> Vec<f64> {
    let norm = 1.0 / sqrt(n_ant as f64);
    (0..n_ant)
        .map(|b| {
            let weights: Vec<Complex64> = (0..n_ant)
                .map(|m| {
                    let phase = 2.0 * PI * (m * b % n_ant) as f64 / n_ant as f64;
                    // conjugate of the codebook entry
                    Complex64::new(cos(phase) * norm, sin(phase) * norm)
                })
                .collect();
            (0..n_sub)
                .map(|s| {
                    let y: Complex64 = (0..n_ant).map(|m| weights[m] * channel[m * n_sub + s]).sum();
                    y.norm_sqr()
                })
                .sum()
        })
        .collect()
}

/// Beam label of every user, in scene order.
pub fn beam_labels(scene: &ChannelScene) -> Vec<Label> {
    scene.users.iter().map(|u| u.beam as Label).collect()
}

/// Feature layout of [`channels_to_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Preprocess {
    /// Flattened `N_BS × N_sub` channel, real parts then imaginary parts.
    Raw,
    /// 2D DFT to the angle-delay domain, keeping the first `N_sub/2` delay taps.
    AngleDelay,
}

/// Which label to attach to channel datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LabelKind {
    Los,
    Beam,
}

fn dft_matrix(n: usize, sign: f64) -> Vec<Complex64> {
    let norm = 1.0 / sqrt(n as f64);
    let mut f = Vec::with_capacity(n * n);
    for k in 0..n {
        for m in 0..n {
            let phase = sign * 2.0 * PI * ((k * m) % n) as f64 / n as f64;
            f.push(Complex64::new(cos(phase) * norm, sin(phase) * norm));
        }
    }
    f
}

/// Unitary angle-delay transform `F_ant · H · G_subᵀ`: forward DFT across
/// antennas, inverse DFT across subcarriers. Output is `n_ant × n_sub`.
pub fn angle_delay(channel: &[Complex64], n_ant: usize, n_sub: usize) -> Vec<Complex64> {
    let fa = dft_matrix(n_ant, -1.0);
    let gs = dft_matrix(n_sub, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut tmp = vec![zero; n_ant * n_sub];
    for k in 0..n_ant {
        for m in 0..n_ant {
            let f = fa[k * n_ant + m];
            for s in 0..n_sub {
                tmp[k * n_sub + s] += f * channel[m * n_sub + s];
            }
        }
    }
    let mut out = vec![zero; n_ant * n_sub];
    for k in 0..n_ant {
        for t in 0..n_sub {
            let mut acc = zero;
            for s in 0..n_sub {
                acc += tmp[k * n_sub + s] * gs[t * n_sub + s];
            }
            out[k * n_sub + t] = acc;
        }
    }
    out
}

/// Dataset of the users in one area.
pub fn channels_to_dataset(
    scene: &ChannelScene,
    area: usize,
    preprocess: Preprocess,
    labels: Option<LabelKind>,
) -> Result<Dataset> {
    let cfg = &scene.config;
    if area >= cfg.n_areas() {
        return Err(invalid!("area {area} out of range (scene has {})", cfg.n_areas()));
    }
    let users: Vec<&User> = scene.users_in_area(area).collect();
    if users.is_empty() {
        return Err(Error::EmptyArea(area));
    }
    let (n_ant, n_sub) = (cfg.n_bs_antennas, cfg.n_subcarriers);
    let kept = match preprocess {
        Preprocess::Raw => n_sub,
        Preprocess::AngleDelay => n_sub / 2,
    };
    let width = n_ant * kept;
    let mut re = Vec::with_capacity(users.len() * width);
    let mut im = Vec::with_capacity(users.len() * width);
    for u in &users {
        let values = match preprocess {
            Preprocess::Raw => u.channel.clone(),
            Preprocess::AngleDelay => angle_delay(&u.channel, n_ant, n_sub),
        };
        for k in 0..n_ant {
            for t in 0..kept {
                let v = values[k * n_sub + t];
                re.push(v.re);
                im.push(v.im);
            }
        }
    }
    let re = Matrix::new(users.len(), width, re)?;
    let im = Matrix::new(users.len(), width, im)?;
    let name: String = alloc::format!("area{area:02}");
    let ds = complex_to_real(name, &re, &im)?;
    match labels {
        None => Ok(ds),
        Some(LabelKind::Los) => ds.with_labels(users.iter().map(|u| u.los as Label).collect()),
        Some(LabelKind::Beam) => ds.with_labels(users.iter().map(|u| u.beam as Label).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SceneConfig {
        SceneConfig {
            grid_width: 20,
            grid_height: 12,
            bs_position: [10.0, -5.0],
            blockers: vec![Rect::new(4.0, 4.0, 8.0, 7.0)],
            tile_rows: 2,
            tile_cols: 2,
            seed: 11,
            ..SceneConfig::default()
        }
    }

    fn frob(v: &[Complex64]) -> f64 {
        v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn broadside_los_has_equal_antenna_entries() {
        let cfg = SceneConfig::default();
        let path = [Path { gain: 1e-3, delay: 1e-7, angle: 0.0 }];
        let h = synthesize(&cfg, &path);
        let n_sub = cfg.n_subcarriers;
        for s in 0..n_sub {
            for m in 1..cfg.n_bs_antennas {
                assert!((h[m * n_sub + s] - h[s]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn doubling_distance_halves_los_amplitude() {
        let cfg = SceneConfig { n_paths: 1, blockers: vec![], ..SceneConfig::default() };
        let bs = cfg.bs_position;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let near_pos = [57.0, 14.0];
        let far_pos = [64.0, 38.0];
        let near = user_paths(&cfg, near_pos, true, &mut rng);
        let far = user_paths(&cfg, far_pos, true, &mut rng);
        assert!((distance(bs, far_pos) - 2.0 * distance(bs, near_pos)).abs() < 1e-12);
        assert!((far[0].gain * 2.0 - near[0].gain).abs() < 1e-12 * near[0].gain);
        let (hn, hf) = (synthesize(&cfg, &near), synthesize(&cfg, &far));
        assert!((frob(&hf) * 2.0 - frob(&hn)).abs() < 1e-9 * frob(&hn));
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = small_config();
        assert_eq!(generate_scene(&cfg).unwrap(), generate_scene(&cfg).unwrap());
    }

    #[test]
    fn users_inside_blockers_are_excluded_and_los_matches_geometry() {
        let cfg = small_config();
        let scene = generate_scene(&cfg).unwrap();
        assert!(scene.users.iter().all(|u| !cfg.blockers[0].contains(u.position)));
        assert_eq!(scene.users.len(), 20 * 12 - 4 * 3);
        for u in &scene.users {
            let cut = cfg.blockers[0].intersects_segment(cfg.bs_position, u.position);
            assert_eq!(u.los, !cut);
            assert!(u.beam < cfg.n_bs_antennas);
            if !u.los {
                assert_eq!(u.paths.len(), cfg.n_paths - 1);
            }
        }
        assert!(scene.users.iter().any(|u| !u.los));
    }

    #[test]
    fn tiles_partition_the_grid() {
        let cfg = small_config();
        let scene = generate_scene(&cfg).unwrap();
        let counts = scene.area_counts();
        assert_eq!(counts.iter().sum::<usize>(), scene.users.len());
        assert!(counts.iter().all(|&c| c > 0));
        let bad = SceneConfig { tile_cols: 3, ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_path_at_codebook_angle_selects_that_beam() {
        let cfg = SceneConfig::default();
        let n = cfg.n_bs_antennas;
        for b in [0usize, 3, 7, 20, 31] {
            // sin θ = 2b/N, wrapped into [-1, 1)
            let mut st = 2.0 * b as f64 / n as f64;
            if st >= 1.0 {
                st -= 2.0;
            }
            let path = [Path { gain: 1.0, delay: 0.0, angle: libm::asin(st) }];
            let h = synthesize(&cfg, &path);
            let powers = beam_powers(&h, n, cfg.n_subcarriers);
            assert_eq!(best_beam(&h, n, cfg.n_subcarriers), b);
            let total: f64 = powers.iter().sum();
            assert!((powers[b] / total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn beam_choice_ignores_common_phase() {
        let cfg = small_config();
        let scene = generate_scene(&cfg).unwrap();
        let rot = Complex64::from_polar(1.0, 0.7);
        for u in scene.users.iter().take(30) {
            let rotated: Vec<Complex64> = u.channel.iter().map(|c| c * rot).collect();
            assert_eq!(best_beam(&rotated, 32, 32), u.beam);
        }
        assert_eq!(beam_labels(&scene).len(), scene.users.len());
    }

    #[test]
    fn angle_delay_is_unitary() {
        let scene = generate_scene(&small_config()).unwrap();
        for u in scene.users.iter().take(10) {
            let ad = angle_delay(&u.channel, 32, 32);
            assert!((frob(&ad) - frob(&u.channel)).abs() < 1e-9 * frob(&u.channel).max(1e-300) + 1e-18);
        }
    }

    #[test]
    fn dataset_dimensions_and_labels() {
        let scene = generate_scene(&small_config()).unwrap();
        let ad = channels_to_dataset(&scene, 0, Preprocess::AngleDelay, Some(LabelKind::Beam)).unwrap();
        assert_eq!(ad.dim(), 1024);
        let raw = channels_to_dataset(&scene, 1, Preprocess::Raw, Some(LabelKind::Los)).unwrap();
        assert_eq!(raw.dim(), 2048);
        assert!(raw.labels().unwrap().iter().all(|&l| l == 0 || l == 1));
        assert!(channels_to_dataset(&scene, 4, Preprocess::Raw, None).is_err());
    }

    #[test]
    fn empty_area_is_an_error() {
        let cfg = SceneConfig {
            blockers: vec![Rect::new(0.0, 0.0, 10.0, 6.0)],
            ..small_config()
        };
        let scene = generate_scene(&cfg).unwrap();
        assert_eq!(
            channels_to_dataset(&scene, 0, Preprocess::Raw, None).unwrap_err(),
            Error::EmptyArea(0)
        );
    }

    #[test]
    fn trimming_keeps_most_energy() {
        let scene = generate_scene(&small_config()).unwrap();
        let (mut kept, mut total) = (0.0, 0.0);
        for u in &scene.users {
            let ad = angle_delay(&u.channel, 32, 32);
            for k in 0..32 {
                for t in 0..32 {
                    let e = ad[k * 32 + t].norm_sqr();
                    total += e;
                    if t < 16 {
                        kept += e;
                    }
                }
            }
        }
        assert!(kept / total >= 0.99, "{}", kept / total);
    }

    #[test]
    fn segment_rectangle_intersection() {
        let r = Rect::new(1.0, 1.0, 2.0, 2.0);
        assert!(r.intersects_segment([0.0, 0.0], [3.0, 3.0]));
        assert!(!r.intersects_segment([0.0, 0.0], [3.0, 0.5]));
        assert!(!r.intersects_segment([0.0, 0.0], [0.5, 0.5]));
        assert!(r.intersects_segment([1.5, 0.0], [1.5, 5.0]));
    }
}
