//! Array geometry, steering vectors, and random multipath channel
//! generation.
//!
//! The array is a half-wavelength uniform linear array with an odd number of
//! antennas `N_t = 2N + 1`, indexed symmetrically by `n ∈ {−N, …, N}` with
//! the reference antenna at `n = 0`. A radiation source at distance `r` and
//! angle sine `Ω` induces the exact per-antenna phase profile of
//! [`steering_exact`]; within the Fresnel validity region the profile is
//! quadratic in `n` and is captured by the surrogate-distance form of
//! [`steering_surrogate`].

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;
use thiserror::Error;

/// A multipath channel vector, one complex coefficient per antenna in
/// ascending index order.
pub type Channel = Vec<Complex64>;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("array requires n_half >= 1 and wavelength > 0")]
    InvalidArray,
    #[error("path range {range} m is below the validity bound {bound} m")]
    FresnelBoundViolation { range: f64, bound: f64 },
    #[error("channel needs at least one path")]
    EmptyPathList,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

/// Uniform linear array with `n_t = 2 * n_half + 1` antennas at
/// half-wavelength spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    n_half: usize,
    wavelength: f64,
}

impl ArrayConfig {
    pub fn new(n_half: usize, wavelength: f64) -> Result<Self, ChannelError> {
        if n_half == 0 || !(wavelength > 0.0) {
            return Err(ChannelError::InvalidArray);
        }
        Ok(Self { n_half, wavelength })
    }

    /// Largest antenna index `N`; indices run over `{−N, …, N}`.
    pub fn n_half(&self) -> i64 {
        self.n_half as i64
    }

    /// Number of antennas `N_t = 2N + 1` (always odd).
    pub fn n_t(&self) -> usize {
        2 * self.n_half + 1
    }

    pub fn n_t_f(&self) -> f64 {
        self.n_t() as f64
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Shortest range at which the quadratic phase model is trusted:
    /// `0.5 * sqrt(N^3 λ^2)`.
    pub fn fresnel_bound(&self) -> f64 {
        let n = self.n_half as f64;
        0.5 * (n.powi(3) * self.wavelength * self.wavelength).sqrt()
    }

    /// Signed antenna indices in storage order.
    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -(self.n_half as i64)..=(self.n_half as i64)
    }
}

/// One propagation path: complex gain `g`, angle sine `Ω`, range `r` in
/// meters from the array center.
#[derive(Debug, Clone, Copy)]
pub struct PathParams {
    pub gain: Complex64,
    pub omega: f64,
    pub range: f64,
}

impl PathParams {
    /// Checks `|Ω| ≤ 1` and the Fresnel validity bound for this array.
    pub fn validate(&self, cfg: &ArrayConfig) -> Result<(), ChannelError> {
        if !(self.omega.abs() <= 1.0) {
            return Err(ChannelError::InvalidScenario(format!(
                "path angle sine {} outside [-1, 1]",
                self.omega
            )));
        }
        let bound = cfg.fresnel_bound();
        if !(self.range >= bound) {
            return Err(ChannelError::FresnelBoundViolation {
                range: self.range,
                bound,
            });
        }
        Ok(())
    }
}

/// A point in the `(Ω, b)` plane.
///
/// For physical paths `b = λ(1 − Ω²)/(4r) ≥ 0`; codewords may carry negative
/// `b` to shape their coverage, so no sign constraint is enforced here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateCoords {
    pub omega: f64,
    pub b: f64,
}

/// Maps a physical path to its `(Ω, b)` surrogate coordinates.
pub fn to_surrogate(path: &PathParams, wavelength: f64) -> SurrogateCoords {
    SurrogateCoords {
        omega: path.omega,
        b: wavelength * (1.0 - path.omega * path.omega) / (4.0 * path.range),
    }
}

/// Inverse of [`to_surrogate`]: recovers the range from `(Ω, b)` for `b > 0`.
pub fn surrogate_range(omega: f64, b: f64, wavelength: f64) -> f64 {
    wavelength * (1.0 - omega * omega) / (4.0 * b)
}

/// Exact distance from the source described by `path` to antenna `n`.
pub fn exact_distance(cfg: &ArrayConfig, path: &PathParams, n: i64) -> f64 {
    let lambda = cfg.wavelength();
    let r = path.range;
    let nf = n as f64;
    (r * r + nf * nf * lambda * lambda / 4.0 - nf * r * path.omega * lambda).sqrt()
}

/// Quadratic (Fresnel) approximation of [`exact_distance`]:
/// `r − nΩλ/2 + n²λ²(1 − Ω²)/(8r)`.
pub fn approx_distance(cfg: &ArrayConfig, path: &PathParams, n: i64) -> Result<f64, ChannelError> {
    let bound = cfg.fresnel_bound();
    if !(path.range >= bound) {
        return Err(ChannelError::FresnelBoundViolation {
            range: path.range,
            bound,
        });
    }
    let lambda = cfg.wavelength();
    let r = path.range;
    let nf = n as f64;
    Ok(r - nf * path.omega * lambda / 2.0
        + nf * nf * lambda * lambda * (1.0 - path.omega * path.omega) / (8.0 * r))
}

/// A unit-norm per-antenna phase profile; entries are stored in ascending
/// antenna index order and each has modulus `1/sqrt(N_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
}

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at signed antenna index `n`.
    pub fn entry(&self, n: i64) -> Complex64 {
        let half = (self.entries.len() as i64 - 1) / 2;
        self.entries[(n + half) as usize]
    }

    /// Hermitian inner product `self^H other`.
    pub fn inner(&self, other: &SteeringVector) -> Complex64 {
        crate::probe::inner(&self.entries, &other.entries)
    }
}

/// Exact steering vector: entry `n` is `exp(−j 2π/λ (r^(n) − r)) / sqrt(N_t)`.
///
/// Valid in both the near and far fields; `gain` plays no role here.
pub fn steering_exact(cfg: &ArrayConfig, omega: f64, range: f64) -> SteeringVector {
    let norm = 1.0 / cfg.n_t_f().sqrt();
    let lambda = cfg.wavelength();
    let path = PathParams {
        gain: Complex64::new(1.0, 0.0),
        omega,
        range,
    };
    let entries = cfg
        .indices()
        .map(|n| {
            let phase = -2.0 * PI / lambda * (exact_distance(cfg, &path, n) - range);
            Complex64::from_polar(norm, phase)
        })
        .collect();
    SteeringVector { entries }
}

/// Surrogate-distance steering vector: entry `n` is
/// `exp(jπ(Ωn − b n²)) / sqrt(N_t)`.
///
/// With `b = 0` this reduces to the far-field planar-wave profile.
pub fn steering_surrogate(cfg: &ArrayConfig, coords: SurrogateCoords) -> SteeringVector {
    let norm = 1.0 / cfg.n_t_f().sqrt();
    let entries = cfg
        .indices()
        .map(|n| {
            let nf = n as f64;
            let phase = PI * (coords.omega * nf - coords.b * nf * nf);
            Complex64::from_polar(norm, phase)
        })
        .collect();
    SteeringVector { entries }
}

/// Multipath channel `h = Σ_l g_l α(Ω_l, r_l)`.
pub fn assemble_channel(cfg: &ArrayConfig, paths: &[PathParams]) -> Result<Channel, ChannelError> {
    if paths.is_empty() {
        return Err(ChannelError::EmptyPathList);
    }
    let mut h = vec![Complex64::ZERO; cfg.n_t()];
    for path in paths {
        let alpha = steering_exact(cfg, path.omega, path.range);
        for (acc, &a) in h.iter_mut().zip(alpha.entries()) {
            *acc += path.gain * a;
        }
    }
    Ok(h)
}

/// Random-channel scenario. Path 0 is the line-of-sight path; the remaining
/// entries of `gain_stds` describe scattered paths.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Per-path gain standard deviations `δ_l`; the path count is the length.
    pub gain_stds: Vec<f64>,
    /// Angle-sine interval the paths are drawn from, `min ≤ max`.
    pub omega_range: (f64, f64),
    /// Range interval in meters the paths are drawn from.
    pub range_interval_m: (f64, f64),
}

impl Scenario {
    pub fn validate(&self, cfg: &ArrayConfig) -> Result<(), ChannelError> {
        if self.gain_stds.is_empty() {
            return Err(ChannelError::InvalidScenario(
                "at least one path is required".into(),
            ));
        }
        if self.gain_stds.iter().any(|&d| !(d > 0.0)) {
            return Err(ChannelError::InvalidScenario(
                "gain standard deviations must be positive".into(),
            ));
        }
        let (om_lo, om_hi) = self.omega_range;
        if !(om_lo <= om_hi) || om_lo < -1.0 || om_hi > 1.0 {
            return Err(ChannelError::InvalidScenario(format!(
                "angle-sine interval [{om_lo}, {om_hi}] must be ordered and within [-1, 1]"
            )));
        }
        let (r_lo, r_hi) = self.range_interval_m;
        if !(r_lo <= r_hi) {
            return Err(ChannelError::InvalidScenario(format!(
                "range interval [{r_lo}, {r_hi}] is inverted"
            )));
        }
        if !(r_hi >= cfg.fresnel_bound()) {
            return Err(ChannelError::InvalidScenario(format!(
                "range interval [{r_lo}, {r_hi}] lies entirely below the validity bound {}",
                cfg.fresnel_bound()
            )));
        }
        Ok(())
    }
}

/// Draws a random multipath channel and returns it together with the ground
/// truth paths used to score estimators.
///
/// Angles are uniform over the configured interval; ranges are uniform over
/// the configured interval with draws below the Fresnel validity bound
/// rejected and redrawn; gains are circularly symmetric complex Gaussian
/// with the configured per-path standard deviations. A fixed RNG state
/// yields a bitwise-identical draw sequence.
pub fn sample_channel<R: Rng + ?Sized>(
    cfg: &ArrayConfig,
    scenario: &Scenario,
    rng: &mut R,
) -> Result<(Channel, Vec<PathParams>), ChannelError> {
    scenario.validate(cfg)?;
    let bound = cfg.fresnel_bound();
    let (om_lo, om_hi) = scenario.omega_range;
    let (r_lo, r_hi) = scenario.range_interval_m;
    let mut paths = Vec::with_capacity(scenario.gain_stds.len());
    for &std_dev in &scenario.gain_stds {
        let omega = if om_lo == om_hi {
            om_lo
        } else {
            rng.random_range(om_lo..=om_hi)
        };
        let range = loop {
            let r = if r_lo == r_hi {
                r_lo
            } else {
                rng.random_range(r_lo..=r_hi)
            };
            if r >= bound {
                break r;
            }
        };
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let gain = Complex64::new(re, im) * (std_dev / 2f64.sqrt());
        paths.push(PathParams { gain, omega, range });
    }
    let channel = assemble_channel(cfg, &paths)?;
    Ok((channel, paths))
}
