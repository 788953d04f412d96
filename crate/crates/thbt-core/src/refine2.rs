//! Second refinement: translated-coverage codebook, maximum-likelihood grid
//! estimator, and the closed-form stationary-phase estimator with phase
//! unwrapping.
//!
//! All `2·M₂ + 1` codewords share one quadratic coefficient `k̄₂` and step
//! through angles `Θ̃_m = m̄·Θ̄₁ + m·Θ̄₂`, so each coverage is a translate of
//! its neighbor. `k̄₂` is pushed far enough from the potential region that
//! (a) every codeword's coverage contains the whole region and (b) the phase
//! of consecutive conjugated measurements never jumps by more than π, which
//! makes one-dimensional unwrapping safe.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;
use thiserror::Error;

use crate::channel::{steering_surrogate, ArrayConfig, Channel, SteeringVector, SurrogateCoords};
use crate::gain::CodewordParams;
use crate::linalg::solve3;
use crate::probe::{measure_all, ProbeCounter};
use crate::refine1::{extend_region, region_update1, Refine1Config};

#[derive(Debug, Error)]
pub enum Refine2Error {
    #[error("search grid is empty")]
    EmptyGrid,
    #[error("codeword coverage does not contain the potential region")]
    CoverageViolation,
    #[error("normal equations are singular")]
    SingularSystem,
    #[error("fitted quadratic has no curvature")]
    ZeroCurvature,
}

/// Second-refinement design parameters.
#[derive(Debug, Clone, Copy)]
pub struct Refine2Config {
    /// Codebook half-size; the codebook holds `2·m2 + 1` codewords.
    pub m2: i64,
    /// Angle deviation `Θ̄₂` between adjacent codewords.
    pub theta_bar2: f64,
}

impl Refine2Config {
    pub fn new(m2: i64, theta_bar2: f64) -> Self {
        Self { m2, theta_bar2 }
    }
}

/// Unwrap-safety margin `B = Θ̄₂·(1/N_t + (b̄ − k̃₁)·N_t + M₂·Θ̄₂) / 2`;
/// keeping `k̄₂` at least this far outside `[0, b̄]` bounds consecutive phase
/// increments of the conjugated measurements by π.
pub fn unwrap_safety_margin(cfg: &ArrayConfig, r1: &Refine1Config, r2: &Refine2Config) -> f64 {
    let nt = cfg.n_t_f();
    r2.theta_bar2
        * (1.0 / nt + (r1.b_bar - r1.k_tilde1) * nt + r2.m2 as f64 * r2.theta_bar2)
        / 2.0
}

/// Quadratic coefficient `k̄₂` shared by the second-refinement codewords,
/// satisfying both the coverage-containment and unwrap-safety constraints
/// while staying as close to the physical region as allowed.
pub fn choose_k2(cfg: &ArrayConfig, r1: &Refine1Config, r2: &Refine2Config, m_bar: i64) -> f64 {
    let nt = cfg.n_t_f();
    let margin = unwrap_safety_margin(cfg, r1, r2);
    let coverage_term = r2.m2 as f64 * r2.theta_bar2 / nt + 1.0 / (nt * nt);
    let k1 = r1.pivot_k(m_bar);
    if m_bar.rem_euclid(2) == 0 {
        (-margin).min(k1 - coverage_term)
    } else {
        (r1.b_bar + margin).max(k1 + coverage_term)
    }
}

/// Codeword parameters `(Θ̃_m, k̄₂)` for `m = −M₂ … M₂`, verified to keep the
/// extended potential region inside every codeword's coverage.
pub fn build_codebook2(
    cfg: &ArrayConfig,
    r1: &Refine1Config,
    r2: &Refine2Config,
    m_bar: i64,
) -> Result<Vec<CodewordParams>, Refine2Error> {
    let k2 = choose_k2(cfg, r1, r2, m_bar);
    let nt = cfg.n_t_f();
    let region = extend_region(region_update1(cfg, r1, m_bar));
    // Both sides of the containment inequality are linear in b on [0, b̄]
    // because the pivots sit outside the interval, so endpoint checks are
    // exact up to rounding.
    for b in [0.0, r1.b_bar] {
        let region_half_width = region.slope * ((b - region.pivot_k).abs() + region.widening);
        let needed = region_half_width + r2.m2 as f64 * r2.theta_bar2;
        let available = nt * (b - k2).abs();
        if needed > available + 1e-9 {
            return Err(Refine2Error::CoverageViolation);
        }
    }
    let center = m_bar as f64 * r1.theta_bar1;
    Ok((-r2.m2..=r2.m2)
        .map(|m| CodewordParams::new(center + m as f64 * r2.theta_bar2, k2))
        .collect())
}

/// Probes every codeword of the second-refinement codebook in order.
pub fn train_stage2<R: Rng + ?Sized>(
    channel: &Channel,
    codebook: &[SteeringVector],
    noise_var: f64,
    rng: &mut R,
    counter: &mut ProbeCounter,
) -> Vec<Complex64> {
    measure_all(channel, codebook, noise_var, rng, counter)
}

/// Rectangular search grid for the maximum-likelihood estimator.
#[derive(Debug, Clone)]
pub struct SearchGrid {
    pub omegas: Vec<f64>,
    pub bs: Vec<f64>,
}

impl SearchGrid {
    /// Uniform grid over `[center − half_width, center + half_width] × [0, b_max]`.
    pub fn over_region(
        center: f64,
        half_width: f64,
        b_max: f64,
        n_omega: usize,
        n_b: usize,
    ) -> Self {
        let omegas = (0..n_omega)
            .map(|i| center - half_width + 2.0 * half_width * i as f64 / (n_omega - 1) as f64)
            .collect();
        let bs = (0..n_b)
            .map(|j| b_max * j as f64 / (n_b - 1) as f64)
            .collect();
        Self { omegas, bs }
    }
}

/// Maximum-likelihood estimate of `(Ω, b)` by exhaustive grid search of
/// `|ȳ^H Γ^H γ(Ω, b)| / ‖Γ^H γ(Ω, b)‖` with the path gain profiled out.
///
/// Reference implementation; [`MlSearchGrid`] computes the same objective
/// with the measurement-independent factors precomputed.
pub fn estimate_ml(
    cfg: &ArrayConfig,
    measurements: &[Complex64],
    codebook: &[CodewordParams],
    grid: &SearchGrid,
) -> Result<(f64, f64), Refine2Error> {
    if grid.omegas.is_empty() || grid.bs.is_empty() {
        return Err(Refine2Error::EmptyGrid);
    }
    let vectors: Vec<SteeringVector> = codebook
        .iter()
        .map(|cw| steering_surrogate(cfg, cw.coords()))
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (i, &omega) in grid.omegas.iter().enumerate() {
        for (j, &b) in grid.bs.iter().enumerate() {
            let gamma = steering_surrogate(cfg, SurrogateCoords { omega, b });
            let mut numerator = Complex64::ZERO;
            let mut denominator = 0.0;
            for (w, &y) in vectors.iter().zip(measurements) {
                let v = w.inner(&gamma);
                numerator += y * v;
                denominator += v.norm_sqr();
            }
            if denominator <= 0.0 {
                continue;
            }
            let objective = numerator.norm_sqr() / denominator;
            if objective > best.0 {
                best = (objective, i, j);
            }
        }
    }
    Ok((grid.omegas[best.1], grid.bs[best.2]))
}

/// Grid search for the ML objective with the codeword Gram factors
/// precomputed.
///
/// The codebook angles enter the objective only through offsets from the
/// codebook center, so the denominator field `‖Γ^H γ‖` over a grid expressed
/// in center-relative angle offsets does not depend on the trial at all.
/// One instance therefore serves every trial that shares `(k̄₂, Θ̄₂, M₂)`
/// and the relative grid.
#[derive(Debug, Clone)]
pub struct MlSearchGrid {
    omega_offsets: Vec<f64>,
    bs: Vec<f64>,
    theta_bar2: f64,
    m2: i64,
    n_t: usize,
    /// `exp(jπ δ_i n)` for every offset, row-major `[i][n]`.
    offset_table: Vec<Complex64>,
    /// `exp(−jπ (b_j − k̄₂) n²)` for every b, row-major `[j][n]`.
    chirp_table: Vec<Complex64>,
    /// `‖Γ^H γ‖²` at each `(i, j)` grid node.
    denom: Vec<f64>,
}

impl MlSearchGrid {
    pub fn new(
        cfg: &ArrayConfig,
        k2: f64,
        r2: &Refine2Config,
        omega_half_width: f64,
        b_max: f64,
        n_omega: usize,
        n_b: usize,
    ) -> Self {
        let n_t = cfg.n_t();
        let omega_offsets: Vec<f64> = (0..n_omega)
            .map(|i| -omega_half_width + 2.0 * omega_half_width * i as f64 / (n_omega - 1) as f64)
            .collect();
        let bs: Vec<f64> = (0..n_b)
            .map(|j| b_max * j as f64 / (n_b - 1) as f64)
            .collect();

        let mut offset_table = Vec::with_capacity(n_omega * n_t);
        for &delta in &omega_offsets {
            for n in cfg.indices() {
                offset_table.push(Complex64::from_polar(1.0, PI * delta * n as f64));
            }
        }
        let mut chirp_table = Vec::with_capacity(n_b * n_t);
        for &b in &bs {
            for n in cfg.indices() {
                let nf = n as f64;
                chirp_table.push(Complex64::from_polar(1.0, -PI * (b - k2) * nf * nf));
            }
        }

        // Denominator field: sum over codewords of |v_m|² with
        // v_m(δ, b) = (1/N_t) Σ_n exp(jπ(δ − mΘ̄₂)n) exp(−jπ(b − k̄₂)n²).
        let scale = 1.0 / cfg.n_t_f();
        let mut denom = vec![0.0; n_omega * n_b];
        let mut twiddle = Vec::with_capacity(n_t);
        let mut row = vec![Complex64::ZERO; n_t];
        for m in -r2.m2..=r2.m2 {
            twiddle.clear();
            for n in cfg.indices() {
                twiddle.push(Complex64::from_polar(
                    1.0,
                    -PI * m as f64 * r2.theta_bar2 * n as f64,
                ));
            }
            for j in 0..n_b {
                let chirp = &chirp_table[j * n_t..(j + 1) * n_t];
                for (r, (&t, &c)) in row.iter_mut().zip(twiddle.iter().zip(chirp)) {
                    *r = t * c;
                }
                for i in 0..n_omega {
                    let offsets = &offset_table[i * n_t..(i + 1) * n_t];
                    let v: Complex64 = row.iter().zip(offsets).map(|(&r, &u)| r * u).sum();
                    denom[i * n_b + j] += (scale * v).norm_sqr();
                }
            }
        }

        Self {
            omega_offsets,
            bs,
            theta_bar2: r2.theta_bar2,
            m2: r2.m2,
            n_t,
            offset_table,
            chirp_table,
            denom,
        }
    }

    /// Runs the search for one trial's measurements; `center_theta` is the
    /// codebook center `m̄·Θ̄₁` the offsets are relative to.
    pub fn search(&self, cfg: &ArrayConfig, center_theta: f64, measurements: &[Complex64]) -> (f64, f64) {
        debug_assert_eq!(measurements.len(), (2 * self.m2 + 1) as usize);
        let n_t = self.n_t;
        let scale = 1.0 / cfg.n_t_f();
        // q_n = (1/N_t) Σ_m y_m exp(−jπ m Θ̄₂ n); the codebook center phase
        // cancels between the measurement stack and the probe vector.
        let mut q = vec![Complex64::ZERO; n_t];
        for (idx, &y) in measurements.iter().enumerate() {
            let m = idx as i64 - self.m2;
            for (n_idx, n) in cfg.indices().enumerate() {
                let tw = Complex64::from_polar(1.0, -PI * m as f64 * self.theta_bar2 * n as f64);
                q[n_idx] += y * tw;
            }
        }
        for qn in &mut q {
            *qn *= scale;
        }

        let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
        let mut row = vec![Complex64::ZERO; n_t];
        for (j, _) in self.bs.iter().enumerate() {
            let chirp = &self.chirp_table[j * n_t..(j + 1) * n_t];
            for (r, (&qn, &c)) in row.iter_mut().zip(q.iter().zip(chirp)) {
                *r = qn * c;
            }
            for (i, _) in self.omega_offsets.iter().enumerate() {
                let offsets = &self.offset_table[i * n_t..(i + 1) * n_t];
                let num: Complex64 = row.iter().zip(offsets).map(|(&r, &u)| r * u).sum();
                let den = self.denom[i * self.bs.len() + j];
                if den <= 0.0 {
                    continue;
                }
                let objective = num.norm_sqr() / den;
                if objective > best.0 {
                    best = (objective, i, j);
                }
            }
        }
        (center_theta + self.omega_offsets[best.1], self.bs[best.2])
    }

    /// Grid nodes expressed around an arbitrary center, for oracle checks.
    pub fn absolute_grid(&self, center_theta: f64) -> SearchGrid {
        SearchGrid {
            omegas: self.omega_offsets.iter().map(|d| center_theta + d).collect(),
            bs: self.bs.clone(),
        }
    }

    pub fn grid_spacing(&self) -> (f64, f64) {
        let d_omega = if self.omega_offsets.len() > 1 {
            self.omega_offsets[1] - self.omega_offsets[0]
        } else {
            0.0
        };
        let d_b = if self.bs.len() > 1 { self.bs[1] - self.bs[0] } else { 0.0 };
        (d_omega, d_b)
    }
}

/// Wrapped and unwrapped phase of a conjugated measurement sequence.
#[derive(Debug, Clone)]
pub struct PhaseSeries {
    /// Phases of `ȳ*_m` in `(−π, π]`.
    pub wrapped: Vec<f64>,
    /// Accumulated phases; the first entry equals the first wrapped phase
    /// and consecutive differences lie in `(−π, π]`.
    pub unwrapped: Vec<f64>,
}

/// One-dimensional phase unwrapping of the conjugated measurements:
/// each step adds the wrapped difference mapped into `(−π, π]`.
pub fn unwrap_phases(measurements: &[Complex64]) -> PhaseSeries {
    let wrapped: Vec<f64> = measurements.iter().map(|y| y.conj().arg()).collect();
    let mut unwrapped = Vec::with_capacity(wrapped.len());
    if let Some(&first) = wrapped.first() {
        unwrapped.push(first);
    }
    for i in 1..wrapped.len() {
        let delta = PI - (PI - (wrapped[i] - wrapped[i - 1])).rem_euclid(2.0 * PI);
        let prev = unwrapped[i - 1];
        unwrapped.push(prev + delta);
    }
    PhaseSeries { wrapped, unwrapped }
}

/// Closed-form stationary-phase estimate: fits the unwrapped phases with a
/// quadratic in the codeword angle by solving the 3×3 normal equations, then
/// maps the quadratic coefficients back to `(Ω̂₂, b̂₂)`.
///
/// The angles are centered internally before forming moments; the shift is
/// absorbed by the constant term and undone on the way out.
pub fn estimate_psp(
    series: &PhaseSeries,
    angles: &[f64],
    k2: f64,
) -> Result<(f64, f64), Refine2Error> {
    let phases = &series.unwrapped;
    if angles.len() != phases.len() || angles.len() < 3 {
        return Err(Refine2Error::SingularSystem);
    }
    let center: f64 = angles.iter().sum::<f64>() / angles.len() as f64;
    let mut s = [0.0f64; 5];
    let mut r = [0.0f64; 3];
    for (&theta, &u) in angles.iter().zip(phases) {
        let t = theta - center;
        let t2 = t * t;
        s[0] += 1.0;
        s[1] += t;
        s[2] += t2;
        s[3] += t2 * t;
        s[4] += t2 * t2;
        r[0] -= u * t2;
        r[1] -= u * t;
        r[2] -= u;
    }
    let matrix = [[s[4], s[3], s[2]], [s[3], s[2], s[1]], [s[2], s[1], s[0]]];
    let sol = solve3(matrix, r, 1e-12).ok_or(Refine2Error::SingularSystem)?;
    let (alpha, beta) = (sol[0], sol[1]);
    if alpha.abs() < 1e-12 {
        return Err(Refine2Error::ZeroCurvature);
    }
    let b = -PI / (4.0 * alpha) + k2;
    let omega = -beta / (2.0 * alpha) + center;
    Ok((omega, b))
}
