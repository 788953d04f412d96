//! Hybrid-field beam gain (HFBG) analysis.
//!
//! For a codeword `u = γ(Θ, k)` and a target at `(Ω, b)` the HFBG is
//! `G(u, Ω, b) = N_t γ(Ω, b)^H u = Σ_n exp(jπ((Θ−Ω)n + (b−k)n²))`. The
//! principle of stationary phase (PSP) approximates the sum with a trapezoid
//! coverage region in the `(Ω, b)` plane, a flat magnitude `1/sqrt(|b−k|)`
//! inside it, and a quadratic phase. The module also carries the
//! Fresnel-integral coherence of codewords that are adjacent in surrogate
//! distance, used to calibrate neighboring-search step sizes.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::channel::{ArrayConfig, SurrogateCoords};
use crate::fresnel::fresnel;

#[derive(Debug, Error)]
pub enum GainError {
    #[error("codeword and target share the same quadratic coefficient")]
    DegenerateQuadratic,
    #[error("target coherence is outside the range achievable on the search interval")]
    NoBracket,
}

/// Parameters `(Θ, k)` of a surrogate-domain codeword `γ(Θ, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodewordParams {
    pub theta: f64,
    pub k: f64,
}

impl CodewordParams {
    pub fn new(theta: f64, k: f64) -> Self {
        Self { theta, k }
    }

    pub fn coords(&self) -> SurrogateCoords {
        SurrogateCoords {
            omega: self.theta,
            b: self.k,
        }
    }
}

/// One beam-gain evaluation. `magnitude` always equals `|value|`;
/// `unwrapped_phase` carries the analytic PSP phase when one is available.
#[derive(Debug, Clone, Copy)]
pub struct BeamGainSample {
    pub value: Complex64,
    pub magnitude: f64,
    pub unwrapped_phase: Option<f64>,
}

impl BeamGainSample {
    fn from_value(value: Complex64) -> Self {
        Self {
            value,
            magnitude: value.norm(),
            unwrapped_phase: None,
        }
    }
}

/// Exact HFBG by direct summation over the antenna indices.
pub fn hfbg_exact(
    cfg: &ArrayConfig,
    codeword: CodewordParams,
    target: SurrogateCoords,
) -> BeamGainSample {
    let d_theta = codeword.theta - target.omega;
    let d_b = target.b - codeword.k;
    let mut acc = Complex64::ZERO;
    for n in cfg.indices() {
        let nf = n as f64;
        acc += Complex64::from_polar(1.0, PI * (d_theta * nf + d_b * nf * nf));
    }
    BeamGainSample::from_value(acc)
}

/// Stationary phase `z₀ = (Ω − Θ) / (2(b − k))` of the HFBG integrand.
pub fn stationary_point(
    codeword: CodewordParams,
    target: SurrogateCoords,
) -> Result<f64, GainError> {
    let d_b = target.b - codeword.k;
    if d_b.abs() < 1e-15 {
        return Err(GainError::DegenerateQuadratic);
    }
    Ok((target.omega - codeword.theta) / (2.0 * d_b))
}

/// PSP approximation of the HFBG.
///
/// Inside the coverage region (`|z₀| ≤ N_t/2`) the magnitude is
/// `1/sqrt(|b−k|)` and the phase is `π(Ω−Θ)²/(4(k−b)) − π/4` with a signed
/// denominator; outside, the gain is zero. The constant phase offset is
/// immaterial downstream, where fits absorb it.
pub fn hfbg_psp(
    cfg: &ArrayConfig,
    codeword: CodewordParams,
    target: SurrogateCoords,
) -> Result<BeamGainSample, GainError> {
    let z0 = stationary_point(codeword, target)?;
    if z0.abs() <= cfg.n_t_f() / 2.0 {
        let d_theta = target.omega - codeword.theta;
        let magnitude = 1.0 / (target.b - codeword.k).abs().sqrt();
        let phase = PI * d_theta * d_theta / (4.0 * (codeword.k - target.b)) - PI / 4.0;
        Ok(BeamGainSample {
            value: Complex64::from_polar(magnitude, phase),
            magnitude,
            unwrapped_phase: Some(phase),
        })
    } else {
        Ok(BeamGainSample {
            value: Complex64::ZERO,
            magnitude: 0.0,
            unwrapped_phase: Some(0.0),
        })
    }
}

/// Beam coverage of a codeword: the closed trapezoid
/// `|Ω − Θ| ≤ N_t |b − k|` in the `(Ω, b)` plane.
#[derive(Debug, Clone, Copy)]
pub struct CoverageRegion {
    pub theta: f64,
    pub k: f64,
    pub slope_bound: f64,
}

impl CoverageRegion {
    pub fn new(cfg: &ArrayConfig, codeword: CodewordParams) -> Self {
        Self {
            theta: codeword.theta,
            k: codeword.k,
            slope_bound: cfg.n_t_f(),
        }
    }

    /// Membership test; the boundary belongs to the region.
    pub fn contains(&self, target: SurrogateCoords) -> bool {
        (target.omega - self.theta).abs() <= self.slope_bound * (target.b - self.k).abs()
    }

    /// Angle coverage width `2 N_t |b − k|` at a fixed `b`.
    pub fn acw(&self, b: f64) -> f64 {
        2.0 * self.slope_bound * (b - self.k).abs()
    }
}

/// Coherence of two codewords separated by `k_step` in surrogate distance:
/// `ρ = sqrt(2(C² + S²)/k_step) / N_t` with the Fresnel functions evaluated
/// at `sqrt(2 k_step) N`.
pub fn distance_coherence(cfg: &ArrayConfig, k_step: f64) -> f64 {
    let x = (2.0 * k_step).sqrt() * cfg.n_half() as f64;
    let (c, s) = fresnel(x);
    (2.0 * (c * c + s * s) / k_step).sqrt() / cfg.n_t_f()
}

/// Inverts [`distance_coherence`]: finds the `k_step` with the requested
/// coherence by bisection, to 1e-10 absolute.
pub fn invert_coherence(cfg: &ArrayConfig, rho_target: f64) -> Result<f64, GainError> {
    let (mut lo, mut hi) = (1e-12f64, 1e-2f64);
    if !(rho_target > 0.0 && rho_target < 1.0) {
        return Err(GainError::NoBracket);
    }
    let rho_lo = distance_coherence(cfg, lo);
    let rho_hi = distance_coherence(cfg, hi);
    if !(rho_target < rho_lo && rho_target > rho_hi) {
        return Err(GainError::NoBracket);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if distance_coherence(cfg, mid) > rho_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
