//! First refinement: trapezoid tiling of the `(Ω, b)` plane, beam training,
//! and the potential-region update.
//!
//! The codebook places `2·M₁ + 1` codewords at angles `m·Θ̄₁` with the
//! quadratic coefficient alternating between `k̃₁ < 0` (even `m`) and
//! `b̄ − k̃₁` (odd `m`), where `Θ̄₁ = (b̄ − 2k̃₁)·N_t`. Adjacent coverages
//! then tile the initial region `[−Ω̄, Ω̄] × [0, b̄]` without overlap.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::channel::{ArrayConfig, Channel, SteeringVector, SurrogateCoords};
use crate::gain::CodewordParams;
use crate::probe::{measure_all, ProbeCounter};

#[derive(Debug, Error)]
pub enum Refine1Error {
    #[error("invalid first-refinement configuration: {0}")]
    InvalidConfig(String),
}

/// First-refinement design parameters.
#[derive(Debug, Clone, Copy)]
pub struct Refine1Config {
    /// Angle half-extent `Ω̄` of the initial region.
    pub omega_bar: f64,
    /// Surrogate-distance extent `b̄` of the initial region.
    pub b_bar: f64,
    /// Coverage-control parameter `k̃₁ < 0`.
    pub k_tilde1: f64,
    /// Angle deviation `Θ̄₁ = (b̄ − 2k̃₁)·N_t` between adjacent codewords.
    pub theta_bar1: f64,
    /// Codebook half-size; the codebook holds `2·m1 + 1` codewords.
    pub m1: i64,
}

impl Refine1Config {
    pub fn new(
        cfg: &ArrayConfig,
        omega_bar: f64,
        b_bar: f64,
        k_tilde1: f64,
    ) -> Result<Self, Refine1Error> {
        if !(k_tilde1 < 0.0) {
            return Err(Refine1Error::InvalidConfig("k_tilde1 must be negative".into()));
        }
        if !(b_bar > 0.0) {
            return Err(Refine1Error::InvalidConfig("b_bar must be positive".into()));
        }
        if !(omega_bar > 0.0 && omega_bar <= 1.0) {
            return Err(Refine1Error::InvalidConfig(
                "omega_bar must lie in (0, 1]".into(),
            ));
        }
        let m1 = design_m1(cfg, omega_bar, b_bar, k_tilde1)?;
        Ok(Self {
            omega_bar,
            b_bar,
            k_tilde1,
            theta_bar1: (b_bar - 2.0 * k_tilde1) * cfg.n_t_f(),
            m1,
        })
    }

    /// Quadratic coefficient `k̄₁(m)` of codeword `m`: `k̃₁` for even `m`,
    /// `b̄ − k̃₁` for odd `m`.
    pub fn pivot_k(&self, m: i64) -> f64 {
        if m.rem_euclid(2) == 0 {
            self.k_tilde1
        } else {
            self.b_bar - self.k_tilde1
        }
    }

    pub fn codeword(&self, m: i64) -> CodewordParams {
        CodewordParams::new(m as f64 * self.theta_bar1, self.pivot_k(m))
    }
}

/// Value of the codebook-size bound `(Ω̄ + N_t·k̃₁)/Θ̄₁`; `m1` is the
/// smallest integer strictly above it.
pub fn design_bound(cfg: &ArrayConfig, omega_bar: f64, b_bar: f64, k_tilde1: f64) -> f64 {
    let theta_bar1 = (b_bar - 2.0 * k_tilde1) * cfg.n_t_f();
    (omega_bar + cfg.n_t_f() * k_tilde1) / theta_bar1
}

/// Smallest codebook half-size that covers the initial region, clamped to at
/// least one.
pub fn design_m1(
    cfg: &ArrayConfig,
    omega_bar: f64,
    b_bar: f64,
    k_tilde1: f64,
) -> Result<i64, Refine1Error> {
    let theta_bar1 = (b_bar - 2.0 * k_tilde1) * cfg.n_t_f();
    if !(theta_bar1 > 0.0) {
        return Err(Refine1Error::InvalidConfig(format!(
            "angle deviation {theta_bar1} must be positive"
        )));
    }
    let bound = design_bound(cfg, omega_bar, b_bar, k_tilde1);
    Ok(((bound.floor() as i64) + 1).max(1))
}

/// Codeword parameters of the full first-refinement codebook in ascending
/// `m` order; steering vectors are materialized on demand.
pub fn build_codebook1(r1: &Refine1Config) -> Vec<CodewordParams> {
    (-r1.m1..=r1.m1).map(|m| r1.codeword(m)).collect()
}

/// Probes every codeword and returns the winning index `m̄ ∈ [−M₁, M₁]`
/// together with the raw measurements. Ties resolve to the smallest index.
pub fn train_stage1<R: Rng + ?Sized>(
    channel: &Channel,
    codebook: &[SteeringVector],
    noise_var: f64,
    rng: &mut R,
    counter: &mut ProbeCounter,
) -> (i64, Vec<Complex64>) {
    let measurements = measure_all(channel, codebook, noise_var, rng, counter);
    let mut best = 0usize;
    for (idx, y) in measurements.iter().enumerate() {
        if y.norm() > measurements[best].norm() {
            best = idx;
        }
    }
    let m1 = (codebook.len() as i64 - 1) / 2;
    (best as i64 - m1, measurements)
}

/// Trapezoidal potential region in the `(Ω, b)` plane:
/// `0 ≤ b ≤ b_max` and `|Ω − center| ≤ slope·(|b − pivot| + widening)`.
#[derive(Debug, Clone, Copy)]
pub struct PotentialRegion {
    pub center_theta: f64,
    pub pivot_k: f64,
    pub slope: f64,
    pub b_max: f64,
    /// Transition-zone inflation in the denominator units of the membership
    /// ratio; zero for the raw update, `1/N_t²` for the extended region.
    pub widening: f64,
}

impl PotentialRegion {
    pub fn contains(&self, target: SurrogateCoords) -> bool {
        target.b >= 0.0
            && target.b <= self.b_max
            && (target.omega - self.center_theta).abs()
                <= self.slope * ((target.b - self.pivot_k).abs() + self.widening)
    }

    /// Largest angular half-width of the region over `b ∈ [0, b_max]`.
    pub fn omega_half_width(&self) -> f64 {
        let extreme = self.pivot_k.abs().max((self.b_max - self.pivot_k).abs());
        self.slope * (extreme + self.widening)
    }
}

/// Region update after the first refinement picked codeword `m̄`: the
/// winner's coverage clipped to `b ∈ [0, b̄]`.
pub fn region_update1(cfg: &ArrayConfig, r1: &Refine1Config, m_bar: i64) -> PotentialRegion {
    PotentialRegion {
        center_theta: m_bar as f64 * r1.theta_bar1,
        pivot_k: r1.pivot_k(m_bar),
        slope: cfg.n_t_f(),
        b_max: r1.b_bar,
        widening: 0.0,
    }
}

/// Inflates a region by the transition-zone width `1/N_t` (denominator term
/// `1/N_t²`), so that paths near a coverage boundary stay inside.
pub fn extend_region(region: PotentialRegion) -> PotentialRegion {
    PotentialRegion {
        widening: region.widening + 1.0 / (region.slope * region.slope),
        ..region
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{assemble_channel, steering_surrogate, PathParams};
    use crate::gain::CoverageRegion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg256() -> ArrayConfig {
        ArrayConfig::new(256, 0.005).unwrap()
    }

    fn example1(cfg: &ArrayConfig) -> Refine1Config {
        Refine1Config::new(cfg, 3f64.sqrt() / 2.0, 1.22e-4, -6.09e-5).unwrap()
    }

    #[test]
    fn design_bound_and_m1_match_reference_design() {
        let cfg = cfg256();
        let bound = design_bound(&cfg, 3f64.sqrt() / 2.0, 1.22e-4, -6.09e-5);
        assert!((bound - 6.68).abs() <= 0.02, "bound {bound}");
        assert_eq!(design_m1(&cfg, 3f64.sqrt() / 2.0, 1.22e-4, -6.09e-5).unwrap(), 7);
    }

    #[test]
    fn m1_is_strictly_above_the_bound() {
        let cfg = cfg256();
        let r1 = example1(&cfg);
        // Shrink the angle extent so the bound becomes exactly 1.5.
        let omega_bar = r1.theta_bar1 * 1.5 - cfg.n_t_f() * r1.k_tilde1;
        assert_eq!(design_m1(&cfg, omega_bar, r1.b_bar, r1.k_tilde1).unwrap(), 2);
        // An exactly-integer bound still rounds up (strict inequality).
        let omega_bar = r1.theta_bar1 * 2.0 - cfg.n_t_f() * r1.k_tilde1;
        assert_eq!(design_m1(&cfg, omega_bar, r1.b_bar, r1.k_tilde1).unwrap(), 3);
    }

    #[test]
    fn codebook_has_fifteen_codewords_in_reference_design() {
        let cfg = cfg256();
        let r1 = example1(&cfg);
        let codebook = build_codebook1(&r1);
        assert_eq!(codebook.len(), 15);
        // m = 0 sits at broadside with the negative pivot.
        assert_eq!(codebook[7], CodewordParams::new(0.0, -6.09e-5));
        // m = 1: theta = (b̄ − 2k̃₁)·N_t ≈ 0.12507, pivot b̄ − k̃₁ = 1.829e-4.
        let cw = codebook[8];
        assert!((cw.theta - 0.12507).abs() < 5e-6);
        assert!((cw.k - 1.829e-4).abs() < 1e-9);
    }

    #[test]
    fn adjacent_coverages_tile_without_gap_or_overlap() {
        let cfg = cfg256();
        let r1 = example1(&cfg);
        for m in -2..2 {
            let right = CoverageRegion::new(&cfg, r1.codeword(m));
            let left = CoverageRegion::new(&cfg, r1.codeword(m + 1));
            for i in 0..=20 {
                let b = r1.b_bar * i as f64 / 20.0;
                let right_edge = right.theta + cfg.n_t_f() * (b - right.k).abs();
                let left_edge = left.theta - cfg.n_t_f() * (b - left.k).abs();
                assert!(
                    (right_edge - left_edge).abs() < 1e-9,
                    "cells {m}/{} split at b = {b}",
                    m + 1
                );
            }
        }
    }

    #[test]
    fn codebook_tiles_initial_region_on_grid() {
        // Full coverage of [−Ω̄, Ω̄] × [0, b̄] with no interior
        // double-coverage on a 200×200 grid.
        let cfg = cfg256();
        let r1 = example1(&cfg);
        let regions: Vec<CoverageRegion> = build_codebook1(&r1)
            .into_iter()
            .map(|cw| CoverageRegion::new(&cfg, cw))
            .collect();
        for i in 0..200 {
            for j in 0..200 {
                let omega = -r1.omega_bar + 2.0 * r1.omega_bar * i as f64 / 199.0;
                let b = r1.b_bar * j as f64 / 199.0;
                let target = SurrogateCoords { omega, b };
                let hits = regions.iter().filter(|r| r.contains(target)).count();
                assert!(hits >= 1, "uncovered point ({omega}, {b})");
                if hits > 1 {
                    // Only shared cell boundaries may be double-counted.
                    let on_boundary = regions.iter().any(|r| {
                        ((omega - r.theta).abs() - cfg.n_t_f() * (b - r.k).abs()).abs() < 1e-6
                    });
                    assert!(hits == 2 && on_boundary, "interior overlap at ({omega}, {b})");
                }
            }
        }
    }

    fn vectors_for(cfg: &ArrayConfig, r1: &Refine1Config) -> Vec<SteeringVector> {
        build_codebook1(r1)
            .into_iter()
            .map(|cw| steering_surrogate(cfg, cw.coords()))
            .collect()
    }

    #[test]
    fn noiseless_training_finds_the_cell_containing_the_path() {
        let cfg = cfg256();
        let r1 = example1(&cfg);
        let vectors = vectors_for(&cfg, &r1);
        // A path well inside cell 3.
        let omega = 3.0 * r1.theta_bar1;
        let b = 6.0e-5;
        let path = PathParams {
            gain: Complex64::new(1.0, 0.0),
            omega,
            range: crate::channel::surrogate_range(omega, b, cfg.wavelength()),
        };
        let channel = assemble_channel(&cfg, &[path]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut counter = ProbeCounter::new();
        let (m_bar, _) = train_stage1(&channel, &vectors, 0.0, &mut rng, &mut counter);
        assert_eq!(m_bar, 3);
        assert_eq!(counter.total(), 15);
    }

    #[test]
    fn training_ties_break_to_the_smallest_index() {
        let cfg = cfg256();
        let r1 = example1(&cfg);
        let vectors = vectors_for(&cfg, &r1);
        // A zero channel makes every noiseless measurement identical.
        let channel = vec![Complex64::ZERO; cfg.n_t()];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counter = ProbeCounter::new();
        let (m_bar, _) = train_stage1(&channel, &vectors, 0.0, &mut rng, &mut counter);
        assert_eq!(m_bar, -r1.m1);
    }

    #[test]
    fn noiseless_training_matches_membership_oracle() {
        let cfg = cfg256();
        let r1 = example1(&cfg);
        let vectors = vectors_for(&cfg, &r1);
        let regions: Vec<CoverageRegion> = build_codebook1(&r1)
            .into_iter()
            .map(|cw| CoverageRegion::new(&cfg, cw))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = 0;
        let trials = 1000;
        for _ in 0..trials {
            let omega = rng.random_range(-r1.omega_bar..=r1.omega_bar);
            let range = rng.random_range(10.25..=200.0);
            let path = PathParams {
                gain: Complex64::new(1.0, 0.0),
                omega,
                range,
            };
            let channel = assemble_channel(&cfg, &[path]).unwrap();
            let mut counter = ProbeCounter::new();
            let (m_bar, _) = train_stage1(&channel, &vectors, 0.0, &mut rng, &mut counter);
            let target = crate::channel::to_surrogate(&path, cfg.wavelength());
            if regions[(m_bar + r1.m1) as usize].contains(target) {
                hits += 1;
            }
        }
        assert!(
            hits as f64 >= 0.99 * trials as f64,
            "only {hits}/{trials} picks contained the path"
        );
    }

    #[test]
    fn region_update_contains_reference_path_and_extension_grows() {
        let cfg = cfg256();
        let r1 = example1(&cfg);
        let base = region_update1(&cfg, &r1, 0);
        let extended = extend_region(base);
        let truth = SurrogateCoords {
            omega: 0.05,
            b: 4.9782e-5,
        };
        assert!(base.contains(truth));
        assert!(extended.contains(truth));
        assert!(extended.widening > base.widening);
        // A point just outside the base boundary falls in the extension.
        let b = 3.0e-5;
        let edge = cfg.n_t_f() * (b - base.pivot_k).abs();
        let fringe = SurrogateCoords {
            omega: edge + 0.5 / cfg.n_t_f(),
            b,
        };
        assert!(!base.contains(fringe));
        assert!(extended.contains(fringe));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cfg = cfg256();
        assert!(Refine1Config::new(&cfg, 0.8, 1.22e-4, 6.09e-5).is_err());
        assert!(Refine1Config::new(&cfg, 0.8, -1.0e-4, -6.09e-5).is_err());
        assert!(Refine1Config::new(&cfg, 0.0, 1.22e-4, -6.09e-5).is_err());
    }
}
