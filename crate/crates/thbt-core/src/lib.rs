//! Triple-refined hybrid-field beam training (THBT) for extremely large
//! antenna arrays.
//!
//! The crate models a half-wavelength uniform linear array whose coverage
//! spans both the radiative near field and the far field. Channel paths are
//! parameterized by the angle sine `Ω` and the surrogate distance
//! `b = λ(1 − Ω²)/(4r)`, which turns the spherical-wavefront geometry into a
//! two-dimensional `(Ω, b)` plane where beam coverages are trapezoids.
//!
//! Modules follow the training pipeline:
//!
//! - [`channel`]: array geometry, exact and surrogate steering vectors,
//!   random multipath channel generation.
//! - [`fresnel`]: Fresnel cosine/sine integrals.
//! - [`gain`]: hybrid-field beam gain (exact summation and the
//!   stationary-phase approximation), beam coverage, codeword coherence.
//! - [`refine1`]: first-refinement codebook (trapezoid tiling) and beam
//!   training that narrows the potential region of a path.
//! - [`refine2`]: second-refinement codebook, maximum-likelihood grid
//!   estimator, and the closed-form phase-unwrapping estimator.
//! - [`refine3`]: hybrid-field neighboring search, Gaussian main-lobe
//!   approximation, log-weighted least-squares estimation, and distance
//!   recovery.
//! - [`probe`]: received-sample simulation and training-overhead accounting.

pub mod channel;
pub mod fresnel;
pub mod gain;
mod linalg;
pub mod probe;
pub mod refine1;
pub mod refine2;
pub mod refine3;

pub use channel::{ArrayConfig, Channel, PathParams, Scenario, SteeringVector, SurrogateCoords};
pub use probe::ProbeCounter;
