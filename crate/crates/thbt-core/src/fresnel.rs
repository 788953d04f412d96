//! Fresnel integrals `C(x) = ∫₀ˣ cos(πt²/2) dt` and `S(x) = ∫₀ˣ sin(πt²/2) dt`.
//!
//! Evaluated by composite 16-point Gauss-Legendre quadrature on panels sized
//! to at most a quarter oscillation of the chirp, which keeps the absolute
//! error far below the 1e-8 target across the calibration range. Very large
//! arguments switch to the two-term asymptotic expansion. Both functions
//! extend to negative arguments as odd.

use std::f64::consts::PI;
use std::sync::OnceLock;

const GL_ORDER: usize = 16;
const ASYMPTOTIC_CUTOVER: f64 = 100.0;

/// Legendre polynomial `P_n(x)` and its derivative via the three-term
/// recurrence.
fn legendre_p_dp(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Nodes and weights of 16-point Gauss-Legendre on [-1, 1], computed once by
/// Newton iteration on the Legendre roots.
fn gauss_legendre() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static TABLE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for (i, (node, weight)) in nodes.iter_mut().zip(weights.iter_mut()).enumerate() {
            let mut x = (PI * (i as f64 + 0.75) / (GL_ORDER as f64 + 0.5)).cos();
            for _ in 0..50 {
                let (p, dp) = legendre_p_dp(GL_ORDER, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_p_dp(GL_ORDER, x);
            *node = x;
            *weight = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// Returns `(C(x), S(x))`.
pub fn fresnel(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let sign = x.signum();
    let ax = x.abs();
    if ax >= ASYMPTOTIC_CUTOVER {
        let (c, s) = asymptotic(ax);
        return (sign * c, sign * s);
    }
    let (nodes, weights) = gauss_legendre();
    let mut c = 0.0;
    let mut s = 0.0;
    let mut lo = 0.0f64;
    while lo < ax {
        // Quarter-oscillation bound: phase increase π(z1² - z0²)/2 ≤ π/2.
        let hi = (lo + 0.5).min((lo * lo + 1.0).sqrt()).min(ax);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (node, weight) in nodes.iter().zip(weights) {
            let z = mid + half * node;
            let phase = 0.5 * PI * z * z;
            c += weight * half * phase.cos();
            s += weight * half * phase.sin();
        }
        lo = hi;
    }
    (sign * c, sign * s)
}

/// Two-term asymptotic expansion, accurate far beyond the quadrature range.
fn asymptotic(x: f64) -> (f64, f64) {
    let u = 1.0 / (PI * x * x);
    let f = (1.0 - 3.0 * u * u) / (PI * x);
    let g = (u - 15.0 * u * u * u) / (PI * x);
    let t = 0.5 * PI * x * x;
    let (sin_t, cos_t) = t.sin_cos();
    let c = 0.5 + f * sin_t - g * cos_t;
    let s = 0.5 - f * cos_t - g * sin_t;
    (c, s)
}
