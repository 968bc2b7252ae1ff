//! Radial reductions for rotationally symmetric pointers.
//!
//! With equal widths the kernels depend on `|p|` and the polar angle only:
//! in two dimensions `e⁰ = e₁(p)`, `f⁰ = f₁(p) cos θ_p`, `g⁰ = f₁(p) sin θ_p`
//! with
//!
//! ```text
//! e₁(p) = ∫ J₀(pr) cos r G(r) r dr,   f₁(p) = ∫ J₁(pr) sin r G(r) r dr,
//! G(r)  = (2πσ²)^(-1/2) exp(-r²/4σ²),
//! ```
//!
//! and in three dimensions the spherical Bessel functions take their place
//! with `(f⁰, g⁰, h⁰) = f₁(p) p̂`.

use std::f64::consts::PI;

use serde::Serialize;

use super::bessel::{j0, j1, sph_j0, sph_j1};
use super::quadrature::{simpson_weights, stencil};
use super::{DetectorConfig, Q_WIDTHS};
use crate::error::{Error, Result};

/// Normalization residual tolerated by radial tables.
pub const RADIAL_NORM_TOL: f64 = 1e-6;
/// Intervals used by [`RadialTable::for_sigma`].
pub const DEFAULT_RADIAL_INTERVALS: usize = 1024;

/// `e₁, f₁` on a uniform grid `0 ≤ p ≤ p_max`.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub sigma: f64,
    pub p_max: f64,
    pub step: f64,
    pub e1: Vec<f64>,
    pub f1: Vec<f64>,
    /// `|∫(e₁² + f₁²) dμ(p) − 1|` over the grid.
    pub normalization_defect: f64,
}

impl RadialProfile {
    pub fn intervals(&self) -> usize {
        self.e1.len() - 1
    }

    pub fn p(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    /// `(e₁(p), f₁(p))` by 6-point Lagrange interpolation; `e₁` is even and
    /// `f₁` odd in `p`, zero beyond `p_max`.
    pub fn eval(&self, p: f64) -> (f64, f64) {
        let n = self.intervals() as i64;
        if p.abs() > self.p_max {
            return (0.0, 0.0);
        }
        let (start, w) = stencil::<6>(p / self.step);
        let (mut e, mut f) = (0.0, 0.0);
        for (k, wk) in w.iter().enumerate() {
            let i = start + k as i64;
            if i.abs() > n {
                continue;
            }
            let s = if i < 0 { -1.0 } else { 1.0 };
            let iu = i.unsigned_abs() as usize;
            e += wk * self.e1[iu];
            f += wk * s * self.f1[iu];
        }
        (e, f)
    }

    /// Simpson integral of `g(e₁, f₁, p)` over the grid.
    pub fn integrate(&self, g: impl Fn(f64, f64, f64) -> f64) -> f64 {
        simpson_weights(self.intervals(), self.step)
            .iter()
            .enumerate()
            .map(|(i, w)| w * g(self.e1[i], self.f1[i], self.p(i)))
            .sum()
    }
}

/// Two-dimensional radial table.
#[derive(Debug, Clone, Serialize)]
pub struct RadialTable(pub RadialProfile);

/// Three-dimensional radial table.
#[derive(Debug, Clone, Serialize)]
pub struct RadialTable3(pub RadialProfile);

struct Transform {
    /// Bessel kernels paired with `cos r` and `sin r`.
    even: fn(f64) -> f64,
    odd: fn(f64) -> f64,
    /// Power of `r` in the measure.
    r_power: i32,
    /// Overall constant times the pointer amplitude at `r = 0`.
    prefactor: f64,
    /// Measure of the `p` integral in the normalization: `c·p^k dp`.
    norm_weight: fn(f64) -> f64,
}

fn build_profile(sigma: f64, p_max: f64, n: usize, t: &Transform) -> Result<RadialProfile> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("sigma must be positive and finite, got {sigma}")));
    }
    if !(p_max > 0.0) || n < 2 || n % 2 != 0 {
        return Err(Error::Domain(format!(
            "radial grid needs p_max > 0 and an even interval count ≥ 2, got p_max = {p_max}, n = {n}"
        )));
    }
    let r_max = Q_WIDTHS * sigma;
    // ≥ 60 nodes per period of the fastest oscillation `(p_max + 1) r`.
    let m = ((r_max * (p_max + 1.0) / (2.0 * PI) * 60.0).ceil() as usize)
        .max(2048)
        .next_multiple_of(2);
    let hr = r_max / m as f64;
    let wr = simpson_weights(m, hr);
    let s2 = sigma * sigma;
    let mut ce = Vec::with_capacity(m + 1);
    let mut cf = Vec::with_capacity(m + 1);
    for (k, w) in wr.iter().enumerate() {
        let r = k as f64 * hr;
        let base = w * t.prefactor * (-r * r / (4.0 * s2)).exp() * r.powi(t.r_power);
        ce.push(base * r.cos());
        cf.push(base * r.sin());
    }
    let hp = p_max / n as f64;
    let mut e1 = vec![0.0; n + 1];
    let mut f1 = vec![0.0; n + 1];
    for i in 0..=n {
        let p = i as f64 * hp;
        let (mut e, mut f) = (0.0, 0.0);
        for k in 0..=m {
            let x = p * (k as f64 * hr);
            e += ce[k] * (t.even)(x);
            f += cf[k] * (t.odd)(x);
        }
        e1[i] = e;
        f1[i] = f;
    }
    let mut profile = RadialProfile {
        sigma,
        p_max,
        step: hp,
        e1,
        f1,
        normalization_defect: 0.0,
    };
    let norm = profile.integrate(|e, f, p| (e * e + f * f) * (t.norm_weight)(p));
    profile.normalization_defect = (norm - 1.0).abs();
    if !(profile.normalization_defect <= RADIAL_NORM_TOL) {
        return Err(Error::Quadrature { residual: profile.normalization_defect });
    }
    Ok(profile)
}

/// Builds `e₁, f₁` for the two-dimensional reduction on `n` intervals of
/// `[0, p_max]`; fails if `∫(e₁² + f₁²) 2πp dp` misses 1 by more than
/// [`RADIAL_NORM_TOL`].
pub fn build_radial_table(sigma: f64, p_max: f64, n: usize) -> Result<RadialTable> {
    let t = Transform {
        even: j0,
        odd: j1,
        r_power: 1,
        prefactor: (2.0 * PI * sigma * sigma).powf(-0.5),
        norm_weight: |p| 2.0 * PI * p,
    };
    build_profile(sigma, p_max, n, &t).map(RadialTable)
}

impl RadialTable {
    /// Table on the default momentum extent for `sigma`.
    pub fn for_sigma(sigma: f64) -> Result<Self> {
        build_radial_table(sigma, DetectorConfig::required_extent(sigma), DEFAULT_RADIAL_INTERVALS)
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.0
    }

    /// `(e⁰, f⁰, g⁰)` at `(p₁, p₂)`.
    pub fn kernels(&self, p1: f64, p2: f64) -> (f64, f64, f64) {
        let p = p1.hypot(p2);
        let (e, f) = self.0.eval(p);
        if p == 0.0 {
            return (e, 0.0, 0.0);
        }
        (e, f * p1 / p, f * p2 / p)
    }

    /// `a′ = 8∫ e₁ f₁ p dp`.
    pub fn a_prime(&self) -> f64 {
        8.0 * self.0.integrate(|e, f, p| e * f * p)
    }
}

impl RadialTable3 {
    /// Builds the three-dimensional reduction; normalization is
    /// `∫(e₁² + f₁²) 4πp² dp = 1`.
    pub fn build(sigma: f64, p_max: f64, n: usize) -> Result<Self> {
        let t = Transform {
            even: sph_j0,
            odd: sph_j1,
            r_power: 2,
            prefactor: (2.0 / PI).sqrt() * (2.0 * PI * sigma * sigma).powf(-0.75),
            norm_weight: |p| 4.0 * PI * p * p,
        };
        build_profile(sigma, p_max, n, &t).map(RadialTable3)
    }

    pub fn for_sigma(sigma: f64) -> Result<Self> {
        Self::build(sigma, DetectorConfig::required_extent(sigma), DEFAULT_RADIAL_INTERVALS)
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.0
    }

    /// `(e⁰, f⁰, g⁰, h⁰)` at `p`.
    pub fn kernels(&self, p: [f64; 3]) -> [f64; 4] {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let (e, f) = self.0.eval(r);
        if r == 0.0 {
            return [e, 0.0, 0.0, 0.0];
        }
        let s = f / r;
        [e, s * p[0], s * p[1], s * p[2]]
    }

    /// `a′ = 4π ∫ e₁ f₁ p² dp`.
    pub fn a_prime(&self) -> f64 {
        4.0 * PI * self.0.integrate(|e, f, p| e * f * p * p)
    }
}
