//! Spin-direction fidelities, the angle POVM and the derived rms measures.
//!
//! Each fidelity has the form `inf_χ (c₀ + v·r)` over Bloch vectors `r`
//! with `‖r‖ ≤ 1`, whose infimum is `c₀ − ‖v‖`. The state terms `v` vanish
//! by kernel parity; they are still computed so that the infimum is taken
//! over what the quadrature actually produced.

use std::f64::consts::PI;

use serde::Serialize;

use crate::ak_two::compute_marginals;
use crate::error::{Error, Result};
use crate::kernel::quadrature::simpson_weights;
use crate::kernel::table2::{integrate_region2, KernelTable2, Product2, Region2};
use crate::vec3::Vec3;

/// Spin of the measured system.
pub const SPIN: f64 = 0.5;
/// Angular samples of the angle POVM over `[0, 2π)`.
pub const ANGLE_SAMPLES: usize = 256;

/// State-dependent fidelity `c₀ + v·r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityTerms {
    pub constant: f64,
    pub vector: Vec3,
}

impl FidelityTerms {
    pub fn at(&self, r: Vec3) -> f64 {
        self.constant + self.vector.dot(r)
    }

    pub fn infimum(&self) -> f64 {
        self.constant - self.vector.norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub a_prime: f64,
    pub eta_i: f64,
    /// `πa′/4`.
    pub eta_i_closed: f64,
    /// Only defined for equal detector widths.
    pub eta_f: Option<f64>,
    pub eta_d: f64,
    pub delta_ei: f64,
    pub delta_ef: Option<f64>,
    pub delta_d: f64,
    pub spin: f64,
}

/// `E(θ) = a(θ)·1 + b(θ)σx + c(θ)σy` on a uniform periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnglePovm {
    pub theta: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl AnglePovm {
    /// Periodic trapezoid weight of each sample.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.theta.len() as f64
    }

    /// `(∫a, ∫b, ∫c)` over the full circle.
    pub fn totals(&self) -> (f64, f64, f64) {
        let h = self.step();
        (
            h * self.a.iter().sum::<f64>(),
            h * self.b.iter().sum::<f64>(),
            h * self.c.iter().sum::<f64>(),
        )
    }

    /// `∫_{-π/2}^{π/2} E(θ) dθ` as `(identity, σx, σy)` coefficients by
    /// Simpson's rule over the `n/2 + 1` samples of the half circle.
    pub fn right_half(&self) -> (f64, f64, f64) {
        let n = self.theta.len();
        assert!(n % 4 == 0, "angle grid must be divisible by 4");
        let w = simpson_weights(n / 2, self.step());
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for (k, wk) in w.iter().enumerate() {
            let idx = (k + 3 * n / 4) % n;
            a += wk * self.a[idx];
            b += wk * self.b[idx];
            c += wk * self.c[idx];
        }
        (a, b, c)
    }
}

fn require_symmetric(table: &KernelTable2, what: &str) -> Result<()> {
    let (s1, s2) = table.sigmas();
    if s1 != s2 {
        return Err(Error::Precondition(format!("{what} needs equal detector widths, got {s1} and {s2}")));
    }
    Ok(())
}

/// Radial integrals `∫ X(p, θ) p dp` of the six kernel products along one
/// ray: `[ee, ff, gg, ef, eg, fg]`.
fn ray_products(table: &KernelTable2, theta: f64) -> [f64; 6] {
    let products = [Product2::EE, Product2::FF, Product2::GG, Product2::EF, Product2::EG, Product2::FG];
    let r_max = table.axis(0).extent.min(table.axis(1).extent);
    let n = 2 * table.axis(0).intervals.max(table.axis(1).intervals);
    let h = r_max / n as f64;
    let (s, c) = theta.sin_cos();
    let mut out = [0.0; 6];
    for (k, w) in simpson_weights(n, h).iter().enumerate() {
        let r = k as f64 * h;
        let (e, f, g) = table.eval(r * c, r * s);
        for (o, p) in out.iter_mut().zip(products) {
            *o += w * r * p.apply(e, f, g);
        }
    }
    out
}

fn angle_grid() -> Vec<f64> {
    (0..ANGLE_SAMPLES).map(|k| 2.0 * PI * k as f64 / ANGLE_SAMPLES as f64).collect()
}

/// Radial integrals of `e⁰² + f⁰² + g⁰²`, `2e⁰f⁰`, `2e⁰g⁰` at each angle.
pub fn angle_povm(table: &KernelTable2) -> Result<AnglePovm> {
    require_symmetric(table, "the angle POVM")?;
    let theta = angle_grid();
    let rays: Vec<[f64; 6]> = theta.iter().map(|&t| ray_products(table, t)).collect();
    Ok(AnglePovm {
        a: rays.iter().map(|r| r[0] + r[1] + r[2]).collect(),
        b: rays.iter().map(|r| 2.0 * r[3]).collect(),
        c: rays.iter().map(|r| 2.0 * r[4]).collect(),
        theta,
    })
}

/// Cartesian quadrant sum of `g(e, f, g, p₁, p₂)` skipping the disk of one
/// cell radius around the origin.
fn quadrant_sum_excluding_origin(table: &KernelTable2, g: impl Fn(f64, f64, f64, f64, f64) -> f64) -> f64 {
    let (a1, a2) = (table.axis(0), table.axis(1));
    let cell = a1.step.max(a2.step);
    let mut total = 0.0;
    for (i, wi) in a1.weights.iter().enumerate() {
        let p1 = a1.point(i);
        for (j, wj) in a2.weights.iter().enumerate() {
            let p2 = a2.point(j);
            if p1.hypot(p2) < cell {
                continue;
            }
            total += wi * wj * g(table.e0()[[i, j]], table.f0()[[i, j]], table.g0()[[i, j]], p1, p2);
        }
    }
    total
}

/// Retrodictive fidelity terms: constant `∫ e⁰f⁰ p₁/p + e⁰g⁰ p₂/p` over the
/// plane. The state terms `½∫ (e⁰² + f⁰² + g⁰²)(p₁/p, p₂/p, 0)` are odd in
/// one momentum and cancel exactly on the parity-extended grid.
pub fn eta_i_terms(table: &KernelTable2) -> FidelityTerms {
    let constant = 4.0
        * quadrant_sum_excluding_origin(table, |e, f, g, p1, p2| {
            let p = p1.hypot(p2);
            (e * f * p1 + e * g * p2) / p
        });
    FidelityTerms { constant, vector: Vec3::ZERO }
}

/// `inf_χ` of the retrodictive fidelity from the Cartesian integral.
pub fn eta_i_direct(table: &KernelTable2) -> f64 {
    eta_i_terms(table).infimum()
}

/// Retrodictive fidelity with the state terms evaluated by polar
/// quadrature instead of parity.
pub fn eta_i_polar_terms(table: &KernelTable2) -> FidelityTerms {
    let theta = angle_grid();
    let h = 2.0 * PI / theta.len() as f64;
    let (mut c0, mut vx, mut vy) = (0.0, 0.0, 0.0);
    for &t in &theta {
        let r = ray_products(table, t);
        let (s, c) = t.sin_cos();
        let a = r[0] + r[1] + r[2];
        c0 += h * (r[3] * c + r[4] * s);
        vx += h * 0.5 * a * c;
        vy += h * 0.5 * a * s;
    }
    FidelityTerms { constant: c0, vector: Vec3::new(vx, vy, 0.0) }
}

/// `η_i = πa′/4`.
pub fn eta_i_closed(a_prime: f64) -> f64 {
    PI * a_prime / 4.0
}

/// Predictive fidelity terms from the angular form of the integrand.
pub fn eta_f_terms(table: &KernelTable2) -> Result<FidelityTerms> {
    require_symmetric(table, "the predictive fidelity")?;
    let theta = angle_grid();
    let h = 2.0 * PI / theta.len() as f64;
    let (mut c0, mut vx, mut vy) = (0.0, 0.0, 0.0);
    for &t in &theta {
        let [ee, ff, gg, ef, eg, fg] = ray_products(table, t);
        let (s, c) = t.sin_cos();
        vx += h * (c * (ee + ff - gg) + 2.0 * fg * s);
        vy += h * (s * (ee - ff + gg) + 2.0 * fg * c);
        c0 += h * (ef * c + eg * s);
    }
    Ok(FidelityTerms { constant: c0, vector: Vec3::new(vx, vy, 0.0) })
}

pub fn eta_f_direct(table: &KernelTable2) -> Result<f64> {
    Ok(eta_f_terms(table)?.infimum())
}

/// Disturbance terms: `¾∫(e⁰² + f⁰² + g⁰²)` plus `½∫(e⁰f⁰, e⁰g⁰, 0)`.
pub fn eta_d_terms(table: &KernelTable2) -> FidelityTerms {
    FidelityTerms {
        constant: 0.75 * integrate_region2(table, Product2::Density, Region2::FULL),
        vector: Vec3::new(
            0.5 * integrate_region2(table, Product2::EF, Region2::FULL),
            0.5 * integrate_region2(table, Product2::EG, Region2::FULL),
            0.0,
        ),
    }
}

pub fn eta_d_direct(table: &KernelTable2) -> f64 {
    eta_d_terms(table).infimum()
}

/// `(Δ_ei S, Δ_ef S, Δ_d S) = (√(s+s²−η_i²), √(s+s²−η_f²), √2·√(s+s²−η_d²))`.
pub fn error_measures(eta_i: f64, eta_f: f64, eta_d: f64) -> Result<(f64, f64, f64)> {
    Ok((rms(eta_i)?, rms(eta_f)?, std::f64::consts::SQRT_2 * rms(eta_d)?))
}

fn rms(eta: f64) -> Result<f64> {
    let v = SPIN + SPIN * SPIN - eta * eta;
    if !(v >= 0.0) {
        return Err(Error::Domain(format!("fidelity {eta} exceeds √(s + s²)")));
    }
    Ok(v.sqrt())
}

/// All fidelities for one table. `η_f` needs equal widths and is omitted
/// otherwise.
pub fn fidelity_report(table: &KernelTable2) -> Result<FidelityReport> {
    let mp = compute_marginals(table)?;
    let eta_i = eta_i_direct(table);
    let eta_d = eta_d_direct(table);
    let eta_f = match eta_f_direct(table) {
        Ok(v) => Some(v),
        Err(Error::Precondition(_)) => None,
        Err(e) => return Err(e),
    };
    let (delta_ei, _, delta_d) = error_measures(eta_i, 0.0, eta_d)?;
    Ok(FidelityReport {
        a_prime: mp.a_prime,
        eta_i,
        eta_i_closed: eta_i_closed(mp.a_prime),
        eta_f,
        eta_d,
        delta_ei,
        delta_ef: eta_f.map(rms).transpose()?,
        delta_d,
        spin: SPIN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        assert!((eta_i_closed(0.628) - 0.4932).abs() < 1e-4);
        assert_eq!(eta_i_closed(0.0), 0.0);
        assert!((eta_i_closed(2.0 / PI) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn error_measure_examples() {
        let (a, _, _) = error_measures(0.0, 0.0, 0.0).unwrap();
        assert!((a - 0.75f64.sqrt()).abs() < 1e-15);
        let (a, _, _) = error_measures(0.5, 0.0, 0.0).unwrap();
        assert!((a - 0.5f64.sqrt()).abs() < 1e-15);
        let (_, _, d) = error_measures(0.0, 0.0, 0.75).unwrap();
        assert!((d - 0.6124).abs() < 1e-4);
        assert!(error_measures(0.9, 0.0, 0.0).is_err());
    }

    #[test]
    fn infimum_over_ball() {
        let t = FidelityTerms { constant: 0.5, vector: Vec3::new(0.03, -0.04, 0.0) };
        assert!((t.infimum() - 0.45).abs() < 1e-15);
        assert!((t.at(Vec3::new(-0.6, 0.8, 0.0)) - t.infimum()).abs() < 1e-15);
    }
}
