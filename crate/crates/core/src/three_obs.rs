//! Three-detector Arthur-Kelly model.
//!
//! Outcome `(a, b, c)` is the sign pattern of `(p₁, p₂, p₃)`, and the
//! realized effects are `⅛(1 ± a′σx ± b′σy ± c′σz)`, whose single-slot
//! marginals are `½(1 ± a′σx)` and so on.

use serde::Serialize;

use crate::effect::{is_valid_effect, outcome_label3, Effect, OUTCOMES3};
use crate::error::{Error, Result};
use crate::geometry_ft::{ft_condition, FtCondition};
use crate::kernel::mc::{integrate_table3, stratified, McEstimate, Product3, Region3};
use crate::kernel::{DetectorConfig, KernelTable3};
use crate::vec3::Vec3;

/// Orthogonal joint-measurability bound for equal unsharpness.
pub fn orthogonal_bound() -> f64 {
    1.0 / 3f64.sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleMarginals {
    pub a_prime: McEstimate,
    pub b_prime: McEstimate,
    pub c_prime: McEstimate,
    /// Full-space `∫(e⁰² + f⁰² + g⁰² + h⁰²)`.
    pub normalization: McEstimate,
    pub sigmas: [f64; 3],
    pub seed: u64,
    /// Deterministic `4π∫e₁f₁p²dp` when the widths are equal.
    pub radial_a_prime: Option<f64>,
}

impl TripleMarginals {
    pub fn values(&self) -> [f64; 3] {
        [self.a_prime.value, self.b_prime.value, self.c_prime.value]
    }

    pub fn sum_squares(&self) -> f64 {
        self.values().iter().map(|v| v * v).sum()
    }
}

/// `a′, b′, c′` as `4∫_{pᵢ≥0} e⁰·(f⁰, g⁰, h⁰)ᵢ` from one stratified sample
/// set.
///
/// Every product involved is even in the momenta it is integrated over
/// fully and the half-space integrals cover one sign of the remaining
/// component, so all four are folded onto the positive octant: `×8` for the
/// normalization and `×4` for each marginal. Strata are then half as wide
/// as on the full box for the same sample count.
pub fn compute_triple(cfg: &DetectorConfig) -> Result<TripleMarginals> {
    let table = KernelTable3::build(cfg)?;
    compute_triple_with(&table)
}

pub fn compute_triple_with(table: &KernelTable3) -> Result<TripleMarginals> {
    let cfg = table.config();
    let est = stratified(
        |p: &[f64; 3], out: &mut [f64]| {
            let [e, f, g, h] = table.kernels(*p);
            out[0] = 8.0 * (e * e + f * f + g * g + h * h);
            out[1] = 16.0 * e * f;
            out[2] = 16.0 * e * g;
            out[3] = 16.0 * e * h;
        },
        4,
        [0.0; 3],
        table.support(),
        cfg.mc_samples,
        cfg.mc_strata_per_axis,
        cfg.seed,
    )?;
    Ok(TripleMarginals {
        normalization: est[0],
        a_prime: est[1],
        b_prime: est[2],
        c_prime: est[3],
        sigmas: [cfg.sigmas[0], cfg.sigmas[1], cfg.sigmas[2]],
        seed: cfg.seed,
        radial_a_prime: table.radial().map(|r| r.a_prime()),
    })
}

/// The eight effects `⅛(1 ± a′σx ± b′σy ± c′σz)` in the order `+++, ++-, …`.
pub fn triple_povm(a_prime: f64, b_prime: f64, c_prime: f64) -> Result<[Effect; 8]> {
    let effects = OUTCOMES3.map(|(a, b, c)| {
        Effect::new(
            0.25,
            Vec3::new(a.value() * a_prime, b.value() * b_prime, c.value() * c_prime) * 0.25,
        )
    });
    for (e, o) in effects.iter().zip(OUTCOMES3) {
        if !is_valid_effect(e) {
            return Err(Error::InvalidEffect { outcome: outcome_label3(o) });
        }
    }
    Ok(effects)
}

pub fn triple_povm_from(tm: &TripleMarginals) -> Result<[Effect; 8]> {
    let [a, b, c] = tm.values();
    triple_povm(a, b, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NecessaryReport {
    pub l: Vec3,
    pub m: Vec3,
    pub n: Vec3,
    pub condition: FtCondition,
    /// `‖l‖² + ‖m‖² + ‖n‖²` when the three vectors are mutually orthogonal.
    pub sum_squares: Option<f64>,
}

/// Distance-sum condition for unsharpness vectors `l, m, n`.
pub fn check_necessary(l: Vec3, m: Vec3, n: Vec3) -> Result<NecessaryReport> {
    let scale = l.norm().max(m.norm()).max(n.norm()).max(1.0);
    let orth = [l.dot(m), m.dot(n), n.dot(l)].iter().all(|d| d.abs() <= 1e-12 * scale * scale);
    Ok(NecessaryReport {
        l,
        m,
        n,
        condition: ft_condition(l, m, n)?,
        sum_squares: orth.then(|| l.norm_sq() + m.norm_sq() + n.norm_sq()),
    })
}

/// [`check_necessary`] for `(a′x̂, b′ŷ, c′ẑ)`.
pub fn check_necessary_axes(a_prime: f64, b_prime: f64, c_prime: f64) -> Result<NecessaryReport> {
    check_necessary(Vec3::X * a_prime, Vec3::Y * b_prime, Vec3::Z * c_prime)
}

/// Marginal effect `∫_{p·n̂≥0} T†T` as identity and Pauli coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionalMarginal {
    pub direction: Vec3,
    pub identity: McEstimate,
    pub vector: [McEstimate; 3],
}

/// Marginal for reading the sign of `p·n̂`. For equal widths it should be
/// `½(1 + a′ n̂·σ)`.
pub fn directional_marginal(table: &KernelTable3, direction: Vec3) -> Result<DirectionalMarginal> {
    let d = direction
        .normalized()
        .ok_or_else(|| Error::Domain("direction must be non-zero".into()))?;
    let est = integrate_table3(
        table,
        &[Product3::Density, Product3::EDir(Vec3::X), Product3::EDir(Vec3::Y), Product3::EDir(Vec3::Z)],
        Region3::half(d),
    )?;
    Ok(DirectionalMarginal {
        direction: d,
        identity: est[0],
        vector: [est[1].scaled(2.0), est[2].scaled(2.0), est[3].scaled(2.0)],
    })
}

/// Default symmetric sweep `σ = 0.05, 0.10, …, 1.50`.
pub fn default_sweep() -> Vec<f64> {
    (1..=30).map(|k| k as f64 * 0.05).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::Sign;

    #[test]
    fn povm_examples() {
        for e in triple_povm(0.0, 0.0, 0.0).unwrap() {
            assert_eq!(e, Effect::new(0.25, Vec3::ZERO));
        }
        let s = orthogonal_bound();
        let g = triple_povm(s, s, s).unwrap();
        for e in g {
            assert!(e.eigenvalues().0.abs() < 1e-15);
        }
        let total: Effect = g.iter().copied().sum();
        assert!(total.max_abs_diff(&Effect::IDENTITY) < 1e-15);
        let plus_x: Effect = OUTCOMES3
            .iter()
            .zip(g)
            .filter(|(o, _)| o.0 == Sign::Plus)
            .map(|(_, e)| e)
            .sum();
        assert!(plus_x.max_abs_diff(&Effect::new(1.0, Vec3::X * s)) < 1e-15);
        match triple_povm(0.6, 0.6, 0.6) {
            Err(Error::InvalidEffect { outcome }) => assert_eq!(outcome, "+++"),
            other => panic!("expected invalid effect, got {other:?}"),
        }
    }

    #[test]
    fn necessary_examples() {
        let r = check_necessary_axes(0.49, 0.49, 0.49).unwrap();
        assert!(r.condition.holds);
        assert!((r.sum_squares.unwrap() - 0.7203).abs() < 1e-12);
        let s = orthogonal_bound();
        let r = check_necessary_axes(s, s, s).unwrap();
        assert!((r.condition.min_total - 4.0).abs() < 1e-12);
        assert!(check_necessary_axes(1.0, 0.0, 0.0).unwrap().condition.holds);
    }
}
