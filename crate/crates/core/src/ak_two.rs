//! Two-detector Arthur-Kelly model.
//!
//! Reading the signs of the two pointer momenta realizes the joint
//! observable `G_ab = ¼(1 + a·a′σx + b·b′σy)`: outcome `+` on the first
//! detector is `p₁ ≥ 0`, on the second `p₂ ≥ 0`, and `p = 0` counts as `+`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effect::{
    outcome_label2, Effect, JointObservable2, Sign, UnsharpObservable, BOUNDARY_TOL, OUTCOMES2,
};
use crate::error::{Error, Result};
use crate::kernel::evaluator::KernelEvaluator2;
use crate::kernel::gaussian::{psi_unchecked, unitary_kernels2};
use crate::kernel::quadrature::simpson_weights;
use crate::kernel::table2::{integrate_region2, Half, KernelTable2, Product2, Region2};
use crate::kernel::{DetectorConfig, Q_WIDTHS};
use crate::vec3::Vec3;

/// Qubit state `½(1 + r·σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochState {
    pub r: Vec3,
}

impl BlochState {
    pub const MAXIMALLY_MIXED: BlochState = BlochState { r: Vec3::ZERO };

    pub fn new(r: Vec3) -> Result<Self> {
        if !r.is_finite() || r.norm() > 1.0 + BOUNDARY_TOL {
            return Err(Error::Domain(format!("Bloch vector {r:?} lies outside the unit ball")));
        }
        Ok(Self { r })
    }

    /// Pure state at polar angle `theta` and azimuth `phi`.
    pub fn pure(theta: f64, phi: f64) -> Self {
        Self {
            r: Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()),
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.r.norm()
    }

    /// `Δσx·Δσy = √((1 − x²)(1 − y²))`.
    pub fn uncertainty_product(&self) -> f64 {
        ((1.0 - self.r.x * self.r.x).max(0.0) * (1.0 - self.r.y * self.r.y).max(0.0)).sqrt()
    }

    /// Angle between the Bloch vector and the x axis, in degrees.
    pub fn angle_to_x_deg(&self) -> f64 {
        let n = self.r.norm();
        if n == 0.0 {
            return 0.0;
        }
        (self.r.x / n).clamp(-1.0, 1.0).acos().to_degrees()
    }

    /// Bloch vector of `σx ρ σx`.
    pub fn sigma_x_conjugate(&self) -> Self {
        Self { r: Vec3::new(self.r.x, -self.r.y, -self.r.z) }
    }

    /// Bloch vector of `S_z(θ) ρ S_z(θ)†`: rotation by `theta` about z.
    pub fn rotated_z(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { r: Vec3::new(c * self.r.x - s * self.r.y, s * self.r.x + c * self.r.y, self.r.z) }
    }
}

/// Unsharpness of the two marginal observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalPair {
    pub a_prime: f64,
    pub b_prime: f64,
    pub sigmas: [f64; 2],
}

impl MarginalPair {
    pub fn uncertainty_lhs(&self) -> f64 {
        self.a_prime * self.a_prime + self.b_prime * self.b_prime
    }

    /// The realized joint observable `¼(1 ± a′σx ± b′σy)`.
    pub fn joint_observable(&self) -> JointObservable2 {
        JointObservable2::new(
            UnsharpObservable::unbiased(Vec3::X * self.a_prime),
            UnsharpObservable::unbiased(Vec3::Y * self.b_prime),
            0.0,
            Vec3::ZERO,
        )
    }
}

/// `a′ = 4∫_{p₁≥0} e⁰f⁰`, `b′ = 4∫_{p₂≥0} e⁰g⁰`.
pub fn compute_marginals(table: &KernelTable2) -> Result<MarginalPair> {
    let a = 4.0 * integrate_region2(table, Product2::EF, Region2::signs(Half::NonNeg, Half::Any));
    let b = 4.0 * integrate_region2(table, Product2::EG, Region2::signs(Half::Any, Half::NonNeg));
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature { residual: f64::NAN });
    }
    let (s1, s2) = table.sigmas();
    Ok(MarginalPair { a_prime: a, b_prime: b, sigmas: [s1, s2] })
}

/// Builds the table for `(σ₁, σ₂)` and returns its marginals.
pub fn marginals_for(sigma1: f64, sigma2: f64, grid_points: usize) -> Result<MarginalPair> {
    let cfg = DetectorConfig::two(sigma1, sigma2).with_grid_points(grid_points);
    compute_marginals(&KernelTable2::build(&cfg)?)
}

/// Marginals for many width pairs, in input order.
pub fn sweep_marginals(pairs: &[(f64, f64)], grid_points: usize) -> Vec<Result<MarginalPair>> {
    pairs
        .par_iter()
        .map(|&(a, b)| marginals_for(a, b, grid_points))
        .collect()
}

/// Default sweep widths `0.05, 0.10, …, 1.50`.
pub fn default_sigma_grid() -> Vec<f64> {
    (1..=30).map(|k| k as f64 * 0.05).collect()
}

/// `p(a, b) = ¼(1 + a·a′x + b·b′y)` in the order `++, +-, -+, --`.
pub fn outcome_probabilities(mp: &MarginalPair, chi: &BlochState) -> [f64; 4] {
    OUTCOMES2.map(|(a, b)| 0.25 * (1.0 + a.value() * mp.a_prime * chi.r.x + b.value() * mp.b_prime * chi.r.y))
}

/// Post-measurement state for one outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostState {
    pub outcome: String,
    pub probability: f64,
    /// State from the closed-form numerators `a′/2 + 4y c_fg + 2x(¼ − 2c_gg)`, …
    pub state: BlochState,
    /// Normalized `∫_Q T ρ T† dp` over the outcome quadrant `Q`.
    pub exact_state: BlochState,
    pub c_fg: f64,
    pub c_ff: f64,
    pub c_gg: f64,
}

/// Quadrant integrals `c_fg, c_ff, c_gg` over `p₁, p₂ ≥ 0`.
pub fn quadrant_coefficients(table: &KernelTable2) -> (f64, f64, f64) {
    (
        table.quadrant_integral(Product2::FG),
        table.quadrant_integral(Product2::FF),
        table.quadrant_integral(Product2::GG),
    )
}

/// Post-measurement state for `outcome`.
///
/// Other quadrants follow from `(+,+)` by the kernel parities: the `a′`,
/// `b′` and `c_fg` terms pick up the outcome signs.
pub fn post_state(table: &KernelTable2, chi: &BlochState, outcome: (Sign, Sign)) -> Result<PostState> {
    let mp = compute_marginals(table)?;
    let (c_fg, c_ff, c_gg) = quadrant_coefficients(table);
    let (sa, sb) = (outcome.0.value(), outcome.1.value());
    let (x, y, z) = (chi.r.x, chi.r.y, chi.r.z);
    let (a, b) = (sa * mp.a_prime, sb * mp.b_prime);
    let cfg = sa * sb * c_fg;
    let q = Region2::signs(half(outcome.0), half(outcome.1));
    let probability = integrate_region2(table, Product2::Density, q)
        + 2.0 * x * integrate_region2(table, Product2::EF, q)
        + 2.0 * y * integrate_region2(table, Product2::EG, q);
    let label = outcome_label2(outcome);
    if !(probability > 1e-15) {
        return Err(Error::ZeroProbability { outcome: label });
    }
    let denom = x * a + y * b + 1.0;
    let state = Vec3::new(
        (a / 2.0 + 4.0 * y * cfg + 2.0 * x * (0.25 - 2.0 * c_gg)) / denom,
        (b / 2.0 + 4.0 * x * cfg + 2.0 * y * (0.25 - 2.0 * c_ff)) / denom,
        2.0 * z * (0.25 - 2.0 * (c_ff + c_gg)) / denom,
    );
    Ok(PostState {
        outcome: label,
        probability,
        state: BlochState { r: state },
        exact_state: BlochState { r: state * 2.0 },
        c_fg,
        c_ff,
        c_gg,
    })
}

fn half(s: Sign) -> Half {
    match s {
        Sign::Plus => Half::NonNeg,
        Sign::Minus => Half::NonPos,
    }
}

/// `c_ff` from position space: `∫_{q₁,q₂≥0} |f|² ψ₁² ψ₂² dq`.
///
/// Equal to the momentum-space quadrant integral because `|f⁰|²` is even in
/// both momenta and `|f|²ψ₁²ψ₂²` is even in both positions.
pub fn plancherel_cff(cfg: &DetectorConfig) -> Result<f64> {
    cfg.validate(2)?;
    let n = 2 * cfg.grid_points;
    let (s1, s2) = (cfg.sigmas[0], cfg.sigmas[1]);
    let (h1, h2) = (Q_WIDTHS * s1 / n as f64, Q_WIDTHS * s2 / n as f64);
    let (w1, w2) = (simpson_weights(n, h1), simpson_weights(n, h2));
    let mut total = 0.0;
    for (i, wi) in w1.iter().enumerate() {
        let q1 = i as f64 * h1;
        let a = psi_unchecked(q1, s1).powi(2);
        for (j, wj) in w2.iter().enumerate() {
            let q2 = j as f64 * h2;
            let (_, f, _) = unitary_kernels2(q1, q2);
            total += wi * wj * f * f * a * psi_unchecked(q2, s2).powi(2);
        }
    }
    Ok(total)
}

/// Four-outcome probabilities when the pointers are read along directions
/// at relative angle `theta`, in the order `++, +-, -+, --`.
pub fn oblique_probabilities(a_prime: f64, theta: f64, chi: &BlochState) -> [f64; 4] {
    let (x, y) = (chi.r.x, chi.r.y);
    let k = a_prime / 4.0;
    let (s, c) = theta.sin_cos();
    let same = 0.5 - theta / (2.0 * PI);
    let cross = theta / (2.0 * PI);
    [
        same + k * (1.0 + c) * x + k * s * y,
        cross + k * (1.0 - c) * x - k * s * y,
        cross + k * (c - 1.0) * x + k * s * y,
        same - k * (1.0 + c) * x - k * s * y,
    ]
}

/// The effects behind [`oblique_probabilities`].
pub fn oblique_effects(a_prime: f64, theta: f64) -> [Effect; 4] {
    let (s, c) = theta.sin_cos();
    let k = a_prime / 2.0;
    let same = 1.0 - theta / PI;
    let cross = theta / PI;
    [
        Effect::new(same, Vec3::new(k * (1.0 + c), k * s, 0.0)),
        Effect::new(cross, Vec3::new(k * (1.0 - c), -k * s, 0.0)),
        Effect::new(cross, Vec3::new(k * (c - 1.0), k * s, 0.0)),
        Effect::new(same, Vec3::new(-k * (1.0 + c), -k * s, 0.0)),
    ]
}

/// Symmetry of the outcome density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// `P_χ(p₁, p₂) = P_{σxχ}(p₁, −p₂)`.
    Reflection,
    /// `P_χ(p) = P_{S_z(θ)χ}(R_θ p)`; needs equal widths.
    Rotation(f64),
}

/// Probe points: a `k × k` grid spanning the bulk of the kernel mass.
pub fn probe_points(cfg: &DetectorConfig, k: usize) -> Vec<(f64, f64)> {
    let ext = |s: f64| 1.0 + 2.0 / s;
    let (e1, e2) = (ext(cfg.sigmas[0]), ext(cfg.sigmas[1]));
    let t = |i: usize| -1.0 + 2.0 * (i as f64 + 0.37) / k as f64;
    (0..k)
        .flat_map(|i| (0..k).map(move |j| (e1 * t(i), e2 * t(j))))
        .collect()
}

/// Largest absolute difference between both sides of the symmetry over
/// `points`.
pub fn symmetry_probe(
    ev: &KernelEvaluator2,
    cfg: &DetectorConfig,
    chi: &BlochState,
    symmetry: Symmetry,
    points: &[(f64, f64)],
) -> Result<f64> {
    let (image, map): (BlochState, Box<dyn Fn(f64, f64) -> (f64, f64) + Sync>) = match symmetry {
        Symmetry::Reflection => (chi.sigma_x_conjugate(), Box::new(|p1, p2| (p1, -p2))),
        Symmetry::Rotation(theta) => {
            if cfg.sigmas[0] != cfg.sigmas[1] {
                return Err(Error::Precondition(
                    "rotation symmetry needs equal detector widths".into(),
                ));
            }
            let (s, c) = theta.sin_cos();
            (chi.rotated_z(theta), Box::new(move |p1, p2| (c * p1 - s * p2, s * p1 + c * p2)))
        }
    };
    Ok(points
        .par_iter()
        .map(|&(p1, p2)| {
            let (q1, q2) = map(p1, p2);
            (ev.density(p1, p2, chi.r) - ev.density(q1, q2, image.r)).abs()
        })
        .reduce(|| 0.0, f64::max))
}
