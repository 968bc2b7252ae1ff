//! Momentum-space measurement kernels and their integration.
//!
//! With unit couplings the impulsive interaction expands as
//! `U = e + f σx + g σy` with `e = cos R`, `f = i q₁ sin R / R`,
//! `g = i q₂ sin R / R` and `R = ‖q‖` in the pointer positions. Absorbing
//! the pointer state and transforming to momentum gives real kernels
//! `e⁰, f⁰, g⁰` whose bilinear integrals over momentum regions are the
//! POVM parameters. The sign of the `i` only flips `f⁰`, `g⁰` together; it
//! is fixed so that `a′ ≥ 0`.
//!
//! Two-detector kernels are tabulated on the `p ≥ 0` quadrant
//! ([`KernelTable2`]); their parities recover the other quadrants. The
//! rotationally symmetric case reduces to 1D radial integrals
//! ([`RadialTable`]). Three-detector kernels ([`KernelTable3`]) feed a
//! stratified Monte Carlo integrator ([`mc`]).

pub mod bessel;
pub mod evaluator;
pub mod gaussian;
pub mod mc;
pub mod quadrature;
pub mod radial;
pub mod table2;
pub mod table3;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use evaluator::KernelEvaluator2;
pub use gaussian::{gaussian_psi, unitary_kernels2, unitary_kernels3};
pub use mc::{mc_integrate3, McEstimate, Product3, Region3};
pub use radial::{build_radial_table, RadialTable, RadialTable3};
pub use table2::{build_kernel_table2, integrate_region2, Half, KernelTable2, Product2, Region2};
pub use table3::KernelTable3;

/// Smallest momentum half-width used when none is configured.
pub const MIN_EXTENT: f64 = 12.0;
/// Position grids span `±Q_WIDTHS·σ`.
pub const Q_WIDTHS: f64 = 12.0;
/// Largest normalization defect a two-detector table may have.
pub const NORMALIZATION_TOL: f64 = 1e-6;

pub const DEFAULT_GRID_POINTS: usize = 512;
pub const DEFAULT_MC_SAMPLES: u64 = 1 << 22;
pub const DEFAULT_STRATA_PER_AXIS: usize = 8;

/// Gaussian pointer states and numerical resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    /// Position-space standard deviations, one per detector.
    pub sigmas: Vec<f64>,
    /// Momentum half-width of the kernel grid. Unset means per-axis
    /// [`DetectorConfig::required_extent`].
    #[serde(default)]
    pub grid_extent: Option<f64>,
    /// Points per full momentum axis; the stored quadrant has half as many
    /// intervals.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default = "default_strata")]
    pub mc_strata_per_axis: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}
fn default_mc_samples() -> u64 {
    DEFAULT_MC_SAMPLES
}
fn default_strata() -> usize {
    DEFAULT_STRATA_PER_AXIS
}

impl DetectorConfig {
    pub fn new(sigmas: Vec<f64>) -> Self {
        Self {
            sigmas,
            grid_extent: None,
            grid_points: DEFAULT_GRID_POINTS,
            mc_samples: DEFAULT_MC_SAMPLES,
            mc_strata_per_axis: DEFAULT_STRATA_PER_AXIS,
            seed: 0,
        }
    }

    pub fn two(a: f64, b: f64) -> Self {
        Self::new(vec![a, b])
    }

    pub fn three(a: f64, b: f64, c: f64) -> Self {
        Self::new(vec![a, b, c])
    }

    pub fn with_grid_points(mut self, n: usize) -> Self {
        self.grid_points = n;
        self
    }

    pub fn with_mc(mut self, samples: u64, seed: u64) -> Self {
        self.mc_samples = samples;
        self.seed = seed;
        self
    }

    /// Minimum momentum half-width `8·max(σ, 1/σ, 1)`.
    pub fn min_extent(sigma: f64) -> f64 {
        8.0 * sigma.max(1.0 / sigma).max(1.0)
    }

    /// Default momentum half-width for one axis, never below [`MIN_EXTENT`].
    pub fn required_extent(sigma: f64) -> f64 {
        Self::min_extent(sigma).max(MIN_EXTENT)
    }

    /// Momentum half-width used along axis `i`.
    pub fn p_extent(&self, i: usize) -> f64 {
        self.grid_extent
            .unwrap_or_else(|| Self::required_extent(self.sigmas[i]))
    }

    pub fn is_symmetric(&self) -> bool {
        self.sigmas.windows(2).all(|w| w[0] == w[1])
    }

    /// Checks the sigma count and all numeric ranges.
    pub fn validate(&self, detectors: usize) -> Result<()> {
        if self.sigmas.len() != detectors {
            return Err(Error::Config(format!(
                "expected {detectors} sigmas, got {}",
                self.sigmas.len()
            )));
        }
        for &s in &self.sigmas {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("sigma must be positive and finite, got {s}")));
            }
        }
        if let Some(ext) = self.grid_extent {
            let need = self
                .sigmas
                .iter()
                .map(|&s| Self::min_extent(s))
                .fold(0.0, f64::max);
            if !(ext >= need) {
                return Err(Error::Config(format!(
                    "grid_extent {ext} is below 8·max(σ, 1/σ, 1) = {need}"
                )));
            }
        }
        if detectors == 2 && (self.grid_points < 256 || self.grid_points % 2 != 0) {
            return Err(Error::Config(format!(
                "grid_points must be even and at least 256, got {}",
                self.grid_points
            )));
        }
        if detectors == 3 {
            if self.mc_samples < 2 * (self.mc_strata_per_axis as u64).pow(3) {
                return Err(Error::Config(format!(
                    "mc_samples {} leaves fewer than 2 samples per stratum",
                    self.mc_samples
                )));
            }
            if self.mc_strata_per_axis == 0 {
                return Err(Error::Config("mc_strata_per_axis must be positive".into()));
            }
        }
        Ok(())
    }
}
