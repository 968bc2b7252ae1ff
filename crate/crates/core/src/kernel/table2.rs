//! Two-detector kernel table on the non-negative momentum quadrant.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::gaussian::{psi_unchecked, unitary_kernels2};
use super::quadrature::{even_extension_weights, simpson_weights, stencil};
use super::{DetectorConfig, NORMALIZATION_TOL, Q_WIDTHS};
use crate::error::{Error, Result};

/// Uniform grid `0, h, …, n·h` along one momentum axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub extent: f64,
    pub intervals: usize,
    pub step: f64,
    pub weights: Vec<f64>,
}

impl Axis {
    fn new(extent: f64, intervals: usize) -> Self {
        let step = extent / intervals as f64;
        Self { extent, intervals, step, weights: simpson_weights(intervals, step) }
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn points(&self) -> Array1<f64> {
        Array1::from_iter((0..=self.intervals).map(|i| self.point(i)))
    }
}

/// `e⁰, f⁰, g⁰` sampled on `p₁, p₂ ≥ 0`.
///
/// Parities: `e⁰` even in both momenta, `f⁰` odd in `p₁` and even in `p₂`,
/// `g⁰` even in `p₁` and odd in `p₂`.
#[derive(Debug, Clone)]
pub struct KernelTable2 {
    config: DetectorConfig,
    axes: [Axis; 2],
    e0: Array2<f64>,
    f0: Array2<f64>,
    g0: Array2<f64>,
    normalization_defect: f64,
}

/// Bilinear kernel products that can be integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Product2 {
    EE,
    FF,
    GG,
    EF,
    EG,
    FG,
    /// `e⁰² + f⁰² + g⁰²`.
    Density,
}

impl Product2 {
    /// Parity in `(p₁, p₂)`: `true` means odd.
    fn odd(self) -> (bool, bool) {
        match self {
            Product2::EF => (true, false),
            Product2::EG => (false, true),
            Product2::FG => (true, true),
            _ => (false, false),
        }
    }

    #[inline]
    pub fn apply(self, e: f64, f: f64, g: f64) -> f64 {
        match self {
            Product2::EE => e * e,
            Product2::FF => f * f,
            Product2::GG => g * g,
            Product2::EF => e * f,
            Product2::EG => e * g,
            Product2::FG => f * g,
            Product2::Density => e * e + f * f + g * g,
        }
    }
}

/// Sign constraint on one momentum component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Half {
    Any,
    NonNeg,
    NonPos,
}

/// Integration region in the `(p₁, p₂)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region2 {
    Signs { p1: Half, p2: Half },
    /// Polar sector `theta_lo ≤ arg p ≤ theta_hi`.
    Sector { theta_lo: f64, theta_hi: f64 },
}

impl Region2 {
    pub const FULL: Region2 = Region2::Signs { p1: Half::Any, p2: Half::Any };

    pub fn signs(p1: Half, p2: Half) -> Self {
        Region2::Signs { p1, p2 }
    }

    pub fn sector(theta_lo: f64, theta_hi: f64) -> Self {
        Region2::Sector { theta_lo, theta_hi }
    }
}

/// Builds the quadrant table by separable cosine/sine quadrature.
pub fn build_kernel_table2(cfg: &DetectorConfig) -> Result<KernelTable2> {
    KernelTable2::build(cfg)
}

/// Position grid on `[0, 12σ]` resolving momenta up to `extent`.
fn q_grid(sigma: f64, extent: f64, min_intervals: usize) -> (Vec<f64>, Vec<f64>) {
    let q_max = Q_WIDTHS * sigma;
    // The integrand oscillates at most at p + 1 and the Gaussian contributes
    // ~5/σ of bandwidth; keep ≥ 1 sample per radian of the fastest phase.
    let m = ((q_max * (extent + 1.0 + 5.0 / sigma) / (2.0 * PI)).ceil() as usize).max(min_intervals);
    let h = q_max / m as f64;
    ((0..=m).map(|i| i as f64 * h).collect(), even_extension_weights(m, h))
}

fn transform_matrix(p: &Axis, q: &[f64], w: &[f64], trig: fn(f64) -> f64) -> Array2<f64> {
    Array2::from_shape_fn((p.intervals + 1, q.len()), |(i, j)| trig(p.point(i) * q[j]) * w[j])
}

impl KernelTable2 {
    pub fn build(cfg: &DetectorConfig) -> Result<Self> {
        cfg.validate(2)?;
        let n = cfg.grid_points / 2;
        let axes = [Axis::new(cfg.p_extent(0), n), Axis::new(cfg.p_extent(1), n)];
        let (s1, s2) = (cfg.sigmas[0], cfg.sigmas[1]);
        let (q1, w1) = q_grid(s1, axes[0].extent, n);
        let (q2, w2) = q_grid(s2, axes[1].extent, n);

        let psi1: Vec<f64> = q1.iter().map(|&q| psi_unchecked(q, s1)).collect();
        let psi2: Vec<f64> = q2.iter().map(|&q| psi_unchecked(q, s2)).collect();
        let shape = (q1.len(), q2.len());
        let mut ef = Array2::zeros(shape);
        let mut ff = Array2::zeros(shape);
        let mut gf = Array2::zeros(shape);
        for i in 0..shape.0 {
            for j in 0..shape.1 {
                let (e, f, g) = unitary_kernels2(q1[i], q2[j]);
                let amp = psi1[i] * psi2[j];
                ef[[i, j]] = e * amp;
                ff[[i, j]] = f * amp;
                gf[[i, j]] = g * amp;
            }
        }

        let c1 = transform_matrix(&axes[0], &q1, &w1, f64::cos);
        let s1m = transform_matrix(&axes[0], &q1, &w1, f64::sin);
        let c2 = transform_matrix(&axes[1], &q2, &w2, f64::cos);
        let s2m = transform_matrix(&axes[1], &q2, &w2, f64::sin);
        let scale = 1.0 / (2.0 * PI);
        let e0 = c1.dot(&ef).dot(&c2.t()) * scale;
        let f0 = s1m.dot(&ff).dot(&c2.t()) * scale;
        let g0 = c1.dot(&gf).dot(&s2m.t()) * scale;

        let mut table = Self {
            config: cfg.clone(),
            axes,
            e0,
            f0,
            g0,
            normalization_defect: 0.0,
        };
        let quadrant = table.quadrant_integral(Product2::Density);
        table.normalization_defect = (quadrant - 0.25).abs();
        if !(table.normalization_defect <= NORMALIZATION_TOL) {
            return Err(Error::Build {
                defect: table.normalization_defect,
                tolerance: NORMALIZATION_TOL,
            });
        }
        Ok(table)
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn sigmas(&self) -> (f64, f64) {
        (self.config.sigmas[0], self.config.sigmas[1])
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn e0(&self) -> &Array2<f64> {
        &self.e0
    }

    pub fn f0(&self) -> &Array2<f64> {
        &self.f0
    }

    pub fn g0(&self) -> &Array2<f64> {
        &self.g0
    }

    /// `|∫_{p≥0} (e⁰² + f⁰² + g⁰²) − ¼|`.
    pub fn normalization_defect(&self) -> f64 {
        self.normalization_defect
    }

    /// Simpson integral of `product` over the stored quadrant.
    pub fn quadrant_integral(&self, product: Product2) -> f64 {
        let (w1, w2) = (&self.axes[0].weights, &self.axes[1].weights);
        let mut total = 0.0;
        for (i, wi) in w1.iter().enumerate() {
            let mut row = 0.0;
            for (j, wj) in w2.iter().enumerate() {
                row += wj * product.apply(self.e0[[i, j]], self.f0[[i, j]], self.g0[[i, j]]);
            }
            total += wi * row;
        }
        total
    }

    /// Kernel values at an arbitrary momentum by 6-point tensor Lagrange
    /// interpolation of the parity-extended table; zero outside the grid.
    pub fn eval(&self, p1: f64, p2: f64) -> (f64, f64, f64) {
        let [a1, a2] = &self.axes;
        if p1.abs() > a1.extent || p2.abs() > a2.extent {
            return (0.0, 0.0, 0.0);
        }
        let (st1, w1) = stencil::<6>(p1 / a1.step);
        let (st2, w2) = stencil::<6>(p2 / a2.step);
        let (n1, n2) = (a1.intervals as i64, a2.intervals as i64);
        let (mut e, mut f, mut g) = (0.0, 0.0, 0.0);
        for (di, wi) in w1.iter().enumerate() {
            let i = st1 + di as i64;
            if i.abs() > n1 {
                continue;
            }
            let si = if i < 0 { -1.0 } else { 1.0 };
            let iu = i.unsigned_abs() as usize;
            for (dj, wj) in w2.iter().enumerate() {
                let j = st2 + dj as i64;
                if j.abs() > n2 {
                    continue;
                }
                let sj = if j < 0 { -1.0 } else { 1.0 };
                let ju = j.unsigned_abs() as usize;
                let w = wi * wj;
                e += w * self.e0[[iu, ju]];
                f += w * si * self.f0[[iu, ju]];
                g += w * sj * self.g0[[iu, ju]];
            }
        }
        (e, f, g)
    }

    /// `∫₀^{R} product(r cos θ, r sin θ) r dr` with `R` the smaller extent.
    pub fn radial_integral(&self, product: Product2, theta: f64) -> f64 {
        let r_max = self.axes[0].extent.min(self.axes[1].extent);
        let n = 2 * self.axes[0].intervals.max(self.axes[1].intervals);
        let h = r_max / n as f64;
        let (c, s) = (theta.cos(), theta.sin());
        simpson_weights(n, h)
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let r = k as f64 * h;
                let (e, f, g) = self.eval(r * c, r * s);
                w * r * product.apply(e, f, g)
            })
            .sum()
    }

    fn sector_integral(&self, product: Product2, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let span = (hi - lo).min(2.0 * PI);
        let n = (((span / (2.0 * PI)) * 512.0).ceil() as usize).max(16).next_multiple_of(2);
        let h = span / n as f64;
        simpson_weights(n, h)
            .iter()
            .enumerate()
            .map(|(k, w)| w * self.radial_integral(product, lo + k as f64 * h))
            .sum()
    }
}

fn axis_factor(c: Half, odd: bool) -> f64 {
    match (c, odd) {
        (Half::Any, false) => 2.0,
        (Half::Any, true) => 0.0,
        (_, false) => 1.0,
        (Half::NonNeg, true) => 1.0,
        (Half::NonPos, true) => -1.0,
    }
}

/// Integral of `product` over `region`.
///
/// Sign-constrained regions use the quadrant table and the product's
/// parity exactly; sectors use polar quadrature of the interpolated
/// kernels.
pub fn integrate_region2(table: &KernelTable2, product: Product2, region: Region2) -> f64 {
    match region {
        Region2::Signs { p1, p2 } => {
            let (o1, o2) = product.odd();
            let k = axis_factor(p1, o1) * axis_factor(p2, o2);
            if k == 0.0 {
                0.0
            } else {
                k * table.quadrant_integral(product)
            }
        }
        Region2::Sector { theta_lo, theta_hi } => table.sector_integral(product, theta_lo, theta_hi),
    }
}
