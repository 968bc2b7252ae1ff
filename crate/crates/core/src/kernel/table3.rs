//! Three-detector kernels `e⁰, f⁰, g⁰, h⁰`.
//!
//! Equal widths use the spherical radial reduction. Unequal widths fall
//! back to an octant grid built by separable cosine/sine transforms and
//! read through tricubic interpolation of the parity-extended samples.

use std::f64::consts::PI;

use ndarray::{Array2, Array3, Axis as NdAxis};

use super::gaussian::{psi_unchecked, unitary_kernels3};
use super::quadrature::{even_extension_weights, simpson_weights, stencil};
use super::radial::{RadialTable3, DEFAULT_RADIAL_INTERVALS};
use super::{DetectorConfig, Q_WIDTHS};
use crate::error::{Error, Result};

/// Intervals per axis of the asymmetric octant grid.
pub const OCTANT_INTERVALS: usize = 96;
/// Normalization defect accepted for the octant grid.
pub const OCTANT_NORM_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct KernelTable3 {
    config: DetectorConfig,
    support: [f64; 3],
    source: Source,
}

#[derive(Debug, Clone)]
enum Source {
    Radial(RadialTable3),
    Grid(OctantGrid),
}

#[derive(Debug, Clone)]
struct OctantGrid {
    step: [f64; 3],
    n: usize,
    /// `[e, f, g, h]` samples on `p ≥ 0`; component `c ≥ 1` is odd in axis `c-1`.
    k: [Array3<f64>; 4],
}

/// Momentum half-width holding the kernel mass for width `sigma`: the kick
/// of unit size plus eight momentum standard deviations.
pub fn support_extent(sigma: f64) -> f64 {
    1.0 + 3.0 / sigma
}

impl KernelTable3 {
    /// Radial evaluator for equal widths, octant grid otherwise.
    pub fn build(cfg: &DetectorConfig) -> Result<Self> {
        cfg.validate(3)?;
        if cfg.is_symmetric() {
            Self::build_radial(cfg)
        } else {
            Self::build_grid(cfg)
        }
    }

    pub fn build_radial(cfg: &DetectorConfig) -> Result<Self> {
        cfg.validate(3)?;
        if !cfg.is_symmetric() {
            return Err(Error::Precondition("radial kernels need equal sigmas".into()));
        }
        let s = cfg.sigmas[0];
        let support = [support_extent(s); 3];
        let p_max = support[0] * 3f64.sqrt();
        let radial = RadialTable3::build(s, p_max, 2 * DEFAULT_RADIAL_INTERVALS)?;
        Ok(Self { config: cfg.clone(), support, source: Source::Radial(radial) })
    }

    pub fn build_grid(cfg: &DetectorConfig) -> Result<Self> {
        cfg.validate(3)?;
        let n = OCTANT_INTERVALS;
        let sig = [cfg.sigmas[0], cfg.sigmas[1], cfg.sigmas[2]];
        let support = sig.map(support_extent);
        let step = support.map(|p| p / n as f64);

        let mut q = Vec::new();
        let mut cos_m = Vec::new();
        let mut sin_m = Vec::new();
        for a in 0..3 {
            let q_max = Q_WIDTHS * sig[a];
            let m = ((q_max * (support[a] + 1.0 + 5.0 / sig[a]) / (2.0 * PI)).ceil() as usize).max(n);
            let h = q_max / m as f64;
            let qa: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
            let w = even_extension_weights(m, h);
            let mk = |trig: fn(f64) -> f64| {
                Array2::from_shape_fn((n + 1, m + 1), |(i, j)| trig(i as f64 * step[a] * qa[j]) * w[j])
            };
            cos_m.push(mk(f64::cos));
            sin_m.push(mk(f64::sin));
            q.push(qa);
        }

        let shape = (q[0].len(), q[1].len(), q[2].len());
        let mut fields: [Array3<f64>; 4] = std::array::from_fn(|_| Array3::zeros(shape));
        let psi: Vec<Vec<f64>> = (0..3).map(|a| q[a].iter().map(|&x| psi_unchecked(x, sig[a])).collect()).collect();
        for i in 0..shape.0 {
            for j in 0..shape.1 {
                for l in 0..shape.2 {
                    let amp = psi[0][i] * psi[1][j] * psi[2][l];
                    let (e, f, g, h) = unitary_kernels3(q[0][i], q[1][j], q[2][l]);
                    fields[0][[i, j, l]] = e * amp;
                    fields[1][[i, j, l]] = f * amp;
                    fields[2][[i, j, l]] = g * amp;
                    fields[3][[i, j, l]] = h * amp;
                }
            }
        }

        let scale = (2.0 * PI).powf(-1.5);
        let k: [Array3<f64>; 4] = std::array::from_fn(|c| {
            let mats: [&Array2<f64>; 3] =
                std::array::from_fn(|a| if c == a + 1 { &sin_m[a] } else { &cos_m[a] });
            separable_transform(&fields[c], mats) * scale
        });
        let grid = OctantGrid { step, n, k };

        let w = step.map(|h| simpson_weights(n, h));
        let mut norm = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                for l in 0..=n {
                    let d: f64 = grid.k.iter().map(|a| a[[i, j, l]].powi(2)).sum();
                    norm += w[0][i] * w[1][j] * w[2][l] * d;
                }
            }
        }
        let defect = (8.0 * norm - 1.0).abs();
        if !(defect <= OCTANT_NORM_TOL) {
            return Err(Error::Build { defect, tolerance: OCTANT_NORM_TOL });
        }
        Ok(Self { config: cfg.clone(), support, source: Source::Grid(grid) })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    /// Half-widths of the momentum box used for integration.
    pub fn support(&self) -> [f64; 3] {
        self.support
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.source, Source::Radial(_))
    }

    pub fn radial(&self) -> Option<&RadialTable3> {
        match &self.source {
            Source::Radial(r) => Some(r),
            Source::Grid(_) => None,
        }
    }

    /// `[e⁰, f⁰, g⁰, h⁰]` at `p`.
    pub fn kernels(&self, p: [f64; 3]) -> [f64; 4] {
        match &self.source {
            Source::Radial(r) => r.kernels(p),
            Source::Grid(g) => g.eval(p),
        }
    }
}

/// Applies `mats[a]` (shape `(n+1, m_a+1)`) along axis `a` of `field`.
fn separable_transform(field: &Array3<f64>, mats: [&Array2<f64>; 3]) -> Array3<f64> {
    let (m0, m1, m2) = field.dim();
    let flat = field.view().into_shape_with_order((m0, m1 * m2)).expect("contiguous field");
    let s1 = mats[0].dot(&flat);
    let n0 = mats[0].nrows();
    let (n1, n2) = (mats[1].nrows(), mats[2].nrows());
    let mut out = Array3::zeros((n0, n1, n2));
    for (i, mut slab) in out.axis_iter_mut(NdAxis(0)).enumerate() {
        let row = s1.row(i);
        let plane = row.into_shape_with_order((m1, m2)).expect("contiguous row");
        slab.assign(&mats[1].dot(&plane).dot(&mats[2].t()));
    }
    out
}

impl OctantGrid {
    fn eval(&self, p: [f64; 3]) -> [f64; 4] {
        let n = self.n as i64;
        let mut st = [(0i64, [0.0; 4]); 3];
        for a in 0..3 {
            if p[a].abs() > n as f64 * self.step[a] {
                return [0.0; 4];
            }
            st[a] = stencil::<4>(p[a] / self.step[a]);
        }
        let mut out = [0.0; 4];
        for (di, wi) in st[0].1.iter().enumerate() {
            let i = st[0].0 + di as i64;
            if i.abs() > n {
                continue;
            }
            for (dj, wj) in st[1].1.iter().enumerate() {
                let j = st[1].0 + dj as i64;
                if j.abs() > n {
                    continue;
                }
                for (dl, wl) in st[2].1.iter().enumerate() {
                    let l = st[2].0 + dl as i64;
                    if l.abs() > n {
                        continue;
                    }
                    let idx = [i.unsigned_abs() as usize, j.unsigned_abs() as usize, l.unsigned_abs() as usize];
                    let sign = [i, j, l].map(|x| if x < 0 { -1.0 } else { 1.0 });
                    let w = wi * wj * wl;
                    out[0] += w * self.k[0][idx];
                    for c in 0..3 {
                        out[c + 1] += w * sign[c] * self.k[c + 1][idx];
                    }
                }
            }
        }
        out
    }
}
