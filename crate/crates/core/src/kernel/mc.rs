//! Stratified Monte Carlo over axis-aligned boxes.
//!
//! The box is cut into `k^D` equal cells with proportional allocation. Each
//! cell draws from its own ChaCha8 stream selected by the cell index, and
//! cell results are reduced in index order, so estimates are bit-identical
//! for a fixed seed regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DetectorConfig, KernelTable3};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: u64,
}

impl McEstimate {
    pub fn scaled(self, k: f64) -> Self {
        Self { value: self.value * k, stderr: self.stderr * k.abs(), n_samples: self.n_samples }
    }
}

#[derive(Clone, Copy)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

/// Integrates the `k` components written by `f` over `[lo, hi]`.
///
/// `samples` is split evenly across `strata_per_axis^D` cells with at least
/// two samples per cell.
pub fn stratified<const D: usize, F>(
    f: F,
    k: usize,
    lo: [f64; D],
    hi: [f64; D],
    samples: u64,
    strata_per_axis: usize,
    seed: u64,
) -> Result<Vec<McEstimate>>
where
    F: Fn(&[f64; D], &mut [f64]) + Sync,
{
    if strata_per_axis == 0 {
        return Err(Error::Config("strata_per_axis must be positive".into()));
    }
    let cells = strata_per_axis.pow(D as u32);
    let per_cell = samples.div_ceil(cells as u64).max(2);
    let mut width = [0.0; D];
    for d in 0..D {
        width[d] = (hi[d] - lo[d]) / strata_per_axis as f64;
    }
    let cell_volume: f64 = width.iter().product();

    let results: Vec<Result<Vec<Moments>>> = (0..cells)
        .into_par_iter()
        .map(|cell| {
            let mut origin = [0.0; D];
            let mut rem = cell;
            for d in 0..D {
                origin[d] = lo[d] + (rem % strata_per_axis) as f64 * width[d];
                rem /= strata_per_axis;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(cell as u64);
            let mut acc = vec![Moments { n: 0, mean: 0.0, m2: 0.0 }; k];
            let mut out = vec![0.0; k];
            let mut p = [0.0; D];
            for _ in 0..per_cell {
                for d in 0..D {
                    p[d] = origin[d] + width[d] * rng.random::<f64>();
                }
                f(&p, &mut out);
                for (m, &x) in acc.iter_mut().zip(&out) {
                    if !x.is_finite() {
                        return Err(Error::NonFinite { point: p.to_vec() });
                    }
                    m.n += 1;
                    let delta = x - m.mean;
                    m.mean += delta / m.n as f64;
                    m.m2 += delta * (x - m.mean);
                }
            }
            Ok(acc)
        })
        .collect();

    let mut value = vec![0.0; k];
    let mut var = vec![0.0; k];
    for r in results {
        for (j, m) in r?.iter().enumerate() {
            value[j] += cell_volume * m.mean;
            var[j] += cell_volume * cell_volume * m.m2 / ((m.n - 1) as f64 * m.n as f64);
        }
    }
    let n_samples = per_cell * cells as u64;
    Ok((0..k)
        .map(|j| McEstimate { value: value[j], stderr: var[j].sqrt(), n_samples })
        .collect())
}

/// Kernel products available to the three-detector integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Product3 {
    /// `e⁰² + f⁰² + g⁰² + h⁰²`.
    Density,
    EF,
    EG,
    EH,
    /// `e⁰ (f⁰, g⁰, h⁰)·d`.
    EDir(Vec3),
}

impl Product3 {
    #[inline]
    pub fn apply(self, [e, f, g, h]: [f64; 4]) -> f64 {
        match self {
            Product3::Density => e * e + f * f + g * g + h * h,
            Product3::EF => e * f,
            Product3::EG => e * g,
            Product3::EH => e * h,
            Product3::EDir(d) => e * (f * d.x + g * d.y + h * d.z),
        }
    }
}

/// Integration region in momentum space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region3 {
    Full,
    /// `p·normal ≥ 0`.
    HalfSpace { normal: Vec3 },
}

impl Region3 {
    pub fn half(normal: Vec3) -> Self {
        Region3::HalfSpace { normal }
    }
}

/// MC estimates of several products over one region, sharing samples.
pub fn integrate_table3(table: &KernelTable3, products: &[Product3], region: Region3) -> Result<Vec<McEstimate>> {
    let cfg = table.config();
    let support = table.support();
    let mut lo = support.map(|s| -s);
    let hi = support;
    let mut mask = None;
    if let Region3::HalfSpace { normal } = region {
        let a = normal.to_array();
        let nonzero: Vec<usize> = (0..3).filter(|&i| a[i] != 0.0).collect();
        match nonzero.as_slice() {
            [] => return Err(Error::Domain("half-space normal must be non-zero".into())),
            // Axis-aligned half-spaces shrink the box instead of masking.
            [i] if a[*i] > 0.0 => lo[*i] = 0.0,
            _ => mask = Some(normal),
        }
    }
    stratified(
        |p: &[f64; 3], out: &mut [f64]| {
            let inside = mask.is_none_or(|n| p[0] * n.x + p[1] * n.y + p[2] * n.z >= 0.0);
            if !inside {
                out.fill(0.0);
                return;
            }
            let k = table.kernels(*p);
            for (o, prod) in out.iter_mut().zip(products) {
                *o = prod.apply(k);
            }
        },
        products.len(),
        lo,
        hi,
        cfg.mc_samples,
        cfg.mc_strata_per_axis,
        cfg.seed,
    )
}

/// Builds the three-detector kernels for `cfg` and integrates one product.
pub fn mc_integrate3(cfg: &DetectorConfig, product: Product3, region: Region3) -> Result<McEstimate> {
    let table = KernelTable3::build(cfg)?;
    Ok(integrate_table3(&table, &[product], region)?[0])
}
