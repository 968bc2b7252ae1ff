//! Direct complex evaluation of the two-detector kernels at arbitrary
//! momenta, without any parity assumption.
//!
//! Slower than [`super::KernelTable2`] but independent of it: it sums the
//! full complex Fourier integral over the signed position grid, so the
//! parities and the realness of the kernels are outputs rather than inputs.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::gaussian::{psi_unchecked, unitary_kernels2};
use super::quadrature::trapezoid_weights;
use super::{DetectorConfig, Q_WIDTHS};
use crate::error::Result;
use crate::vec3::Vec3;

#[derive(Debug, Clone)]
pub struct KernelEvaluator2 {
    q1: Array1<f64>,
    q2: Array1<f64>,
    e: Array2<f64>,
    f_im: Array2<f64>,
    g_im: Array2<f64>,
}

/// Complex kernel values `(e⁰, f⁰, g⁰)` at one momentum.
pub type Kernels2 = (Complex64, Complex64, Complex64);

fn signed_grid(sigma: f64, p_max: f64, min_half: usize) -> (Array1<f64>, Vec<f64>) {
    let q_max = Q_WIDTHS * sigma;
    let half = ((q_max * (p_max + 1.0 + 5.0 / sigma) / (2.0 * PI)).ceil() as usize).max(min_half);
    let h = q_max / half as f64;
    let q = Array1::from_iter((0..=2 * half).map(|i| -q_max + i as f64 * h));
    (q, trapezoid_weights(2 * half, h))
}

impl KernelEvaluator2 {
    pub fn new(cfg: &DetectorConfig) -> Result<Self> {
        cfg.validate(2)?;
        let n = cfg.grid_points / 2;
        let (s1, s2) = (cfg.sigmas[0], cfg.sigmas[1]);
        let (q1, w1) = signed_grid(s1, cfg.p_extent(0), n);
        let (q2, w2) = signed_grid(s2, cfg.p_extent(1), n);
        let shape = (q1.len(), q2.len());
        let mut e = Array2::zeros(shape);
        let mut f_im = Array2::zeros(shape);
        let mut g_im = Array2::zeros(shape);
        for i in 0..shape.0 {
            let a = w1[i] * psi_unchecked(q1[i], s1);
            for j in 0..shape.1 {
                let amp = a * w2[j] * psi_unchecked(q2[j], s2) / (2.0 * PI);
                let (ke, kf, kg) = unitary_kernels2(q1[i], q2[j]);
                e[[i, j]] = ke * amp;
                f_im[[i, j]] = kf * amp;
                g_im[[i, j]] = kg * amp;
            }
        }
        Ok(Self { q1, q2, e, f_im, g_im })
    }

    /// `(e⁰, f⁰, g⁰)` at `(p₁, p₂)` with the `e^{-ip·q}` convention.
    pub fn eval(&self, p1: f64, p2: f64) -> Kernels2 {
        let u: Vec<Complex64> = self.q1.iter().map(|&q| Complex64::from_polar(1.0, -p1 * q)).collect();
        let v: Vec<Complex64> = self.q2.iter().map(|&q| Complex64::from_polar(1.0, -p2 * q)).collect();
        let (mut e, mut f, mut g) = (Complex64::ZERO, Complex64::ZERO, Complex64::ZERO);
        for (i, ui) in u.iter().enumerate() {
            let (mut re, mut rf, mut rg) = (Complex64::ZERO, Complex64::ZERO, Complex64::ZERO);
            for (j, vj) in v.iter().enumerate() {
                re += vj * self.e[[i, j]];
                rf += vj * self.f_im[[i, j]];
                rg += vj * self.g_im[[i, j]];
            }
            e += ui * re;
            f += ui * rf;
            g += ui * rg;
        }
        let i = Complex64::I;
        (e, i * f, i * g)
    }

    /// Outcome density `⟨χ|T†T|χ⟩` at `(p₁, p₂)` for the state with Bloch
    /// vector `r`, where `T = e⁰ + f⁰σx + g⁰σy`.
    pub fn density(&self, p1: f64, p2: f64, r: Vec3) -> f64 {
        density_from(self.eval(p1, p2), r)
    }
}

/// `|e|² + |f|² + |g|² + 2Re(f ē)x + 2Re(g ē)y − 2Im(g f̄)z`.
pub fn density_from((e, f, g): Kernels2, r: Vec3) -> f64 {
    e.norm_sqr() + f.norm_sqr() + g.norm_sqr() + 2.0 * (f * e.conj()).re * r.x + 2.0 * (g * e.conj()).re * r.y
        - 2.0 * (g * f.conj()).im * r.z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelTable2;

    #[test]
    fn agrees_with_table_and_is_real() {
        let cfg = DetectorConfig::two(0.6, 0.9).with_grid_points(256);
        let ev = KernelEvaluator2::new(&cfg).unwrap();
        let t = KernelTable2::build(&cfg).unwrap();
        for (i, j) in [(0, 0), (3, 5), (10, 2), (20, 17)] {
            let (p1, p2) = (t.axis(0).point(i), t.axis(1).point(j));
            let (e, f, g) = ev.eval(p1, p2);
            assert!(e.im.abs() < 1e-12 && f.im.abs() < 1e-12 && g.im.abs() < 1e-12);
            assert!((e.re - t.e0()[[i, j]]).abs() < 1e-10);
            assert!((f.re - t.f0()[[i, j]]).abs() < 1e-10);
            assert!((g.re - t.g0()[[i, j]]).abs() < 1e-10);
        }
    }
}
