//! Pointer wavefunctions and the position-space unitary kernels.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Below this radius `sin(R)/R` is evaluated by its Taylor series.
pub const SINC_SERIES_RADIUS: f64 = 1e-4;

/// Unit-norm Gaussian amplitude `(2πσ²)^(-1/4) exp(-q²/(4σ²))`.
pub fn gaussian_psi(q: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be positive and finite, got {sigma}")));
    }
    Ok(psi_unchecked(q, sigma))
}

#[inline]
pub(crate) fn psi_unchecked(q: f64, sigma: f64) -> f64 {
    (2.0 * PI * sigma * sigma).powf(-0.25) * (-q * q / (4.0 * sigma * sigma)).exp()
}

/// `sin(R)/R` with the removable singularity filled in.
#[inline]
pub fn sinc(r: f64) -> f64 {
    if r.abs() < SINC_SERIES_RADIUS {
        let r2 = r * r;
        1.0 - r2 / 6.0 + r2 * r2 / 120.0
    } else {
        r.sin() / r
    }
}

/// Kernels of `U = e + f σx + g σy` at `(q1, q2)`, returned as
/// `(e, f_im, g_im)` with `f = i·f_im`, `g = i·g_im`.
#[inline]
pub fn unitary_kernels2(q1: f64, q2: f64) -> (f64, f64, f64) {
    let r = q1.hypot(q2);
    let s = sinc(r);
    (r.cos(), q1 * s, q2 * s)
}

/// Three-detector analogue: `(e, f_im, g_im, h_im)` for
/// `U = e + f σx + g σy + h σz`.
#[inline]
pub fn unitary_kernels3(q1: f64, q2: f64, q3: f64) -> (f64, f64, f64, f64) {
    let r = (q1 * q1 + q2 * q2 + q3 * q3).sqrt();
    let s = sinc(r);
    (r.cos(), q1 * s, q2 * s, q3 * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::quadrature::simpson_weights;

    #[test]
    fn psi_value_and_domain() {
        assert!((gaussian_psi(0.0, 1.0).unwrap() - (2.0 * PI).powf(-0.25)).abs() < 1e-15);
        assert!((gaussian_psi(0.0, 1.0).unwrap() - 0.63162).abs() < 1e-5);
        assert!(gaussian_psi(1.0, 0.0).is_err());
        assert!(gaussian_psi(1.0, -2.0).is_err());
    }

    #[test]
    fn psi_moments() {
        for sigma in [0.1, 0.7, 3.0] {
            let n = 4000;
            let l = 12.0 * sigma;
            let h = 2.0 * l / n as f64;
            let w = simpson_weights(n, h);
            let (mut norm, mut var) = (0.0, 0.0);
            for (i, wi) in w.iter().enumerate() {
                let q = -l + i as f64 * h;
                let p2 = gaussian_psi(q, sigma).unwrap().powi(2);
                norm += wi * p2;
                var += wi * p2 * q * q;
                assert_eq!(gaussian_psi(q, sigma).unwrap(), gaussian_psi(-q, sigma).unwrap());
            }
            assert!((norm - 1.0).abs() < 1e-12);
            assert!((var - sigma * sigma).abs() < 1e-8 * sigma * sigma.max(1.0));
        }
    }

    #[test]
    fn kernel_values() {
        assert_eq!(unitary_kernels2(0.0, 0.0), (1.0, 0.0, 0.0));
        let (e, f, g) = unitary_kernels2(PI, 0.0);
        assert!((e + 1.0).abs() < 1e-15 && f.abs() < 1e-15 && g == 0.0);
        let (e, f, g) = unitary_kernels2(3e-5, -2e-5);
        assert!((e * e + f * f + g * g - 1.0).abs() < 1e-15);
        let r = SINC_SERIES_RADIUS * 0.999;
        assert!((sinc(r) - r.sin() / r).abs() < 1e-15);
    }
}
