//! Bessel functions of the first kind for the radial reductions.
//!
//! Power series below `x = 12`, Hankel asymptotic expansion above; both
//! branches are accurate to ~1e-12 absolute on the real line.

use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 12.0;

fn series(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = half.powi(nu as i32) / (1..=nu).product::<u32>().max(1) as f64;
    let mut sum = term;
    let mut k = 1.0;
    while term.abs() > 1e-17 * sum.abs().max(1e-300) || k < 4.0 {
        term *= q / (k * (k + nu as f64));
        sum += term;
        k += 1.0;
        if k > 200.0 {
            break;
        }
    }
    sum
}

fn asymptotic(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let chi = x - (0.5 * nu as f64 + 0.25) * PI;
    // a_k = (μ-1²)(μ-3²)…(μ-(2k-1)²) / (k! 8^k x^k); P sums even k, Q odd k.
    let (mut p, mut q) = (1.0, 0.0);
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() >= prev {
            break;
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        series(0, x)
    } else {
        asymptotic(0, x)
    }
}

pub fn j1(x: f64) -> f64 {
    let s = x.signum();
    let x = x.abs();
    s * if x < SERIES_LIMIT { series(1, x) } else { asymptotic(1, x) }
}

/// Spherical Bessel `j0(x) = sin x / x`.
pub fn sph_j0(x: f64) -> f64 {
    super::gaussian::sinc(x)
}

/// Spherical Bessel `j1(x) = sin x / x² − cos x / x`.
pub fn sph_j1(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)))
    } else {
        x.sin() / (x * x) - x.cos() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Reference values from an independent implementation.
        let cases = [
            (0.0, 1.0, 0.0),
            (1.0, 0.765_197_686_557_966_6, 0.440_050_585_744_933_5),
            (5.0, -0.177_596_771_314_338_3, -0.327_579_137_591_465_2),
            (11.9, 0.025_049_441_699_589_86, -0.228_983_249_661_924_04),
            (12.0, 0.047_689_310_796_833_35, -0.223_447_104_490_627_6),
            (30.0, -0.086_367_983_581_040_31, -0.118_751_062_616_623_05),
        ];
        for (x, a, b) in cases {
            assert!((j0(x) - a).abs() < 1e-11, "j0({x}) = {}", j0(x));
            assert!((j1(x) - b).abs() < 1e-11, "j1({x}) = {}", j1(x));
        }
    }

    #[test]
    fn branches_agree_at_switch() {
        for x in [11.999_999, 12.000_001] {
            assert!((series(0, x) - asymptotic(0, x)).abs() < 1e-11);
            assert!((series(1, x) - asymptotic(1, x)).abs() < 1e-11);
        }
    }

    #[test]
    fn spherical_series_matches_closed_form() {
        for x in [0.049_999_f64, 0.050_001] {
            let closed = x.sin() / (x * x) - x.cos() / x;
            assert!((sph_j1(x) - closed).abs() < 1e-12);
        }
        assert_eq!(sph_j1(0.0), 0.0);
    }
}
