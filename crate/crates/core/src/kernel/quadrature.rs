//! Fixed-grid quadrature weights and local polynomial interpolation.

/// Composite Simpson weights for `n` intervals of width `h` (`n` even).
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2 && n % 2 == 0, "Simpson rule needs an even interval count, got {n}");
    (0..=n)
        .map(|i| {
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Trapezoid weights on `[0, n·h]` for an even integrand, doubled so the
/// sum approximates the integral over `[-n·h, n·h]`.
pub fn even_extension_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == 0 || i == n { h } else { 2.0 * h })
        .collect()
}

/// Plain trapezoid weights on `n + 1` points spaced `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == 0 || i == n { 0.5 * h } else { h })
        .collect()
}

/// Lagrange basis weights for `K` equispaced nodes `0, 1, …, K-1`
/// evaluated at fractional position `t` (in node units).
pub fn lagrange_weights<const K: usize>(t: f64) -> [f64; K] {
    let mut w = [1.0; K];
    for (j, wj) in w.iter_mut().enumerate() {
        for m in 0..K {
            if m != j {
                *wj *= (t - m as f64) / (j as f64 - m as f64);
            }
        }
    }
    w
}

/// Interpolation stencil on a uniform grid: first node index and weights
/// for the `K` nodes around fractional index `x`.
pub fn stencil<const K: usize>(x: f64) -> (i64, [f64; K]) {
    let start = x.floor() as i64 - (K as i64 / 2 - 1);
    (start, lagrange_weights::<K>(x - start as f64))
}
