//! Fermat-Toricelli point of four points in space.
//!
//! The minimizer of `Σ‖aᵢ − z‖` is either a data point `a_j` whose
//! resultant `Σ_{i≠j} (aᵢ − a_j)/‖aᵢ − a_j‖` has norm at most 1, or the
//! unique point where the unit vectors towards all data points sum to zero.
//! Coincident points are merged into weights, which turns the vertex test
//! into `‖Σ wᵢ uᵢⱼ‖ ≤ w_j`.
//!
//! Off the vertices the solver runs Weiszfeld iterations and takes a Newton
//! step instead whenever it lowers the distance sum at least as much.

use serde::Serialize;

use crate::effect::BOUNDARY_TOL;
use crate::error::{Error, Result};
use crate::vec3::Vec3;

pub const MAX_ITERATIONS: usize = 10_000;
pub const STEP_TOL: f64 = 1e-12;
/// Iterates closer than this to a data point are treated as on it.
pub const VERTEX_PROXIMITY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FtResult {
    pub point: Vec3,
    pub is_vertex: bool,
    /// Index into the input of the first point equal to `point`.
    pub vertex_index: Option<usize>,
    pub total_distance: f64,
    pub iterations: usize,
    /// False when the points are collinear and the minimizers form a segment.
    pub unique: bool,
}

pub fn total_distance(points: &[Vec3], z: Vec3) -> f64 {
    points.iter().map(|&p| p.distance(z)).sum()
}

/// Weighted distinct points with the input index of their first copy.
fn merge(points: &[Vec3; 4]) -> Vec<(Vec3, f64, usize)> {
    let mut out: Vec<(Vec3, f64, usize)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        match out.iter_mut().find(|(q, _, _)| *q == p) {
            Some(entry) => entry.1 += 1.0,
            None => out.push((p, 1.0, i)),
        }
    }
    out
}

/// `Σ_{i≠j} wᵢ (aᵢ − a_j)/‖aᵢ − a_j‖` over the merged points.
fn resultant(pts: &[(Vec3, f64, usize)], j: usize) -> Vec3 {
    pts.iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &(p, w, _))| (p - pts[j].0) * (w / (p - pts[j].0).norm()))
        .sum()
}

/// Norm of the unit-vector resultant at input point `j`, counting
/// coincident copies of `a_j` as weight. Vertex optimality holds iff this
/// is at most the weight of `a_j`.
pub fn vertex_resultant_norm(points: &[Vec3; 4], j: usize) -> f64 {
    let pts = merge(points);
    let k = pts.iter().position(|(p, _, _)| *p == points[j]).expect("point is present");
    resultant(&pts, k).norm()
}

fn collinear(pts: &[(Vec3, f64, usize)]) -> Option<Vec3> {
    if pts.len() < 2 {
        return None;
    }
    let d = (pts[1].0 - pts[0].0).normalized()?;
    let scale = pts.iter().map(|(p, _, _)| (*p - pts[0].0).norm()).fold(0.0, f64::max);
    pts.iter()
        .all(|(p, _, _)| (*p - pts[0].0).cross(d).norm() <= 1e-12 * scale.max(1.0))
        .then_some(d)
}

/// Solves the four-point Fermat-Toricelli problem.
pub fn ft_point(points: &[Vec3; 4]) -> Result<FtResult> {
    let pts = merge(points);
    let weight_total: f64 = pts.iter().map(|x| x.1).sum();
    let non_unique = collinear(&pts).is_some_and(|d| {
        // Even total weight splitting evenly along the line leaves a segment.
        let mut proj: Vec<(f64, f64)> = pts.iter().map(|(p, w, _)| ((*p - pts[0].0).dot(d), *w)).collect();
        proj.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        proj.iter().any(|&(_, w)| {
            acc += w;
            acc == weight_total / 2.0
        })
    });

    // Vertex test first: it is exact where Weiszfeld is singular.
    let mut best: Option<(usize, f64)> = None;
    for j in 0..pts.len() {
        if resultant(&pts, j).norm() <= pts[j].1 + BOUNDARY_TOL {
            let t = total_distance(points, pts[j].0);
            if best.is_none_or(|(_, bt)| t < bt) {
                best = Some((j, t));
            }
        }
    }
    if let Some((j, t)) = best {
        return Ok(FtResult {
            point: pts[j].0,
            is_vertex: true,
            vertex_index: Some(pts[j].2),
            total_distance: t,
            iterations: 0,
            unique: !non_unique,
        });
    }

    let scale = pts.iter().map(|(p, _, _)| p.norm()).fold(1.0, f64::max);
    let tol = STEP_TOL * scale;
    let mut z = pts.iter().map(|(p, w, _)| *p * *w).sum::<Vec3>() / weight_total;
    for it in 1..=MAX_ITERATIONS {
        let next = match pts.iter().position(|(p, _, _)| p.distance(z) < VERTEX_PROXIMITY * scale) {
            Some(j) => {
                // Not optimal at this vertex (tested above): step off it along
                // the resultant with the damped length (‖R‖ − w)/Σ wᵢ/dᵢ.
                let r = resultant(&pts, j);
                let denom: f64 = pts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, (p, w, _))| w / p.distance(pts[j].0))
                    .sum();
                pts[j].0 + r * ((r.norm() - pts[j].1) / (r.norm() * denom))
            }
            None => {
                let (mut num, mut den) = (Vec3::ZERO, 0.0);
                for (p, w, _) in &pts {
                    let k = w / p.distance(z);
                    num += *p * k;
                    den += k;
                }
                let weiszfeld = num / den;
                // Newton is taken only when it does at least as well, so
                // the descent property of Weiszfeld is kept.
                match newton_step(&pts, z) {
                    Some(n) if weighted_total(&pts, n) <= weighted_total(&pts, weiszfeld) => n,
                    _ => weiszfeld,
                }
            }
        };
        let step = next.distance(z);
        z = next;
        if step <= tol {
            return Ok(FtResult {
                point: z,
                is_vertex: false,
                vertex_index: None,
                total_distance: total_distance(points, z),
                iterations: it,
                unique: !non_unique,
            });
        }
    }
    Err(Error::NonConvergence { iterations: MAX_ITERATIONS, last: z.to_array() })
}

fn weighted_total(pts: &[(Vec3, f64, usize)], z: Vec3) -> f64 {
    pts.iter().map(|(p, w, _)| w * p.distance(z)).sum()
}

/// Newton iterate for `Σ wᵢ‖z − aᵢ‖`, whose Hessian is
/// `Σ (wᵢ/dᵢ)(I − uᵢuᵢᵀ)`. `None` when the Hessian is numerically singular.
fn newton_step(pts: &[(Vec3, f64, usize)], z: Vec3) -> Option<Vec3> {
    let mut h = [[0.0; 3]; 3];
    let mut g = Vec3::ZERO;
    for (p, w, _) in pts {
        let d = z.distance(*p);
        let u = (z - *p) / d;
        g += u * *w;
        let k = w / d;
        let u = u.to_array();
        for (i, row) in h.iter_mut().enumerate() {
            for (j, hij) in row.iter_mut().enumerate() {
                *hij += k * (if i == j { 1.0 } else { 0.0 } - u[i] * u[j]);
            }
        }
    }
    let det = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
        + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
    let trace = h[0][0] + h[1][1] + h[2][2];
    if !(det.abs() > 1e-12 * trace.powi(3)) {
        return None;
    }
    // Cramer's rule for H s = g.
    let g = g.to_array();
    let solve = |col: usize| {
        let mut m = h;
        for r in 0..3 {
            m[r][col] = g[r];
        }
        (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            / det
    };
    let next = z - Vec3::new(solve(0), solve(1), solve(2));
    next.is_finite().then_some(next)
}

/// Coarse-to-fine grid search for the minimizer of the distance sum.
///
/// Each level scans a `21³` grid over the current window and recentres a
/// window of half the size on the best node, for 30 levels. The slow
/// shrink keeps the minimizer inside the window along flat directions of
/// the objective.
pub fn ft_oracle(points: &[Vec3; 4]) -> Vec3 {
    const N: usize = 20;
    const LEVELS: usize = 30;
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    let mut centre = (lo + hi) * 0.5;
    let mut half = (hi - lo) * 0.5;
    let mut best = centre;
    for _ in 0..LEVELS {
        let cell = half * (2.0 / N as f64);
        let mut best_val = f64::INFINITY;
        for i in 0..=N {
            for j in 0..=N {
                for k in 0..=N {
                    let z = centre - half + Vec3::new(cell.x * i as f64, cell.y * j as f64, cell.z * k as f64);
                    let v = total_distance(points, z);
                    if v < best_val {
                        best_val = v;
                        best = z;
                    }
                }
            }
        }
        centre = best;
        half = half * 0.5;
    }
    best
}

/// Distance-sum check for three observables with unsharpness vectors
/// `l, m, n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FtCondition {
    pub min_total: f64,
    pub holds: bool,
    pub ft: FtResult,
}

/// The sphere centres `A = −l−m−n, B = l+m−n, C = −l+m+n, D = l−m+n`.
pub fn cuboid_points(l: Vec3, m: Vec3, n: Vec3) -> [Vec3; 4] {
    [-l - m - n, l + m - n, -l + m + n, l - m + n]
}

/// Minimal distance sum to `A, B, C, D` and whether it is at most 4.
pub fn ft_condition(l: Vec3, m: Vec3, n: Vec3) -> Result<FtCondition> {
    let ft = ft_point(&cuboid_points(l, m, n))?;
    Ok(FtCondition {
        min_total: ft.total_distance,
        holds: ft.total_distance <= 4.0 + BOUNDARY_TOL,
        ft,
    })
}

/// Largest common unsharpness `a′` with `(a′l̂, a′m̂, a′n̂)` passing
/// [`ft_condition`]; the distance sum is linear in `a′`.
pub fn max_common_aprime(l: Vec3, m: Vec3, n: Vec3) -> Result<f64> {
    Ok(4.0 / ft_condition(l, m, n)?.min_total)
}

/// Unit directions `l̂ = x̂`, `m̂ = (cos φ, sin φ, 0)`,
/// `n̂ = (sin θ cos φ₁, sin θ sin φ₁, cos θ)`.
pub fn directions(theta: f64, phi1: f64, phi: f64) -> [Vec3; 3] {
    [
        Vec3::X,
        Vec3::new(phi.cos(), phi.sin(), 0.0),
        Vec3::new(theta.sin() * phi1.cos(), theta.sin() * phi1.sin(), theta.cos()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn symmetric_configurations() {
        let l = Vec3::new(0.4, 0.1, 0.0);
        let m = Vec3::new(-0.1, 0.5, 0.0);
        let r = ft_point(&[l + m, -(l + m), l - m, m - l]).unwrap();
        assert!(r.point.norm() < 1e-9 && !r.is_vertex);

        let s = 1.0 / 3f64.sqrt();
        let r = ft_point(&cuboid_points(Vec3::X * s, Vec3::Y * s, Vec3::Z * s)).unwrap();
        assert!(r.point.norm() < 1e-9);
        assert!((r.total_distance - 4.0).abs() < 1e-12);

        let tet = [
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ];
        let shift = Vec3::new(0.3, -2.0, 5.0);
        let r = ft_point(&tet.map(|p| p + shift)).unwrap();
        assert!(r.point.distance(shift) < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        let r = ft_point(&[p; 4]).unwrap();
        assert_eq!(r.point, p);
        assert!(r.is_vertex && r.unique);
        assert_eq!(ft_oracle(&[p; 4]), p);

        let line = [0.0, 1.0, 2.0, 3.0].map(|t| Vec3::X * t);
        let r = ft_point(&line).unwrap();
        assert!(!r.unique);
        assert!((r.total_distance - 4.0).abs() < 1e-12);

        // Triple point dominates.
        let r = ft_point(&[Vec3::ZERO, Vec3::ZERO, Vec3::ZERO, Vec3::Y]).unwrap();
        assert_eq!(r.point, Vec3::ZERO);
        assert_eq!(r.vertex_index, Some(0));
    }

    #[test]
    fn reference_triple_is_vertex_b() {
        let [l, m, n] = directions(0.414 * PI, 0.159 * PI, 0.477 * PI);
        let c = ft_condition(l, m, n).unwrap();
        assert!(c.ft.is_vertex);
        assert_eq!(c.ft.vertex_index, Some(1));
        let a = max_common_aprime(l, m, n).unwrap();
        assert!((a - 0.667).abs() < 0.002, "a' = {a}");
    }

    #[test]
    fn oracle_agrees_on_generic_set() {
        let pts = [
            Vec3::new(0.1, 0.2, -0.3),
            Vec3::new(1.0, -0.4, 0.2),
            Vec3::new(-0.5, 0.9, 0.7),
            Vec3::new(0.3, 0.1, 1.2),
        ];
        let r = ft_point(&pts).unwrap();
        let o = ft_oracle(&pts);
        assert!(r.point.distance(o) < 1e-3);
        assert!(r.total_distance <= total_distance(&pts, o) + 1e-9);
    }
}
