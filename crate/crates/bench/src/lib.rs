//! Shared benchmark fixtures.

use ajm_core::geometry_ft::{cuboid_points, directions};
use ajm_core::Vec3;

/// Sphere centres for the three directions used by the common-`a′` check.
pub fn ft_fixture() -> [Vec3; 4] {
    let [l, m, n] = directions(0.3 * std::f64::consts::PI, 0.25 * std::f64::consts::PI, 0.4 * std::f64::consts::PI);
    cuboid_points(l * 0.6, m * 0.6, n * 0.6)
}
