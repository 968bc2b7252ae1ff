//! Closed-form qubit effect algebra.
//!
//! A qubit effect is written `(γ·1 + v·σ)/2`; its eigenvalues are
//! `(γ ± ‖v‖)/2`, so positivity and boundedness reduce to the two scalar
//! conditions `‖v‖ ≤ γ` and `‖v‖ ≤ 2 − γ`. Joint observables for two and
//! three unsharp observables are parametrized so that their marginals are
//! reproduced by construction; validity is then decided effect by effect.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::vec3::Vec3;

/// Absolute slack accepted at analytically saturated boundaries.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Qubit effect `(gamma·1 + v·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Effect {
    pub gamma: f64,
    pub v: Vec3,
}

impl Effect {
    pub const fn new(gamma: f64, v: Vec3) -> Self {
        Self { gamma, v }
    }

    pub const IDENTITY: Effect = Effect::new(2.0, Vec3::ZERO);

    /// Both eigenvalues `(γ ± ‖v‖)/2`, smaller first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let r = self.v.norm();
        ((self.gamma - r) / 2.0, (self.gamma + r) / 2.0)
    }

    pub fn is_valid(&self) -> bool {
        is_valid_effect(self)
    }

    /// `tr(ρ E)` for the state with Bloch vector `r`.
    pub fn expectation(&self, r: Vec3) -> f64 {
        (self.gamma + self.v.dot(r)) / 2.0
    }

    pub fn max_abs_diff(&self, other: &Effect) -> f64 {
        (self.gamma - other.gamma)
            .abs()
            .max(self.v.max_abs_diff(other.v))
    }
}

impl std::ops::Add for Effect {
    type Output = Effect;
    fn add(self, o: Effect) -> Effect {
        Effect::new(self.gamma + o.gamma, self.v + o.v)
    }
}

impl std::ops::Sub for Effect {
    type Output = Effect;
    fn sub(self, o: Effect) -> Effect {
        Effect::new(self.gamma - o.gamma, self.v - o.v)
    }
}

impl std::iter::Sum for Effect {
    fn sum<I: Iterator<Item = Effect>>(iter: I) -> Effect {
        iter.fold(Effect::default(), |a, b| a + b)
    }
}

/// True iff `‖v‖ ≤ γ ≤ 2 − ‖v‖` (within [`BOUNDARY_TOL`]).
pub fn is_valid_effect(e: &Effect) -> bool {
    let r = e.v.norm();
    e.gamma.is_finite() && e.v.is_finite() && r <= e.gamma + BOUNDARY_TOL && r <= 2.0 - e.gamma + BOUNDARY_TOL
}

/// Worst violation of the two effect inequalities; non-positive means valid.
pub fn effect_violation(e: &Effect) -> f64 {
    let r = e.v.norm();
    (r - e.gamma).max(r - (2.0 - e.gamma))
}

/// Distance between the two-outcome observables generated by `a` and `b`:
/// `½‖a − b‖ + ½|α − β|`.
pub fn observable_distance(a: &Effect, b: &Effect) -> f64 {
    0.5 * (a.v - b.v).norm() + 0.5 * (a.gamma - b.gamma).abs()
}

/// Lower bound `D₀(θ) = (cos θ/2 + sin θ/2 − 1)/√2` on half the summed
/// distances of two jointly measurable approximations to sharp spin
/// observables at relative angle `theta`.
pub fn d0_bound(theta: f64) -> f64 {
    ((theta / 2.0).cos() + (theta / 2.0).sin() - 1.0) / std::f64::consts::SQRT_2
}

/// Joint measurability of two unbiased observables: `‖a+b‖ + ‖a−b‖ ≤ 2`.
pub fn jm_unbiased_ok(a: Vec3, b: Vec3) -> bool {
    (a + b).norm() + (a - b).norm() <= 2.0 + BOUNDARY_TOL
}

/// Two-outcome observable `Υ± = (1 ± (x + m·σ))/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UnsharpObservable {
    pub x: f64,
    pub m: Vec3,
}

impl UnsharpObservable {
    pub const fn new(x: f64, m: Vec3) -> Self {
        Self { x, m }
    }

    pub const fn unbiased(m: Vec3) -> Self {
        Self { x: 0.0, m }
    }

    pub fn effect(&self, s: Sign) -> Effect {
        let a = s.value();
        Effect::new(1.0 + a * self.x, self.m * a)
    }

    /// `|x| + ‖m‖ ≤ 1`.
    pub fn is_valid(&self) -> bool {
        self.x.abs() + self.m.norm() <= 1.0 + BOUNDARY_TOL
    }
}

/// Joint observable for two unsharp observables,
/// `G_ab = [1 + ax + by + abZ + (ab·z + a·m + b·n)·σ]/4`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointObservable2 {
    pub obs1: UnsharpObservable,
    pub obs2: UnsharpObservable,
    #[serde(rename = "Z")]
    pub big_z: f64,
    pub z: Vec3,
}

/// The four outcomes in the order `++, +-, -+, --`.
pub const OUTCOMES2: [(Sign, Sign); 4] = [
    (Sign::Plus, Sign::Plus),
    (Sign::Plus, Sign::Minus),
    (Sign::Minus, Sign::Plus),
    (Sign::Minus, Sign::Minus),
];

/// The eight outcomes with `+` ordered before `-` in each slot.
pub const OUTCOMES3: [(Sign, Sign, Sign); 8] = [
    (Sign::Plus, Sign::Plus, Sign::Plus),
    (Sign::Plus, Sign::Plus, Sign::Minus),
    (Sign::Plus, Sign::Minus, Sign::Plus),
    (Sign::Plus, Sign::Minus, Sign::Minus),
    (Sign::Minus, Sign::Plus, Sign::Plus),
    (Sign::Minus, Sign::Plus, Sign::Minus),
    (Sign::Minus, Sign::Minus, Sign::Plus),
    (Sign::Minus, Sign::Minus, Sign::Minus),
];

pub fn outcome_label2(o: (Sign, Sign)) -> String {
    format!("{}{}", o.0, o.1)
}

pub fn outcome_label3(o: (Sign, Sign, Sign)) -> String {
    format!("{}{}{}", o.0, o.1, o.2)
}

impl JointObservable2 {
    pub fn new(obs1: UnsharpObservable, obs2: UnsharpObservable, big_z: f64, z: Vec3) -> Self {
        Self { obs1, obs2, big_z, z }
    }

    pub fn effect(&self, a: Sign, b: Sign) -> Effect {
        let (sa, sb) = (a.value(), b.value());
        let gamma = 1.0 + sa * self.obs1.x + sb * self.obs2.x + sa * sb * self.big_z;
        let v = self.z * (sa * sb) + self.obs1.m * sa + self.obs2.m * sb;
        Effect::new(gamma / 2.0, v / 2.0)
    }

    /// Marginal effect of the first observable for outcome `a`.
    pub fn marginal1(&self, a: Sign) -> Effect {
        self.effect(a, Sign::Plus) + self.effect(a, Sign::Minus)
    }

    pub fn marginal2(&self, b: Sign) -> Effect {
        self.effect(Sign::Plus, b) + self.effect(Sign::Minus, b)
    }
}

/// The four effects `G_{++}, G_{+-}, G_{-+}, G_{--}`.
pub fn build_joint2(j: &JointObservable2) -> [Effect; 4] {
    OUTCOMES2.map(|(a, b)| j.effect(a, b))
}

pub fn joint2_is_valid(j: &JointObservable2) -> bool {
    build_joint2(j).iter().all(is_valid_effect)
}

/// Largest effect-inequality violation over the four joint effects.
pub fn joint2_violation(j: &JointObservable2) -> f64 {
    build_joint2(j)
        .iter()
        .map(effect_violation)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Joint observable for three unsharp observables with pairwise parameters
/// `(Z₁, z₁)` for (1,2), `(Z₂, z₂)` for (2,3), `(Z₃, z₃)` for (3,1) and the
/// triple term `(Z₄, z₄)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointObservable3 {
    pub obs: [UnsharpObservable; 3],
    #[serde(rename = "Z")]
    pub big_z: [f64; 4],
    pub z: [Vec3; 4],
}

impl JointObservable3 {
    pub fn effect(&self, a: Sign, b: Sign, c: Sign) -> Effect {
        let (sa, sb, sc) = (a.value(), b.value(), c.value());
        let [o1, o2, o3] = &self.obs;
        let [z1, z2, z3, z4] = self.big_z;
        let gamma = 1.0
            + sa * o1.x
            + sb * o2.x
            + sc * o3.x
            + sa * sb * z1
            + sb * sc * z2
            + sc * sa * z3
            + sa * sb * sc * z4;
        let v = self.z[0] * (sa * sb)
            + self.z[1] * (sb * sc)
            + self.z[2] * (sc * sa)
            + self.z[3] * (sa * sb * sc)
            + o1.m * sa
            + o2.m * sb
            + o3.m * sc;
        Effect::new(gamma / 4.0, v / 4.0)
    }

    /// Single-observable marginal `Υ^k_s` as the sum of the four joint effects
    /// with slot `k` fixed to `s`.
    pub fn marginal(&self, k: usize, s: Sign) -> Effect {
        OUTCOMES3
            .iter()
            .filter(|o| [o.0, o.1, o.2][k] == s)
            .map(|&(a, b, c)| self.effect(a, b, c))
            .sum()
    }

    /// Pairwise marginal of slots `(i, j)`, `i < j`, summed over the third.
    pub fn pair_marginal(&self, i: usize, j: usize, si: Sign, sj: Sign) -> Effect {
        OUTCOMES3
            .iter()
            .filter(|o| {
                let s = [o.0, o.1, o.2];
                s[i] == si && s[j] == sj
            })
            .map(|&(a, b, c)| self.effect(a, b, c))
            .sum()
    }

    /// The two-observable joint observable the pair `(i, j)` reduces to.
    pub fn pair_observable(&self, i: usize, j: usize) -> JointObservable2 {
        let (k, zi) = match (i, j) {
            (0, 1) => (0, 0),
            (1, 2) => (1, 1),
            (0, 2) => (2, 2),
            _ => panic!("pair ({i}, {j}) must be one of (0,1), (1,2), (0,2)"),
        };
        JointObservable2::new(self.obs[i], self.obs[j], self.big_z[k], self.z[zi])
    }
}

pub fn build_joint3(j: &JointObservable3) -> [Effect; 8] {
    OUTCOMES3.map(|(a, b, c)| j.effect(a, b, c))
}

pub fn joint3_is_valid(j: &JointObservable3) -> bool {
    build_joint3(j).iter().all(is_valid_effect)
}

/// Outcome of the four-sphere necessary condition for three observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NecessaryCondition3 {
    /// Left-hand sides `‖∓l∓m∓n − z₄‖` in the order A, B, D, C of the
    /// sphere centres `−l−m−n, l+m−n, l−m+n, −l+m+n`.
    pub lhs: [f64; 4],
    /// Radii `1 ± Z₁ ± Z₂ ± Z₃` matching `lhs`.
    pub radii: [f64; 4],
    pub individual: [bool; 4],
    /// Sum of the four distances, compared against the total radius 4.
    pub total: f64,
    pub summed: bool,
    pub all: bool,
}

/// The four inequalities implied by positivity of complementary effect
/// pairs `G_pqr`, `G_(-p)(-q)(-r)`, plus their sum.
pub fn necessary_condition_3(
    l: Vec3,
    m: Vec3,
    n: Vec3,
    z1: f64,
    z2: f64,
    z3: f64,
    z4: Vec3,
) -> NecessaryCondition3 {
    let lhs = [
        (-l - m - n - z4).norm(),
        (l + m - n - z4).norm(),
        (l - m + n - z4).norm(),
        (-l + m + n - z4).norm(),
    ];
    let radii = [
        1.0 + z1 + z2 + z3,
        1.0 + z1 - z2 - z3,
        1.0 - z1 - z2 + z3,
        1.0 - z1 + z2 - z3,
    ];
    let individual = [0, 1, 2, 3].map(|i| lhs[i] <= radii[i] + BOUNDARY_TOL);
    let total: f64 = lhs.iter().sum();
    let summed = total <= 4.0 + 4.0 * BOUNDARY_TOL;
    NecessaryCondition3 {
        lhs,
        radii,
        individual,
        total,
        summed,
        all: individual.iter().all(|&b| b) && summed,
    }
}

/// Result of the brute-force completion search for two observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completion2 {
    pub joint: JointObservable2,
    /// Largest effect-inequality violation at the best point found.
    pub max_violation: f64,
}

impl Completion2 {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

/// Searches `(Z, z)` for a joint observable with the given marginals,
/// minimizing the worst effect violation.
///
/// This is a verification oracle: a coarse grid over `Z ∈ [-1, 1]`,
/// `z ∈ [-1, 1]³` followed by compass-search refinement. It does not
/// certify infeasibility beyond the resolution it reaches.
pub fn search_joint2_completion(obs1: UnsharpObservable, obs2: UnsharpObservable) -> Completion2 {
    let objective = |p: &[f64; 4]| {
        joint2_violation(&JointObservable2::new(obs1, obs2, p[0], Vec3::new(p[1], p[2], p[3])))
    };

    const COARSE: usize = 11;
    let axis = |i: usize| -1.0 + 2.0 * i as f64 / (COARSE - 1) as f64;
    let mut best = [0.0; 4];
    let mut best_val = objective(&best);
    for iz in 0..2 * COARSE - 1 {
        let big_z = -1.0 + iz as f64 / (COARSE - 1) as f64;
        for a in 0..COARSE {
            for b in 0..COARSE {
                for c in 0..COARSE {
                    let p = [big_z, axis(a), axis(b), axis(c)];
                    let v = objective(&p);
                    if v < best_val {
                        best_val = v;
                        best = p;
                    }
                }
            }
        }
    }

    // Compass search over the 4 coordinates and the 12 pairwise diagonals;
    // diagonals help across the kinks of the max-of-norms objective.
    let mut dirs: Vec<[f64; 4]> = Vec::new();
    for i in 0..4 {
        let mut d = [0.0; 4];
        d[i] = 1.0;
        dirs.push(d);
        for j in (i + 1)..4 {
            for s in [1.0, -1.0] {
                let mut d = [0.0; 4];
                d[i] = 1.0;
                d[j] = s;
                dirs.push(d);
            }
        }
    }
    let mut step = 0.1;
    while step > 1e-13 {
        let mut improved = false;
        for d in &dirs {
            for s in [1.0, -1.0] {
                let p = [0, 1, 2, 3].map(|i| best[i] + s * step * d[i]);
                let v = objective(&p);
                if v < best_val {
                    best_val = v;
                    best = p;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Completion2 {
        joint: JointObservable2::new(obs1, obs2, best[0], Vec3::new(best[1], best[2], best[3])),
        max_violation: best_val,
    }
}
