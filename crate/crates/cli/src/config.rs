//! Per-command JSON configuration schemas and their validation.
//!
//! Every struct rejects unknown fields. Validated structs are echoed back in
//! the JSON report with defaults filled in.

use std::f64::consts::PI;
use std::path::Path;

use ajm_core::kernel::{DEFAULT_GRID_POINTS, DEFAULT_MC_SAMPLES, DEFAULT_STRATA_PER_AXIS};
use ajm_core::{JointObservable2, JointObservable3};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliResult};

pub const SIGMA2_BOUNDS: (f64, f64) = (0.01, 10.0);
pub const SIGMA3_BOUNDS: (f64, f64) = (0.02, 5.0);
pub const GRID_POINTS_BOUNDS: (usize, usize) = (256, 8192);
pub const MC_SAMPLES_MAX: u64 = 1 << 30;
pub const STRATA_BOUNDS: (usize, usize) = (1, 64);
pub const MAX_SWEEP_POINTS: usize = 100_000;

pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// A scalar, an explicit list, or an inclusive `start..=stop` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    One(f64),
    List(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Values {
    /// Expanded values; range points are `start + i·step` rounded to 12
    /// decimals so that `0.05·k` prints cleanly.
    pub fn expand(&self, what: &str) -> CliResult<Vec<f64>> {
        let v = match self {
            Values::One(x) => vec![*x],
            Values::List(xs) => xs.clone(),
            Values::Range(RangeSpec { start, stop, step }) => {
                if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
                    return Err(config_err(format!("{what}: range bounds must be finite")));
                }
                if !(*step > 0.0) {
                    return Err(config_err(format!("{what}: range step must be positive, got {step}")));
                }
                if stop < start {
                    return Err(config_err(format!("{what}: empty range {start}..={stop}")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if n > MAX_SWEEP_POINTS {
                    return Err(config_err(format!("{what}: range has {n} points, limit is {MAX_SWEEP_POINTS}")));
                }
                (0..n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
            }
        };
        if v.is_empty() {
            return Err(config_err(format!("{what}: empty value list")));
        }
        Ok(v)
    }
}

fn check_range(what: &str, x: f64, (lo, hi): (f64, f64)) -> CliResult<()> {
    if !(x >= lo && x <= hi) {
        return Err(config_err(format!("{what} = {x} is outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_grid_points(n: usize) -> CliResult<()> {
    let (lo, hi) = GRID_POINTS_BOUNDS;
    if n < lo || n > hi || n % 2 != 0 {
        return Err(config_err(format!("grid_points = {n} must be even and within [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_state(state: [f64; 3]) -> CliResult<()> {
    let r = state.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(r <= 1.0 + 1e-12) {
        return Err(config_err(format!("state {state:?} has Bloch length {r} > 1")));
    }
    Ok(())
}

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAprimeConfig {
    pub sigma_a: Values,
    /// Absent means the symmetric sweep `σ_b = σ_a`.
    #[serde(default)]
    pub sigma_b: Option<Values>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl SweepAprimeConfig {
    /// Sweep points in row order: `σ_a` outer, `σ_b` inner.
    pub fn pairs(&self) -> CliResult<Vec<(f64, f64)>> {
        check_grid_points(self.grid_points)?;
        let a = self.sigma_a.expand("sigma_a")?;
        let pairs: Vec<(f64, f64)> = match &self.sigma_b {
            None => a.iter().map(|&s| (s, s)).collect(),
            Some(b) => {
                let b = b.expand("sigma_b")?;
                a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
            }
        };
        if pairs.len() > MAX_SWEEP_POINTS {
            return Err(config_err(format!("sweep has {} points, limit is {MAX_SWEEP_POINTS}", pairs.len())));
        }
        for &(x, y) in &pairs {
            check_range("sigma_a", x, SIGMA2_BOUNDS)?;
            check_range("sigma_b", y, SIGMA2_BOUNDS)?;
        }
        Ok(pairs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostStateConfig {
    pub sigmas: [f64; 2],
    pub state: [f64; 3],
    /// Outcome labels among `++`, `+-`, `-+`, `--`; absent means all four.
    #[serde(default)]
    pub outcomes: Option<Vec<String>>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl PostStateConfig {
    pub fn validate(&self) -> CliResult<()> {
        for s in self.sigmas {
            check_range("sigma", s, SIGMA2_BOUNDS)?;
        }
        check_state(self.state)?;
        check_grid_points(self.grid_points)?;
        if let Some(o) = &self.outcomes {
            if o.is_empty() {
                return Err(config_err("outcomes must not be empty"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelitiesConfig {
    /// Detector width pairs `[σ_a, σ_b]`.
    pub pairs: Vec<[f64; 2]>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl FidelitiesConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.pairs.is_empty() {
            return Err(config_err("pairs must not be empty"));
        }
        for p in &self.pairs {
            check_range("sigma_a", p[0], SIGMA2_BOUNDS)?;
            check_range("sigma_b", p[1], SIGMA2_BOUNDS)?;
        }
        check_grid_points(self.grid_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObliqueConfig {
    /// Marginal unsharpness; mutually exclusive with `sigma`.
    #[serde(default)]
    pub a_prime: Option<f64>,
    /// Equal detector width from which `a′` is computed.
    #[serde(default)]
    pub sigma: Option<f64>,
    pub state: [f64; 3],
    /// Relative pointer angles in radians, within `[0, π]`.
    pub theta: Values,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl ObliqueConfig {
    pub fn thetas(&self) -> CliResult<Vec<f64>> {
        match (self.a_prime, self.sigma) {
            (Some(a), None) => check_range("a_prime", a, (0.0, 2.0 / PI))?,
            (None, Some(s)) => check_range("sigma", s, SIGMA2_BOUNDS)?,
            _ => return Err(config_err("exactly one of a_prime and sigma must be given")),
        }
        check_state(self.state)?;
        check_grid_points(self.grid_points)?;
        let t = self.theta.expand("theta")?;
        for &x in &t {
            check_range("theta", x, (0.0, PI))?;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeSweepConfig {
    /// Equal widths `σ₁ = σ₂ = σ₃` per row; mutually exclusive with `triples`.
    #[serde(default)]
    pub sigmas: Option<Values>,
    #[serde(default)]
    pub triples: Option<Vec<[f64; 3]>>,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default = "default_strata")]
    pub mc_strata_per_axis: usize,
    /// Mandatory, either here or via `--seed`.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_mc_samples() -> u64 {
    DEFAULT_MC_SAMPLES
}

fn default_strata() -> usize {
    DEFAULT_STRATA_PER_AXIS
}

impl ThreeSweepConfig {
    pub fn rows(&self) -> CliResult<(Vec<[f64; 3]>, u64)> {
        let rows: Vec<[f64; 3]> = match (&self.sigmas, &self.triples) {
            (Some(v), None) => v.expand("sigmas")?.into_iter().map(|s| [s; 3]).collect(),
            (None, Some(t)) if !t.is_empty() => t.clone(),
            (None, Some(_)) => return Err(config_err("triples must not be empty")),
            _ => return Err(config_err("exactly one of sigmas and triples must be given")),
        };
        for r in &rows {
            for &s in r {
                check_range("sigma", s, SIGMA3_BOUNDS)?;
            }
        }
        let seed = self.seed.ok_or_else(|| config_err("seed is mandatory for three-sweep (config or --seed)"))?;
        let (lo, hi) = STRATA_BOUNDS;
        if self.mc_strata_per_axis < lo || self.mc_strata_per_axis > hi {
            return Err(config_err(format!("mc_strata_per_axis must be within [{lo}, {hi}]")));
        }
        let min = 2 * (self.mc_strata_per_axis as u64).pow(3);
        if self.mc_samples < min || self.mc_samples > MC_SAMPLES_MAX {
            return Err(config_err(format!("mc_samples must be within [{min}, {MC_SAMPLES_MAX}]")));
        }
        Ok((rows, seed))
    }
}

/// Pointer directions from the three angles `(θ, φ₁, φ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Angles {
    pub theta: f64,
    pub phi1: f64,
    pub phi: f64,
    /// `"rad"` (default) or `"pi"` for multiples of π.
    #[serde(default = "default_unit")]
    pub unit: String,
}

fn default_unit() -> String {
    "rad".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vectors {
    pub l: [f64; 3],
    pub m: [f64; 3],
    pub n: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FtCheckConfig {
    #[serde(default)]
    pub angles: Option<Angles>,
    #[serde(default)]
    pub vectors: Option<Vectors>,
}

impl Angles {
    pub fn radians(&self) -> CliResult<[f64; 3]> {
        let k = match self.unit.as_str() {
            "rad" => 1.0,
            "pi" => PI,
            u => return Err(config_err(format!("angle unit must be \"rad\" or \"pi\", got {u:?}"))),
        };
        let a = [self.theta * k, self.phi1 * k, self.phi * k];
        if a.iter().any(|x| !x.is_finite()) {
            return Err(config_err("angles must be finite"));
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnbiasedPair {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JmCheckConfig {
    #[serde(default)]
    pub joint2: Vec<JointObservable2>,
    #[serde(default)]
    pub joint3: Vec<JointObservable3>,
    #[serde(default)]
    pub unbiased_pairs: Vec<UnbiasedPair>,
}

impl JmCheckConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.joint2.is_empty() && self.joint3.is_empty() && self.unbiased_pairs.is_empty() {
            return Err(config_err("at least one of joint2, joint3 and unbiased_pairs must be non-empty"));
        }
        let finite2 = self.joint2.iter().all(|j| {
            [j.obs1.x, j.obs2.x, j.big_z].iter().all(|x| x.is_finite())
                && [j.obs1.m, j.obs2.m, j.z].iter().all(|v| v.is_finite())
        });
        let finite3 = self.joint3.iter().all(|j| {
            j.big_z.iter().all(|x| x.is_finite())
                && j.z.iter().all(|v| v.is_finite())
                && j.obs.iter().all(|o| o.x.is_finite() && o.m.is_finite())
        });
        let finite_pairs = self.unbiased_pairs.iter().all(|p| p.a.iter().chain(&p.b).all(|x| x.is_finite()));
        if !(finite2 && finite3 && finite_pairs) {
            return Err(config_err("all observable parameters must be finite"));
        }
        Ok(())
    }
}
