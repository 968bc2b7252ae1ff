//! One function per subcommand: validate the configuration, compute, and
//! return the CSV table together with the JSON results.

use std::f64::consts::PI;

use ajm_core::ak_two::{compute_marginals, marginals_for, oblique_effects, oblique_probabilities, outcome_probabilities, post_state, sweep_marginals};
use ajm_core::effect::{
    build_joint2, build_joint3, effect_violation, is_valid_effect, jm_unbiased_ok, necessary_condition_3, outcome_label2,
    NecessaryCondition3, OUTCOMES2,
};
use ajm_core::fidelity::fidelity_report;
use ajm_core::geometry_ft::{directions, max_common_aprime};
use ajm_core::kernel::NORMALIZATION_TOL;
use ajm_core::three_obs::{check_necessary, check_necessary_axes, compute_triple, orthogonal_bound, triple_povm_from, NecessaryReport};
use ajm_core::{BlochState, DetectorConfig, Effect, FidelityReport, KernelTable2, MarginalPair, Sign, TripleMarginals, Vec3};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    FidelitiesConfig, FtCheckConfig, JmCheckConfig, ObliqueConfig, PostStateConfig, SweepAprimeConfig, ThreeSweepConfig,
};
use crate::error::{config_err, CliError, CliResult};
use crate::report::{check_probability_row, Cell, Table, PROBABILITY_SUM_TOL};

/// Tolerances reported with every command.
pub type Tolerances = Vec<(&'static str, f64)>;

pub struct Output<R> {
    pub table: Table,
    pub results: R,
    pub tolerances: Tolerances,
}

fn base_tolerances() -> Tolerances {
    vec![("probability_sum", PROBABILITY_SUM_TOL), ("effect_boundary", ajm_core::effect::BOUNDARY_TOL)]
}

fn kernel_tolerances() -> Tolerances {
    let mut t = base_tolerances();
    t.push(("kernel_normalization", NORMALIZATION_TOL));
    t
}

fn sweep_tolerances() -> Tolerances {
    let mut t = kernel_tolerances();
    t.push(("uncertainty_bound", 1.0));
    t
}

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub points: usize,
    pub max_a_prime: f64,
    pub max_a_prime_at: [f64; 2],
    pub max_lhs_uncertainty: f64,
    pub bound_holds: bool,
}

pub fn sweep_aprime(cfg: &SweepAprimeConfig) -> CliResult<Output<SweepSummary>> {
    let pairs = cfg.pairs()?;
    let rows = sweep_marginals(&pairs, cfg.grid_points)
        .into_iter()
        .collect::<Result<Vec<MarginalPair>, _>>()?;
    let mut table = Table::new(&["sigma_a", "sigma_b", "a_prime", "b_prime", "lhs_uncertainty"]);
    let mut best = &rows[0];
    for mp in &rows {
        table.push(vec![mp.sigmas[0].into(), mp.sigmas[1].into(), mp.a_prime.into(), mp.b_prime.into(), mp.uncertainty_lhs().into()]);
        if mp.a_prime > best.a_prime {
            best = mp;
        }
    }
    let max_lhs = rows.iter().map(MarginalPair::uncertainty_lhs).fold(f64::NEG_INFINITY, f64::max);
    Ok(Output {
        table,
        results: SweepSummary {
            points: rows.len(),
            max_a_prime: best.a_prime,
            max_a_prime_at: best.sigmas,
            max_lhs_uncertainty: max_lhs,
            bound_holds: max_lhs <= 1.0,
        },
        tolerances: sweep_tolerances(),
    })
}

#[derive(Debug, Serialize)]
pub struct StateSummary {
    pub bloch: Vec3,
    pub magnitude: f64,
    pub uncertainty_product: f64,
    pub angle_to_x_deg: f64,
}

impl From<&BlochState> for StateSummary {
    fn from(s: &BlochState) -> Self {
        Self {
            bloch: s.r,
            magnitude: s.magnitude(),
            uncertainty_product: s.uncertainty_product(),
            angle_to_x_deg: s.angle_to_x_deg(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PostOutcome {
    pub outcome: String,
    /// `¼(1 ± a′x ± b′y)`.
    pub probability: f64,
    /// Direct quadrature of the outcome density.
    pub probability_quadrature: f64,
    /// From the closed-form quadrant coefficients.
    pub state: StateSummary,
    /// Normalized `∫_Q TρT dp`.
    pub exact_state: StateSummary,
    pub c_fg: f64,
    pub c_ff: f64,
    pub c_gg: f64,
}

#[derive(Debug, Serialize)]
pub struct PostStateResults {
    pub a_prime: f64,
    pub b_prime: f64,
    pub probabilities: [f64; 4],
    pub outcomes: Vec<PostOutcome>,
}

fn parse_outcome(label: &str) -> CliResult<(Sign, Sign)> {
    OUTCOMES2
        .into_iter()
        .find(|&o| outcome_label2(o) == label)
        .ok_or_else(|| config_err(format!("unknown outcome {label:?}; expected one of ++, +-, -+, --")))
}

pub fn post_state_cmd(cfg: &PostStateConfig) -> CliResult<Output<PostStateResults>> {
    cfg.validate()?;
    let chi = BlochState::new(Vec3::from(cfg.state))?;
    let outcomes: Vec<(Sign, Sign)> = match &cfg.outcomes {
        None => OUTCOMES2.to_vec(),
        Some(labels) => labels.iter().map(|l| parse_outcome(l)).collect::<CliResult<_>>()?,
    };
    let dc = DetectorConfig::two(cfg.sigmas[0], cfg.sigmas[1]).with_grid_points(cfg.grid_points);
    let table = KernelTable2::build(&dc)?;
    let mp = compute_marginals(&table)?;
    let probs = outcome_probabilities(&mp, &chi);
    check_probability_row("post-state", &probs)?;
    let mut rows = Table::new(&[
        "outcome",
        "probability",
        "probability_quadrature",
        "x",
        "y",
        "z",
        "magnitude",
        "uncertainty_product",
        "angle_to_x_deg",
        "exact_x",
        "exact_y",
        "exact_z",
        "exact_magnitude",
        "exact_uncertainty_product",
        "exact_angle_to_x_deg",
    ]);
    let mut out = Vec::new();
    for o in outcomes {
        let ps = post_state(&table, &chi, o)?;
        let k = OUTCOMES2.iter().position(|&x| x == o).expect("outcome is one of the four");
        let (s, e) = (&ps.state, &ps.exact_state);
        rows.push(vec![
            ps.outcome.as_str().into(),
            probs[k].into(),
            ps.probability.into(),
            s.r.x.into(),
            s.r.y.into(),
            s.r.z.into(),
            s.magnitude().into(),
            s.uncertainty_product().into(),
            s.angle_to_x_deg().into(),
            e.r.x.into(),
            e.r.y.into(),
            e.r.z.into(),
            e.magnitude().into(),
            e.uncertainty_product().into(),
            e.angle_to_x_deg().into(),
        ]);
        out.push(PostOutcome {
            outcome: ps.outcome.clone(),
            probability: probs[k],
            probability_quadrature: ps.probability,
            state: s.into(),
            exact_state: e.into(),
            c_fg: ps.c_fg,
            c_ff: ps.c_ff,
            c_gg: ps.c_gg,
        });
    }
    Ok(Output {
        table: rows,
        results: PostStateResults { a_prime: mp.a_prime, b_prime: mp.b_prime, probabilities: probs, outcomes: out },
        tolerances: kernel_tolerances(),
    })
}

#[derive(Debug, Serialize)]
pub struct FidelityRow {
    pub sigmas: [f64; 2],
    #[serde(flatten)]
    pub report: FidelityReport,
    /// `η_i − πa′/4`.
    pub eta_i_difference: f64,
}

pub fn fidelities(cfg: &FidelitiesConfig) -> CliResult<Output<Vec<FidelityRow>>> {
    cfg.validate()?;
    let rows = cfg
        .pairs
        .par_iter()
        .map(|&[a, b]| {
            let table = KernelTable2::build(&DetectorConfig::two(a, b).with_grid_points(cfg.grid_points))?;
            let report = fidelity_report(&table)?;
            Ok(FidelityRow { sigmas: [a, b], eta_i_difference: report.eta_i - report.eta_i_closed, report })
        })
        .collect::<Result<Vec<_>, ajm_core::Error>>()?;
    let mut table = Table::new(&[
        "sigma_a",
        "sigma_b",
        "a_prime",
        "eta_i",
        "eta_i_closed",
        "eta_i_difference",
        "eta_f",
        "eta_d",
        "delta_ei",
        "delta_ef",
        "delta_d",
    ]);
    for r in &rows {
        let f = &r.report;
        table.push(vec![
            r.sigmas[0].into(),
            r.sigmas[1].into(),
            f.a_prime.into(),
            f.eta_i.into(),
            f.eta_i_closed.into(),
            r.eta_i_difference.into(),
            f.eta_f.into(),
            f.eta_d.into(),
            f.delta_ei.into(),
            f.delta_ef.into(),
            f.delta_d.into(),
        ]);
    }
    Ok(Output { table, results: rows, tolerances: kernel_tolerances() })
}

#[derive(Debug, Serialize)]
pub struct ObliqueResults {
    pub a_prime: f64,
    /// Orthogonal-reading probabilities `¼(1 ± a′x ± a′y)`.
    pub orthogonal_probabilities: [f64; 4],
    /// Largest deviation from the orthogonal probabilities over rows with
    /// `θ = π/2`; absent when no such row exists.
    pub max_deviation_at_right_angle: Option<f64>,
    pub rows: usize,
}

pub fn oblique(cfg: &ObliqueConfig) -> CliResult<Output<ObliqueResults>> {
    let thetas = cfg.thetas()?;
    let chi = BlochState::new(Vec3::from(cfg.state))?;
    let a_prime = match (cfg.a_prime, cfg.sigma) {
        (Some(a), _) => a,
        (None, Some(s)) => marginals_for(s, s, cfg.grid_points)?.a_prime,
        (None, None) => unreachable!("validated by thetas()"),
    };
    let mp = MarginalPair { a_prime, b_prime: a_prime, sigmas: [cfg.sigma.unwrap_or(f64::NAN); 2] };
    let ortho = outcome_probabilities(&mp, &chi);
    let mut table = Table::new(&["theta", "p_pp", "p_pm", "p_mp", "p_mm", "sum", "effects_valid"]);
    let mut dev: Option<f64> = None;
    for &t in &thetas {
        let p = oblique_probabilities(a_prime, t, &chi);
        check_probability_row(&format!("oblique θ = {t}"), &p)?;
        if !oblique_effects(a_prime, t).iter().all(is_valid_effect) {
            return Err(CliError::Numerical(format!("oblique θ = {t}: invalid effect")));
        }
        if (t - PI / 2.0).abs() <= 1e-15 {
            let d = p.iter().zip(&ortho).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            dev = Some(dev.map_or(d, |v| v.max(d)));
        }
        table.push(vec![t.into(), p[0].into(), p[1].into(), p[2].into(), p[3].into(), p.iter().sum::<f64>().into(), true.into()]);
    }
    Ok(Output {
        table,
        results: ObliqueResults { a_prime, orthogonal_probabilities: ortho, max_deviation_at_right_angle: dev, rows: thetas.len() },
        tolerances: base_tolerances(),
    })
}

#[derive(Debug, Serialize)]
pub struct TripleRow {
    #[serde(flatten)]
    pub marginals: TripleMarginals,
    pub sum_squares: f64,
    pub max_pair_sum_squares: f64,
    pub orthogonal_bound: f64,
    pub within_orthogonal_bound: bool,
    pub necessary_condition: NecessaryReport,
    pub effects: [Effect; 8],
}

pub fn three_sweep(cfg: &ThreeSweepConfig) -> CliResult<Output<Vec<TripleRow>>> {
    let (rows, seed) = cfg.rows()?;
    let bound = orthogonal_bound();
    let mut out = Vec::with_capacity(rows.len());
    for s in rows {
        let mut dc = DetectorConfig::three(s[0], s[1], s[2]).with_mc(cfg.mc_samples, seed);
        dc.mc_strata_per_axis = cfg.mc_strata_per_axis;
        let tm = compute_triple(&dc)?;
        let effects = triple_povm_from(&tm)?;
        let total: Effect = effects.iter().copied().sum();
        if total.max_abs_diff(&Effect::IDENTITY) > PROBABILITY_SUM_TOL {
            return Err(CliError::Numerical(format!("σ = {s:?}: effects do not sum to the identity")));
        }
        let [a, b, c] = tm.values();
        out.push(TripleRow {
            sum_squares: tm.sum_squares(),
            max_pair_sum_squares: (a * a + b * b).max(b * b + c * c).max(a * a + c * c),
            orthogonal_bound: bound,
            within_orthogonal_bound: tm.values().iter().all(|&v| v <= bound),
            necessary_condition: check_necessary_axes(a, b, c)?,
            effects,
            marginals: tm,
        });
    }
    let mut table = Table::new(&[
        "sigma_1",
        "sigma_2",
        "sigma_3",
        "a_prime",
        "a_prime_stderr",
        "b_prime",
        "b_prime_stderr",
        "c_prime",
        "c_prime_stderr",
        "normalization",
        "normalization_stderr",
        "radial_a_prime",
        "sum_squares",
        "max_pair_sum_squares",
        "orthogonal_bound",
        "within_orthogonal_bound",
        "necessary_condition_holds",
    ]);
    for r in &out {
        let m = &r.marginals;
        table.push(vec![
            m.sigmas[0].into(),
            m.sigmas[1].into(),
            m.sigmas[2].into(),
            m.a_prime.value.into(),
            m.a_prime.stderr.into(),
            m.b_prime.value.into(),
            m.b_prime.stderr.into(),
            m.c_prime.value.into(),
            m.c_prime.stderr.into(),
            m.normalization.value.into(),
            m.normalization.stderr.into(),
            m.radial_a_prime.into(),
            r.sum_squares.into(),
            r.max_pair_sum_squares.into(),
            r.orthogonal_bound.into(),
            r.within_orthogonal_bound.into(),
            r.necessary_condition.condition.holds.into(),
        ]);
    }
    let mut tol = base_tolerances();
    tol.push(("ft_distance_sum_bound", 4.0));
    Ok(Output { table, results: out, tolerances: tol })
}

#[derive(Debug, Serialize)]
pub struct FtCheckResults {
    /// Angles in radians when the directions were given by angles.
    pub angles: Option<[f64; 3]>,
    pub report: NecessaryReport,
    /// Largest common unsharpness along the three directions.
    pub max_common_aprime: Option<f64>,
}

pub fn ft_check(cfg: &FtCheckConfig) -> CliResult<Output<FtCheckResults>> {
    let (angles, [l, m, n]) = match (&cfg.angles, &cfg.vectors) {
        (Some(a), None) => {
            let r = a.radians()?;
            (Some(r), directions(r[0], r[1], r[2]))
        }
        (None, Some(v)) => (None, [Vec3::from(v.l), Vec3::from(v.m), Vec3::from(v.n)]),
        _ => return Err(config_err("exactly one of angles and vectors must be given")),
    };
    if ![l, m, n].iter().all(|v| v.is_finite()) {
        return Err(config_err("vectors must be finite"));
    }
    let report = check_necessary(l, m, n)?;
    let max_a = match (l.normalized(), m.normalized(), n.normalized()) {
        (Some(l), Some(m), Some(n)) => Some(max_common_aprime(l, m, n)?),
        _ => None,
    };
    let ft = &report.condition.ft;
    let mut table = Table::new(&[
        "l_x",
        "l_y",
        "l_z",
        "m_x",
        "m_y",
        "m_z",
        "n_x",
        "n_y",
        "n_z",
        "min_total",
        "holds",
        "is_vertex",
        "vertex_index",
        "point_x",
        "point_y",
        "point_z",
        "max_common_aprime",
    ]);
    let mut row: Vec<Cell> = [l, m, n].iter().flat_map(|v| v.to_array()).map(Cell::F).collect();
    row.extend([
        report.condition.min_total.into(),
        report.condition.holds.into(),
        ft.is_vertex.into(),
        ft.vertex_index.map_or(Cell::Empty, Cell::from),
        ft.point.x.into(),
        ft.point.y.into(),
        ft.point.z.into(),
        max_a.into(),
    ]);
    table.push(row);
    let mut tol = base_tolerances();
    tol.push(("ft_distance_sum_bound", 4.0));
    Ok(Output { table, results: FtCheckResults { angles, report, max_common_aprime: max_a }, tolerances: tol })
}

#[derive(Debug, Serialize)]
pub struct Joint2Verdict {
    pub valid: bool,
    pub max_violation: f64,
}

#[derive(Debug, Serialize)]
pub struct Joint3Verdict {
    pub valid: bool,
    pub max_violation: f64,
    /// The four-sphere condition on `(m₁, m₂, m₃)`, `Z₁..₃` and `z₄`.
    pub necessary: NecessaryCondition3,
}

#[derive(Debug, Serialize)]
pub struct PairVerdict {
    pub valid: bool,
    /// `‖a + b‖ + ‖a − b‖`, jointly measurable iff at most 2.
    pub distance_sum: f64,
}

#[derive(Debug, Serialize)]
pub struct JmCheckResults {
    pub joint2: Vec<Joint2Verdict>,
    pub joint3: Vec<Joint3Verdict>,
    pub unbiased_pairs: Vec<PairVerdict>,
}

fn max_violation(effects: &[Effect]) -> f64 {
    effects.iter().map(effect_violation).fold(f64::NEG_INFINITY, f64::max)
}

pub fn jm_check(cfg: &JmCheckConfig) -> CliResult<Output<JmCheckResults>> {
    cfg.validate()?;
    let joint2: Vec<Joint2Verdict> = cfg
        .joint2
        .iter()
        .map(|j| {
            let e = build_joint2(j);
            Joint2Verdict { valid: e.iter().all(is_valid_effect), max_violation: max_violation(&e) }
        })
        .collect();
    let joint3: Vec<Joint3Verdict> = cfg
        .joint3
        .iter()
        .map(|j| {
            let e = build_joint3(j);
            let [z1, z2, z3, _] = j.big_z;
            Joint3Verdict {
                valid: e.iter().all(is_valid_effect),
                max_violation: max_violation(&e),
                necessary: necessary_condition_3(j.obs[0].m, j.obs[1].m, j.obs[2].m, z1, z2, z3, j.z[3]),
            }
        })
        .collect();
    let pairs: Vec<PairVerdict> = cfg
        .unbiased_pairs
        .iter()
        .map(|p| {
            let (a, b) = (Vec3::from(p.a), Vec3::from(p.b));
            PairVerdict { valid: jm_unbiased_ok(a, b), distance_sum: (a + b).norm() + (a - b).norm() }
        })
        .collect();
    let mut table = Table::new(&["kind", "index", "valid", "max_violation", "criterion_value", "criterion_bound"]);
    for (i, v) in joint2.iter().enumerate() {
        table.push(vec!["joint2".into(), i.into(), v.valid.into(), v.max_violation.into(), Cell::Empty, Cell::Empty]);
    }
    for (i, v) in joint3.iter().enumerate() {
        table.push(vec![
            "joint3".into(),
            i.into(),
            v.valid.into(),
            v.max_violation.into(),
            v.necessary.total.into(),
            4.0.into(),
        ]);
    }
    for (i, v) in pairs.iter().enumerate() {
        table.push(vec!["unbiased_pair".into(), i.into(), v.valid.into(), Cell::Empty, v.distance_sum.into(), 2.0.into()]);
    }
    Ok(Output { table, results: JmCheckResults { joint2, joint3, unbiased_pairs: pairs }, tolerances: base_tolerances() })
}
