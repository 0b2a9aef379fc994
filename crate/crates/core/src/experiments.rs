//! Radius sweeps, the small-radius convergence experiment, and the bundled
//! verification suite.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::averaging::{
    build_operator, comparability_search, l1_norm_bruteforce_oracle, l1_operator_norm,
    local_comparability_constant, lp_bound_check, maximal_function, radii_grid, verify_net_bound,
    AveragingOperator, ComparabilityReport, DEFAULT_EPSILONS, ORACLE_MAX_SUPPORT,
};
use crate::constructions::{gen_sharpness, sample_instance, sharpness_report, Generator};
use crate::error::{Error, Result};
use crate::measure::{lp_norm, DiscreteMeasure, FunctionOnSpace};
use crate::metric::{build_space, BallKind, Geometry, MetricSpace, Norm};
use crate::nets::{
    doubling_upper_bound_with_net, net_constant_m, CoverMethod, DEFAULT_EXHAUSTIVE_CAP,
};
use crate::rng::SplitMix64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSummary {
    pub p: f64,
    pub bound: f64,
    pub max_ratio: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub radius: f64,
    pub kind: BallKind,
    /// Norm from pushing point masses through the operator (falls back to
    /// `max_a_s` above the oracle's size limit).
    pub l1_norm: f64,
    pub max_a_s: f64,
    pub argmax: usize,
    pub m: usize,
    pub m_exact: bool,
    pub comparability: f64,
    pub lp: Vec<LpSummary>,
}

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    pub exhaustive_cap: usize,
    pub lp_trials: usize,
    pub seed: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            lp_trials: 1000,
            seed: 0,
        }
    }
}

/// One row per `(radius, kind)`, in input order, with the duality, net and
/// comparability invariants checked on the way.
pub fn scan(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    radii: &[f64],
    kinds: &[BallKind],
    p_list: &[f64],
    options: &ScanOptions,
) -> Result<Vec<ScanRow>> {
    if radii.is_empty() {
        return Err(Error::EmptyRadii);
    }
    let mut rows = Vec::with_capacity(radii.len() * kinds.len());
    for &kind in kinds {
        let net = net_constant_m(space, kind, None, options.exhaustive_cap);
        measure.check_space(space)?;
        let (c, _) = comparability_search(space, measure, kind);
        let kind_rows: Vec<Result<ScanRow>> = radii
            .par_iter()
            .map(|&r| {
                let op = build_operator(space, measure, r, kind)?;
                let (argmax, max_a_s) = op.conjugate().sup();
                let l1_norm = if measure.support().len() <= ORACLE_MAX_SUPPORT {
                    l1_norm_bruteforce_oracle(&op)?
                } else {
                    max_a_s
                };
                let mut lp = Vec::with_capacity(p_list.len());
                for &p in p_list {
                    let rep = lp_bound_check(
                        &op,
                        p,
                        net.cardinality as f64,
                        options.lp_trials,
                        options.seed,
                    )?;
                    if net.exact && rep.violations > 0 {
                        return Err(Error::InvariantViolation(format!(
                            "L^{p} interpolation bound fails at r = {r} ({kind})"
                        )));
                    }
                    lp.push(LpSummary {
                        p,
                        bound: rep.bound,
                        max_ratio: rep.max_ratio,
                        violations: rep.violations,
                    });
                }
                if (l1_norm - max_a_s).abs() > 1e-12 * max_a_s {
                    return Err(Error::InvariantViolation(format!(
                        "duality: oracle {l1_norm} vs conjugate sup {max_a_s} at r = {r} ({kind})"
                    )));
                }
                if net.exact && max_a_s > net.cardinality as f64 + 1e-12 {
                    return Err(Error::InvariantViolation(format!(
                        "norm {max_a_s} exceeds M = {} at r = {r} ({kind})",
                        net.cardinality
                    )));
                }
                if max_a_s > c + 1e-12 {
                    return Err(Error::InvariantViolation(format!(
                        "norm {max_a_s} exceeds comparability constant {c} at r = {r} ({kind})"
                    )));
                }
                Ok(ScanRow {
                    radius: r,
                    kind,
                    l1_norm,
                    max_a_s,
                    argmax,
                    m: net.cardinality,
                    m_exact: net.exact,
                    comparability: c,
                    lp,
                })
            })
            .collect();
        for row in kind_rows {
            rows.push(row?);
        }
    }
    Ok(rows)
}

/// Writes scan rows as CSV: `radius,l1_norm,max_a_s,M,C,kind,M_exact`.
pub fn write_scan_csv<W: std::io::Write>(out: W, rows: &[ScanRow]) -> Result<()> {
    use crate::io::fmt_num;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["radius", "l1_norm", "max_a_s", "M", "C", "kind", "M_exact"])?;
    for r in rows {
        w.write_record([
            fmt_num(r.radius),
            fmt_num(r.l1_norm),
            fmt_num(r.max_a_s),
            r.m.to_string(),
            fmt_num(r.comparability),
            r.kind.to_string(),
            r.m_exact.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Pointwise-evaluable test functions for the convergence experiment.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    /// `exp(-|x|_2^2)` on coordinates.
    GaussianBump,
    /// `1` where coordinate `axis` is at most `threshold`, else `0`.
    Threshold { axis: usize, threshold: f64 },
    /// Explicit values by point id.
    Table(Vec<f64>),
}

impl FunctionSpec {
    pub fn evaluate(&self, space: &MetricSpace) -> Result<FunctionOnSpace> {
        let coords = |i: usize| {
            space
                .coordinates(i)
                .ok_or_else(|| Error::InvalidInput("function needs a coordinate space".into()))
        };
        let values = match self {
            FunctionSpec::GaussianBump => (0..space.len())
                .map(|i| Ok((-coords(i)?.iter().map(|c| c * c).sum::<f64>()).exp()))
                .collect::<Result<Vec<f64>>>()?,
            FunctionSpec::Threshold { axis, threshold } => (0..space.len())
                .map(|i| {
                    let x = coords(i)?;
                    let c = x
                        .get(*axis)
                        .ok_or_else(|| Error::InvalidInput(format!("no axis {axis}")))?;
                    Ok(if *c <= *threshold { 1.0 } else { 0.0 })
                })
                .collect::<Result<Vec<f64>>>()?,
            FunctionSpec::Table(v) => {
                if v.len() != space.len() {
                    return Err(Error::InvalidInput(format!(
                        "table has {} values, space has {} points",
                        v.len(),
                        space.len()
                    )));
                }
                v.clone()
            }
        };
        FunctionOnSpace::new(values)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub radius: f64,
    pub p: f64,
    /// `||A_r f - f||_p`.
    pub error: f64,
    /// `||A_r||_{L^1 -> L^1}`.
    pub l1_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Smallest positive distance between support points, if any.
    pub min_gap: Option<f64>,
    pub sup_l1_norm: f64,
}

impl ConvergenceReport {
    /// Rows before the exact-zero tail.
    pub fn nonzero_rows(&self) -> &[ConvergenceRow] {
        let end = self
            .rows
            .iter()
            .rposition(|r| r.error != 0.0)
            .map_or(0, |i| i + 1);
        &self.rows[..end]
    }
}

/// `||A_r f - f||_p` along strictly decreasing radii. Radii that isolate every
/// support point must give error exactly zero, and when `exact_m` is known the
/// largest `||A_r||_1` must not exceed it.
pub fn convergence_experiment(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    f: &FunctionOnSpace,
    p: f64,
    radii: &[f64],
    kind: BallKind,
    exact_m: Option<usize>,
) -> Result<ConvergenceReport> {
    if radii.is_empty() {
        return Err(Error::EmptyRadii);
    }
    if let Some(i) = radii
        .windows(2)
        .position(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::NonDecreasingRadii(i + 1));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    let min_gap = space.min_positive_distance(&measure.support());
    let rows: Vec<Result<ConvergenceRow>> = radii
        .iter()
        .map(|&r| {
            let op = build_operator(space, measure, r, kind)?;
            let diff = op.apply(f)?.sub(f);
            Ok(ConvergenceRow {
                radius: r,
                p,
                error: lp_norm(measure, &diff, p)?,
                l1_norm: l1_operator_norm(&op),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    for row in &rows {
        let isolating = min_gap.is_none_or(|g| !kind.contains(g, row.radius));
        if isolating && row.error != 0.0 {
            return Err(Error::InvariantViolation(format!(
                "error {} at isolating radius {}",
                row.error, row.radius
            )));
        }
    }
    let sup_l1_norm = rows.iter().map(|r| r.l1_norm).fold(0.0, f64::max);
    if let Some(m) = exact_m {
        if sup_l1_norm > m as f64 + 1e-12 {
            return Err(Error::InvariantViolation(format!(
                "sup norm {sup_l1_norm} exceeds M = {m}"
            )));
        }
    }
    Ok(ConvergenceReport {
        rows,
        min_gap,
        sup_l1_norm,
    })
}

/// Dyadic radii `2^0, 2^-1, ..., 2^-k`.
pub fn dyadic_radii(k: u32) -> Vec<f64> {
    (0..=k).map(|j| 0.5f64.powi(j as i32)).collect()
}

/// Random coordinate instance with up to `max_points` points in dimension up
/// to `max_dim`. Half the instances sit on a quarter-integer grid so that
/// distance ties are common (repeated grid points are dropped); weights are
/// uniform on `[0.05, 1)`.
pub fn random_instance(
    seed: u64,
    max_points: usize,
    max_dim: usize,
) -> (MetricSpace, DiscreteMeasure) {
    let mut rng = SplitMix64::new(seed);
    let n = rng.range(1, max_points.max(1));
    let d = rng.range(1, max_dim.max(1));
    let norm = [Norm::L1, Norm::L2, Norm::Linf][rng.range(0, 2)];
    let on_grid = rng.next_f64() < 0.5;
    let mut points: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    if on_grid {
                        rng.range(0, 8) as f64 * 0.25 - 1.0
                    } else {
                        rng.uniform(-1.0, 1.0)
                    }
                })
                .collect()
        })
        .collect();
    let mut seen = std::collections::HashSet::new();
    points.retain(|p| seen.insert(p.iter().map(|c| c.to_bits()).collect::<Vec<_>>()));
    let weights = (0..points.len()).map(|_| rng.uniform(0.05, 1.0)).collect();
    (
        build_space(Geometry::Coordinates { points, norm })
            .expect("generated coordinates are finite"),
        DiscreteMeasure::new(weights).expect("generated weights are positive"),
    )
}

/// Up to `count` radii spread evenly over the distinct pairwise distances.
pub fn spread_radii(space: &MetricSpace, count: usize) -> Vec<f64> {
    let ds = space.distinct_distances(None);
    if ds.is_empty() {
        return vec![1.0];
    }
    if ds.len() <= count {
        return ds;
    }
    let mut picked: Vec<f64> = (0..count)
        .map(|i| ds[i * (ds.len() - 1) / (count - 1).max(1)])
        .collect();
    picked.dedup();
    picked
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Duality,
    NetBound,
    Sharpness,
    Comparability,
    Maximal,
    Convergence,
    Interpolation,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Duality,
        Check::NetBound,
        Check::Sharpness,
        Check::Comparability,
        Check::Maximal,
        Check::Convergence,
        Check::Interpolation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Duality => "duality",
            Check::NetBound => "net_bound",
            Check::Sharpness => "sharpness",
            Check::Comparability => "comparability",
            Check::Maximal => "maximal",
            Check::Convergence => "convergence",
            Check::Interpolation => "interpolation",
        }
    }
}

impl std::str::FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown check {s:?}")))
    }
}

/// Instance counts and sizes for [`verify_suite`].
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub duality_instances: usize,
    pub duality_max_points: usize,
    pub radii_per_instance: usize,
    pub functions_per_instance: usize,
    pub net_instances: usize,
    pub net_max_points: usize,
    pub sharpness_dims: Vec<usize>,
    pub sharpness_clusters: usize,
    pub comparability_instances: usize,
    pub comparability_clusters: Vec<usize>,
    pub maximal_instances: usize,
    pub convergence_size: usize,
    pub convergence_min_exponent: u32,
    pub interpolation_instances: usize,
    pub interpolation_trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 20_170_601,
            duality_instances: 200,
            duality_max_points: 40,
            radii_per_instance: 5,
            functions_per_instance: 20,
            net_instances: 200,
            net_max_points: 18,
            sharpness_dims: vec![1, 2, 3],
            sharpness_clusters: 64,
            comparability_instances: 50,
            comparability_clusters: vec![4, 16, 64],
            maximal_instances: 100,
            convergence_size: 5000,
            convergence_min_exponent: 20,
            interpolation_instances: 20,
            interpolation_trials: 10_000,
        }
    }
}

impl SuiteConfig {
    /// Small sizes for smoke tests.
    pub fn quick() -> Self {
        SuiteConfig {
            duality_instances: 20,
            net_instances: 20,
            net_max_points: 12,
            sharpness_clusters: 8,
            comparability_instances: 5,
            comparability_clusters: vec![2, 4, 8],
            maximal_instances: 10,
            convergence_size: 400,
            interpolation_instances: 3,
            interpolation_trials: 200,
            ..SuiteConfig::default()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: Check,
    pub passed: bool,
    pub instances: usize,
    pub elapsed_ms: u128,
    pub detail: String,
    /// First failing witness.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

struct Outcome {
    instances: usize,
    detail: String,
    witness: Option<String>,
}

/// Runs the selected checks in order and reports pass/fail for each.
pub fn verify_suite(selection: &[Check], config: &SuiteConfig) -> Result<SuiteReport> {
    if selection.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut checks = Vec::with_capacity(selection.len());
    for &check in selection {
        let start = Instant::now();
        let out = match check {
            Check::Duality => check_duality(config),
            Check::NetBound => check_net_bound(config),
            Check::Sharpness => check_sharpness(config),
            Check::Comparability => check_comparability(config),
            Check::Maximal => check_maximal(config),
            Check::Convergence => check_convergence(config),
            Check::Interpolation => check_interpolation(config),
        }?;
        checks.push(CheckReport {
            check,
            passed: out.witness.is_none(),
            instances: out.instances,
            elapsed_ms: start.elapsed().as_millis(),
            detail: out.detail,
            witness: out.witness,
        });
    }
    Ok(SuiteReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn first_failure(results: Vec<Result<Option<String>>>) -> Result<Option<String>> {
    for r in results {
        if let Some(w) = r? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn unit_on_support(op: &AveragingOperator<'_>) -> Result<bool> {
    let n = op.space().len();
    let image = op.apply(&FunctionOnSpace::constant(n, 1.0))?;
    Ok(op.rows().iter().all(|r| image.values()[r.point] == 1.0))
}

fn check_duality(cfg: &SuiteConfig) -> Result<Outcome> {
    let results = (0..cfg.duality_instances)
        .into_par_iter()
        .map(|i| -> Result<Option<String>> {
            let seed = cfg.seed.wrapping_add(i as u64);
            let (space, measure) = random_instance(seed, cfg.duality_max_points, 4);
            let mut rng = SplitMix64::new(seed ^ 0xD1CE);
            for kind in BallKind::BOTH {
                for r in spread_radii(&space, cfg.radii_per_instance) {
                    let op = build_operator(&space, &measure, r, kind)?;
                    let conj = op.conjugate();
                    let norm = conj.sup().1;
                    let oracle = l1_norm_bruteforce_oracle(&op)?;
                    if (norm - oracle).abs() > 1e-12 * oracle {
                        return Ok(Some(format!(
                            "seed {seed} r {r} {kind}: {norm} vs oracle {oracle}"
                        )));
                    }
                    if !unit_on_support(&op)? {
                        return Ok(Some(format!("seed {seed} r {r} {kind}: A1 != 1")));
                    }
                    for _ in 0..cfg.functions_per_instance {
                        let f: Vec<f64> = (0..space.len()).map(|_| rng.next_f64()).collect();
                        let f = FunctionOnSpace::new(f)?;
                        let lhs = lp_norm(&measure, &op.apply(&f)?, 1.0)?;
                        let rhs: f64 = (0..space.len())
                            .map(|y| f.values()[y] * conj.values[y] * measure.weight(y))
                            .sum();
                        if (lhs - rhs).abs() > 1e-12 * rhs.abs().max(f64::MIN_POSITIVE) {
                            return Ok(Some(format!(
                                "seed {seed} r {r} {kind}: Fubini {lhs} vs {rhs}"
                            )));
                        }
                    }
                }
            }
            Ok(None)
        })
        .collect();
    Ok(Outcome {
        instances: cfg.duality_instances,
        detail: "conjugate sup vs oracle and Fubini identity, rel tol 1e-12".into(),
        witness: first_failure(results)?,
    })
}

fn check_net_bound(cfg: &SuiteConfig) -> Result<Outcome> {
    let results = (0..cfg.net_instances)
        .into_par_iter()
        .map(|i| -> Result<Option<String>> {
            let seed = cfg.seed.wrapping_add(1_000_000 + i as u64);
            let (space, measure) = random_instance(seed, cfg.net_max_points, 4);
            for kind in BallKind::BOTH {
                let net = net_constant_m(&space, kind, None, DEFAULT_EXHAUSTIVE_CAP);
                if !net.exact {
                    return Ok(Some(format!("seed {seed} {kind}: M not exact")));
                }
                let dbl = doubling_upper_bound_with_net(&space, kind, &net);
                if dbl.method == CoverMethod::Exhaustive && dbl.lower_bound > dbl.upper_bound {
                    return Ok(Some(format!(
                        "seed {seed} {kind}: M = {} > D = {}",
                        dbl.lower_bound, dbl.upper_bound
                    )));
                }
                for r in spread_radii(&space, cfg.radii_per_instance) {
                    let rep = verify_net_bound(&space, &measure, r, kind, &DEFAULT_EPSILONS, &net)?;
                    if !rep.passed() {
                        return Ok(Some(format!(
                            "seed {seed} r {r} {kind}: {:?}",
                            rep.violations[0]
                        )));
                    }
                    if !unit_on_support(&build_operator(&space, &measure, r, kind)?)? {
                        return Ok(Some(format!("seed {seed} r {r} {kind}: A1 != 1")));
                    }
                }
            }
            Ok(None)
        })
        .collect();
    Ok(Outcome {
        instances: cfg.net_instances,
        detail: "norm <= M, a_s(y) <= (1+eps) m(y,eps), m <= M, greedy audits, M <= D".into(),
        witness: first_failure(results)?,
    })
}

fn check_sharpness(cfg: &SuiteConfig) -> Result<Outcome> {
    let mut witness = None;
    let mut summary = Vec::new();
    for &d in &cfg.sharpness_dims {
        let inst = gen_sharpness(d, cfg.sharpness_clusters)?;
        let rep = sharpness_report(&inst)?;
        let cube = (1u64 << d) as f64;
        let n = cfg.sharpness_clusters as f64;
        summary.push(format!("d={d}: norm {:.15}", rep.operator_norm));
        if let Some(row) = rep
            .rows
            .iter()
            .find(|r| !r.strict || r.margin < r.exact_margin - 1e-12)
        {
            witness.get_or_insert(format!(
                "d={d} n={}: value {} threshold {}",
                row.n, row.value, row.threshold
            ));
        }
        if !(rep.operator_norm > cube * n / (n + 1.0) && rep.operator_norm <= cube) {
            witness.get_or_insert(format!(
                "d={d}: norm {} outside (2^d N/(N+1), 2^d]",
                rep.operator_norm
            ));
        }
        let op = build_operator(&inst.space, &inst.measure, 1.0, BallKind::Closed)?;
        if !unit_on_support(&op)? {
            witness.get_or_insert(format!("d={d}: A1 != 1"));
        }
        if d == 1 && rep.rows[0].value != 4.0 / 3.0 {
            witness.get_or_insert(format!("d=1 n=1: value {} != 4/3", rep.rows[0].value));
        }
    }
    Ok(Outcome {
        instances: cfg.sharpness_dims.len(),
        detail: summary.join("; "),
        witness,
    })
}

fn check_comparability(cfg: &SuiteConfig) -> Result<Outcome> {
    let results = (0..cfg.comparability_instances)
        .into_par_iter()
        .map(|i| -> Result<Option<String>> {
            let seed = cfg.seed.wrapping_add(2_000_000 + i as u64);
            let (space, measure) = random_instance(seed, cfg.duality_max_points, 4);
            for kind in BallKind::BOTH {
                let rep = local_comparability_constant(&space, &measure, kind)?;
                if !rep.implication_holds {
                    return Ok(Some(format!(
                        "seed {seed} {kind}: max norm {} > C {}",
                        rep.max_norm_over_grid, rep.constant
                    )));
                }
            }
            Ok(None)
        })
        .collect();
    let mut witness = first_failure(results)?;
    let family: Vec<(usize, ComparabilityReport)> = cfg
        .comparability_clusters
        .par_iter()
        .map(|&n| {
            let inst = gen_sharpness(2, n)?;
            Ok((
                n,
                local_comparability_constant(&inst.space, &inst.measure, BallKind::Closed)?,
            ))
        })
        .collect::<Result<_>>()?;
    for w in family.windows(2) {
        if w[1].1.constant <= w[0].1.constant {
            witness.get_or_insert(format!(
                "C not increasing: N={} C={} vs N={} C={}",
                w[0].0, w[0].1.constant, w[1].0, w[1].1.constant
            ));
        }
    }
    for (n, rep) in &family {
        if rep.max_norm_over_grid >= 4.0 {
            witness.get_or_insert(format!(
                "N={n}: norm {} not below 4",
                rep.max_norm_over_grid
            ));
        }
    }
    let detail = family
        .iter()
        .map(|(n, r)| {
            format!(
                "N={n}: C={:.6} norm={:.6}",
                r.constant, r.max_norm_over_grid
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        instances: cfg.comparability_instances + family.len(),
        detail,
        witness,
    })
}

fn check_maximal(cfg: &SuiteConfig) -> Result<Outcome> {
    let results = (0..cfg.maximal_instances)
        .into_par_iter()
        .map(|i| -> Result<Option<String>> {
            let seed = cfg.seed.wrapping_add(3_000_000 + i as u64);
            let (space, measure) = random_instance(seed, cfg.duality_max_points, 4);
            let mut rng = SplitMix64::new(seed);
            let f =
                FunctionOnSpace::new((0..space.len()).map(|_| rng.standard_normal()).collect())?;
            let grid = radii_grid(&space, &measure);
            for kind in BallKind::BOTH {
                let mf = maximal_function(&space, &measure, &f, &grid, kind)?;
                if let Some(x) = measure
                    .support()
                    .into_iter()
                    .find(|&x| mf.values()[x] < f.values()[x].abs())
                {
                    return Ok(Some(format!("seed {seed} {kind}: Mf({x}) < |f({x})|")));
                }
            }
            Ok(None)
        })
        .collect();
    Ok(Outcome {
        instances: cfg.maximal_instances,
        detail: "Mf >= |f| on the support, no tolerance".into(),
        witness: first_failure(results)?,
    })
}

fn check_convergence(cfg: &SuiteConfig) -> Result<Outcome> {
    let inst = sample_instance(
        Generator::Gaussian { dim: 2 },
        cfg.convergence_size,
        cfg.seed,
    )?;
    let f = FunctionSpec::GaussianBump.evaluate(&inst.space)?;
    let radii = dyadic_radii(cfg.convergence_min_exponent);
    let mut witness = None;
    let mut detail = Vec::new();
    for p in [1.0, 2.0] {
        let rep = match convergence_experiment(
            &inst.space,
            &inst.measure,
            &f,
            p,
            &radii,
            BallKind::Closed,
            None,
        ) {
            Ok(rep) => rep,
            Err(Error::InvariantViolation(msg)) => {
                witness.get_or_insert(format!("p={p}: {msg}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let last = rep.rows.last().expect("radii are nonempty");
        if last.error != 0.0 {
            witness.get_or_insert(format!(
                "p={p}: error {} at smallest radius {}",
                last.error, last.radius
            ));
        }
        let nz = rep.nonzero_rows();
        if nz.len() < 3
            || !nz[nz.len() - 3..]
                .windows(2)
                .all(|w| w[1].error < w[0].error)
        {
            witness.get_or_insert(format!(
                "p={p}: final nonzero errors not strictly decreasing"
            ));
        }
        if !rep.sup_l1_norm.is_finite() {
            witness.get_or_insert(format!("p={p}: unbounded norm"));
        }
        detail.push(format!(
            "p={p}: sup ||A_r||_1 = {:.6}, min gap {:?}",
            rep.sup_l1_norm, rep.min_gap
        ));
    }
    Ok(Outcome {
        instances: 1,
        detail: detail.join("; "),
        witness,
    })
}

fn check_interpolation(cfg: &SuiteConfig) -> Result<Outcome> {
    let results = (0..cfg.interpolation_instances)
        .into_par_iter()
        .map(|i| -> Result<Option<String>> {
            let seed = cfg.seed.wrapping_add(4_000_000 + i as u64);
            let (space, measure) = random_instance(seed, cfg.net_max_points, 4);
            let kind = if i % 2 == 0 {
                BallKind::Closed
            } else {
                BallKind::Open
            };
            let net = net_constant_m(&space, kind, None, DEFAULT_EXHAUSTIVE_CAP);
            let radii = spread_radii(&space, 3);
            let r = radii[radii.len() / 2];
            let op = build_operator(&space, &measure, r, kind)?;
            for p in [1.5, 2.0, 4.0] {
                let rep = lp_bound_check(
                    &op,
                    p,
                    net.cardinality as f64,
                    cfg.interpolation_trials,
                    seed,
                )?;
                if !rep.passed() {
                    return Ok(Some(format!("seed {seed} p {p}: {rep:?}")));
                }
            }
            Ok(None)
        })
        .collect();
    Ok(Outcome {
        instances: cfg.interpolation_instances,
        detail: "||Af||_p <= M^{1/p} ||f||_p + 1e-9 for p in {1.5, 2, 4}".into(),
        witness: first_failure(results)?,
    })
}
