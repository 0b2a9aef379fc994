//! Averaging operators and their `L^1` operator norm.
//!
//! `A_s f(x)` is the `mu`-average of `f` over `B(x, s)`, defined for `x` in the
//! support of `mu`. Its `L^1 -> L^1` norm equals the sup of the conjugate
//! function `a_s(y) = sum_{x in B(y,s)} mu(x) / mu B(x,s)`, which is what
//! [`l1_operator_norm`] evaluates. [`l1_norm_bruteforce_oracle`] gets the same
//! number by pushing every point mass through the operator.
//!
//! All sums run in ascending point-id order, so results do not depend on the
//! number of threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{lp_norm, DiscreteMeasure, FunctionOnSpace};
use crate::metric::{BallKind, MetricSpace};
use crate::nets::{NetKind, NetStats};
use crate::rng::SplitMix64;

/// Largest support the brute-force oracle accepts.
pub const ORACLE_MAX_SUPPORT: usize = 5000;

/// Default `epsilon` values for the greedy certificate.
pub const DEFAULT_EPSILONS: [f64; 3] = [0.5, 0.1, 0.01];

/// One row of an averaging operator: the support points of `B(point, s)` and their mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub point: usize,
    pub members: Vec<usize>,
    pub mass: f64,
}

/// `A_s` for a fixed radius and ball kind, stored row by row on the support.
#[derive(Clone, Debug)]
pub struct AveragingOperator<'a> {
    space: &'a MetricSpace,
    measure: &'a DiscreteMeasure,
    radius: f64,
    kind: BallKind,
    rows: Vec<Row>,
}

pub fn build_operator<'a>(
    space: &'a MetricSpace,
    measure: &'a DiscreteMeasure,
    s: f64,
    kind: BallKind,
) -> Result<AveragingOperator<'a>> {
    measure.check_space(space)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "radius must be positive and finite, got {s}"
        )));
    }
    let support = measure.support();
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let rows = support
        .par_iter()
        .map_init(Vec::new, |buf, &x| {
            space.ball_members_into(x, s, kind, buf);
            let members: Vec<usize> = buf
                .iter()
                .copied()
                .filter(|&y| measure.in_support(y))
                .collect();
            let mass = measure.mass_of(&members);
            Row {
                point: x,
                members,
                mass,
            }
        })
        .collect();
    Ok(AveragingOperator {
        space,
        measure,
        radius: s,
        kind,
        rows,
    })
}

impl<'a> AveragingOperator<'a> {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn kind(&self) -> BallKind {
        self.kind
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn space(&self) -> &'a MetricSpace {
        self.space
    }

    pub fn measure(&self) -> &'a DiscreteMeasure {
        self.measure
    }

    /// Coefficients `mu(y) / mu B(x, s)` of one row, aligned with `row.members`.
    pub fn coefficients(&self, row: &Row) -> Vec<f64> {
        row.members
            .iter()
            .map(|&y| self.measure.weight(y) / row.mass)
            .collect()
    }

    /// True when every row is the whole support, i.e. `A_s f` is the global average.
    pub fn is_stabilized(&self) -> bool {
        let k = self.rows.len();
        self.rows.iter().all(|r| r.members.len() == k)
    }

    fn row_value(&self, row: &Row, f: &[f64]) -> f64 {
        if let [only] = row.members[..] {
            return f[only];
        }
        let num: f64 = row
            .members
            .iter()
            .map(|&y| f[y] * self.measure.weight(y))
            .sum();
        num / row.mass
    }

    pub fn apply(&self, f: &FunctionOnSpace) -> Result<FunctionOnSpace> {
        if f.len() != self.space.len() {
            return Err(Error::InvalidInput(format!(
                "function has {} values but the space has {} points",
                f.len(),
                self.space.len()
            )));
        }
        let mut out = vec![0.0; self.space.len()];
        for row in &self.rows {
            out[row.point] = self.row_value(row, f.values());
        }
        Ok(FunctionOnSpace::from_finite(out))
    }

    /// Conjugate function of this operator.
    ///
    /// Consecutive terms with bit-identical denominators are added before
    /// dividing, so a stabilized operator gives `a_s = 1` exactly.
    pub fn conjugate(&self) -> ConjugateFunction {
        let n = self.space.len();
        // per y: (open denominator, its numerator, finished sum)
        let mut acc: Vec<(f64, f64, f64)> = vec![(f64::NAN, 0.0, 0.0); n];
        for row in &self.rows {
            let w = self.measure.weight(row.point);
            // y in B(x,s) iff x in B(y,s), so scattering rows visits x ascending for each y.
            for &y in &row.members {
                let (den, num, sum) = &mut acc[y];
                if *den == row.mass {
                    *num += w;
                } else {
                    if *num != 0.0 {
                        *sum += *num / *den;
                    }
                    *den = row.mass;
                    *num = w;
                }
            }
        }
        let values = acc
            .into_iter()
            .enumerate()
            .map(|(y, (den, num, sum))| {
                if self.measure.in_support(y) && num != 0.0 {
                    sum + num / den
                } else {
                    sum
                }
            })
            .collect();
        ConjugateFunction {
            radius: self.radius,
            kind: self.kind,
            support: self.rows.iter().map(|r| r.point).collect(),
            values,
        }
    }
}

/// `A f`; zero off the support.
pub fn apply(op: &AveragingOperator<'_>, f: &FunctionOnSpace) -> Result<FunctionOnSpace> {
    op.apply(f)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugateFunction {
    pub radius: f64,
    pub kind: BallKind,
    pub support: Vec<usize>,
    /// `a_s(y)` indexed by point id, zero off the support.
    pub values: Vec<f64>,
}

impl ConjugateFunction {
    /// `(argmax, max)` over the support; lowest id on ties.
    pub fn sup(&self) -> (usize, f64) {
        self.support.iter().map(|&y| (y, self.values[y])).fold(
            (self.support[0], f64::NEG_INFINITY),
            |acc, c| if c.1 > acc.1 { c } else { acc },
        )
    }
}

pub fn conjugate_function(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    s: f64,
    kind: BallKind,
) -> Result<ConjugateFunction> {
    Ok(build_operator(space, measure, s, kind)?.conjugate())
}

/// `||A_s||_{L^1 -> L^1}` as the sup of the conjugate function.
pub fn l1_operator_norm(op: &AveragingOperator<'_>) -> f64 {
    op.conjugate().sup().1
}

/// `||A_s||_{L^1 -> L^1}` as `max_y ||A 1_{y}||_1 / ||1_{y}||_1`, one operator
/// application per support point.
pub fn l1_norm_bruteforce_oracle(op: &AveragingOperator<'_>) -> Result<f64> {
    let measure = op.measure;
    let support = measure.support();
    if support.len() > ORACLE_MAX_SUPPORT {
        return Err(Error::TooLarge(format!(
            "oracle needs |supp| <= {ORACLE_MAX_SUPPORT}, got {}",
            support.len()
        )));
    }
    let n = op.space.len();
    let mut best = f64::NEG_INFINITY;
    for &y in &support {
        let image = op.apply(&FunctionOnSpace::indicator(n, y, 1.0))?;
        let ratio = lp_norm(measure, &image, 1.0)? / measure.weight(y);
        best = best.max(ratio);
    }
    Ok(best)
}

/// Output of the greedy minimal-measure selection anchored at `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedySelection {
    pub anchor: usize,
    pub radius: f64,
    pub kind: BallKind,
    pub epsilon: f64,
    pub selected: Vec<usize>,
    /// `b_k`: smallest ball mass among points not yet covered at step `k`.
    pub thresholds: Vec<f64>,
    /// `mu B(u_k, s)` for each selected point.
    pub masses: Vec<f64>,
}

impl GreedySelection {
    pub fn m(&self) -> usize {
        self.selected.len()
    }
}

/// Independent re-check of a [`GreedySelection`].
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GreedyAudit {
    pub is_net: bool,
    pub covers: bool,
    pub inside_anchor_ball: bool,
    pub thresholds_nondecreasing: bool,
    pub thresholds_rescanned: bool,
    pub below_threshold: bool,
    pub domination_violations: usize,
}

impl GreedyAudit {
    pub fn passed(&self) -> bool {
        self.is_net
            && self.covers
            && self.inside_anchor_ball
            && self.thresholds_nondecreasing
            && self.thresholds_rescanned
            && self.below_threshold
            && self.domination_violations == 0
    }
}

/// Selects `u_1, ..., u_m` in `B(y, s)`: each `u_k` has ball mass below
/// `(1 + eps) b_k`, where `b_k` is the least ball mass among support points of
/// `B(y, s)` not yet covered by `B(u_1, s), ..., B(u_{k-1}, s)`. Among
/// admissible points the lowest id wins.
pub fn greedy_min_measure_selection(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    y: usize,
    s: f64,
    kind: BallKind,
    epsilon: f64,
) -> Result<GreedySelection> {
    measure.check_space(space)?;
    if y >= space.len() || !measure.in_support(y) {
        return Err(Error::AnchorOffSupport(y));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let candidates: Vec<usize> = space
        .ball(y, s, kind)
        .members
        .into_iter()
        .filter(|&x| measure.in_support(x))
        .collect();
    let mass: Vec<f64> = candidates
        .iter()
        .map(|&x| ball_mass(space, measure, x, s, kind))
        .collect();
    let mut uncovered = vec![true; candidates.len()];
    let mut sel = GreedySelection {
        anchor: y,
        radius: s,
        kind,
        epsilon,
        selected: Vec::new(),
        thresholds: Vec::new(),
        masses: Vec::new(),
    };
    while uncovered.iter().any(|&u| u) {
        let b = (0..candidates.len())
            .filter(|&a| uncovered[a])
            .map(|a| mass[a])
            .fold(f64::INFINITY, f64::min);
        let limit = (1.0 + epsilon) * b;
        let pick = (0..candidates.len())
            .find(|&a| uncovered[a] && mass[a] < limit)
            .expect("the minimizer itself is admissible");
        let u = candidates[pick];
        sel.selected.push(u);
        sel.thresholds.push(b);
        sel.masses.push(mass[pick]);
        for (a, &x) in candidates.iter().enumerate() {
            if uncovered[a] && kind.contains(space.distance(u, x), s) {
                uncovered[a] = false;
            }
        }
    }
    Ok(sel)
}

fn ball_mass(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    x: usize,
    s: f64,
    kind: BallKind,
) -> f64 {
    measure.mass_of(&space.ball(x, s, kind).members)
}

/// Re-derives every property of a greedy selection from scratch.
pub fn audit_greedy_selection(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    sel: &GreedySelection,
) -> GreedyAudit {
    let (s, kind) = (sel.radius, sel.kind);
    let region: Vec<usize> = space
        .ball(sel.anchor, s, kind)
        .members
        .into_iter()
        .filter(|&x| measure.in_support(x))
        .collect();
    let net_kind = NetKind::for_ball(kind);
    let mut audit = GreedyAudit {
        is_net: true,
        covers: true,
        inside_anchor_ball: true,
        thresholds_nondecreasing: sel.thresholds.windows(2).all(|w| w[0] <= w[1]),
        thresholds_rescanned: true,
        below_threshold: true,
        domination_violations: 0,
    };
    for (k, &u) in sel.selected.iter().enumerate() {
        audit.inside_anchor_ball &= region.contains(&u);
        for &v in &sel.selected[..k] {
            audit.is_net &= net_kind.separated(space.distance(u, v), s);
        }
        // b_k over the points of B(y,s) outside the first k-1 balls.
        let b = region
            .iter()
            .filter(|&&x| {
                sel.selected[..k]
                    .iter()
                    .all(|&v| !kind.contains(space.distance(v, x), s))
            })
            .map(|&x| ball_mass(space, measure, x, s, kind))
            .fold(f64::INFINITY, f64::min);
        audit.thresholds_rescanned &= b == sel.thresholds[k];
        let mu = ball_mass(space, measure, u, s, kind);
        audit.below_threshold &= mu == sel.masses[k] && mu < (1.0 + sel.epsilon) * b;
    }
    for &x in &region {
        match sel
            .selected
            .iter()
            .position(|&u| kind.contains(space.distance(u, x), s))
        {
            None => audit.covers = false,
            Some(i) => {
                let ui = ball_mass(space, measure, sel.selected[i], s, kind);
                if ui > (1.0 + sel.epsilon) * ball_mass(space, measure, x, s, kind) {
                    audit.domination_violations += 1;
                }
            }
        }
    }
    audit
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NetBoundViolation {
    NormExceedsM {
        norm: f64,
        m: usize,
    },
    ConjugateExceedsGreedy {
        anchor: usize,
        epsilon: f64,
        a_s: f64,
        m: usize,
    },
    GreedyExceedsM {
        anchor: usize,
        epsilon: f64,
        m: usize,
        net_constant: usize,
    },
    AuditFailed {
        anchor: usize,
        epsilon: f64,
        audit: GreedyAudit,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetBoundReport {
    pub radius: f64,
    pub kind: BallKind,
    pub norm: f64,
    pub argmax: usize,
    pub net_constant: usize,
    pub net_constant_exact: bool,
    pub anchors_checked: usize,
    pub max_greedy_m: usize,
    pub violations: Vec<NetBoundViolation>,
    /// A violation occurred although `M` was computed exactly.
    pub falsification: bool,
}

impl NetBoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `||A_s||_1 <= M` and, for every support anchor `y` and every
/// `epsilon`, the greedy certificate `a_s(y) <= (1 + eps) m(y, eps)` with
/// `m(y, eps) <= M`. Comparisons against `M` are only made when `M` is exact.
pub fn verify_net_bound(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    s: f64,
    kind: BallKind,
    epsilons: &[f64],
    net: &NetStats,
) -> Result<NetBoundReport> {
    let op = build_operator(space, measure, s, kind)?;
    let conj = op.conjugate();
    let (argmax, norm) = conj.sup();
    let m = net.cardinality;
    let mut violations = Vec::new();
    if net.exact && norm > m as f64 + 1e-12 {
        violations.push(NetBoundViolation::NormExceedsM { norm, m });
    }
    let per_anchor: Vec<Result<(usize, Vec<NetBoundViolation>)>> = conj
        .support
        .par_iter()
        .map(|&y| {
            let mut found = Vec::new();
            let mut max_m = 0;
            for &eps in epsilons {
                let sel = greedy_min_measure_selection(space, measure, y, s, kind, eps)?;
                let audit = audit_greedy_selection(space, measure, &sel);
                if !audit.passed() {
                    found.push(NetBoundViolation::AuditFailed {
                        anchor: y,
                        epsilon: eps,
                        audit,
                    });
                }
                let a = conj.values[y];
                if a > (1.0 + eps) * sel.m() as f64 {
                    found.push(NetBoundViolation::ConjugateExceedsGreedy {
                        anchor: y,
                        epsilon: eps,
                        a_s: a,
                        m: sel.m(),
                    });
                }
                if net.exact && sel.m() > m {
                    found.push(NetBoundViolation::GreedyExceedsM {
                        anchor: y,
                        epsilon: eps,
                        m: sel.m(),
                        net_constant: m,
                    });
                }
                max_m = max_m.max(sel.m());
            }
            Ok((max_m, found))
        })
        .collect();
    let mut max_greedy_m = 0;
    for r in per_anchor {
        let (mm, found) = r?;
        max_greedy_m = max_greedy_m.max(mm);
        violations.extend(found);
    }
    // Greedy facts hold regardless of M; only M comparisons need exactness.
    let falsification = !violations.is_empty()
        && (net.exact
            || violations
                .iter()
                .any(|v| !matches!(v, NetBoundViolation::NormExceedsM { .. })));
    Ok(NetBoundReport {
        radius: s,
        kind,
        norm,
        argmax,
        net_constant: m,
        net_constant_exact: net.exact,
        anchors_checked: conj.support.len(),
        max_greedy_m,
        violations,
        falsification,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpBoundReport {
    pub p: f64,
    pub bound: f64,
    pub trials: usize,
    /// Largest observed `||A f||_p / ||f||_p`: a lower bound on the `L^p` norm.
    pub max_ratio: f64,
    /// `||A 1_X||_p / ||1_X||_p`.
    pub indicator_ratio: f64,
    pub violations: usize,
    pub linf_violations: usize,
}

impl LpBoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.linf_violations == 0
    }
}

/// Monte-Carlo check of `||A f||_p <= M^{1/p} ||f||_p` with standard normal `f`
/// on the support, plus `||A f||_inf <= ||f||_inf`.
pub fn lp_bound_check(
    op: &AveragingOperator<'_>,
    p: f64,
    m: f64,
    trials: usize,
    seed: u64,
) -> Result<LpBoundReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidP(p));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let measure = op.measure;
    let n = op.space.len();
    let support = measure.support();
    let bound = m.powf(p.recip());
    let one = FunctionOnSpace::constant(n, 1.0);
    let indicator_ratio = lp_norm(measure, &op.apply(&one)?, p)? / lp_norm(measure, &one, p)?;
    let mut rng = SplitMix64::new(seed);
    let mut report = LpBoundReport {
        p,
        bound,
        trials,
        max_ratio: indicator_ratio,
        indicator_ratio,
        violations: 0,
        linf_violations: 0,
    };
    let mut values = vec![0.0; n];
    for _ in 0..trials {
        for &i in &support {
            values[i] = rng.standard_normal();
        }
        let f = FunctionOnSpace::from_finite(values.clone());
        let af = op.apply(&f)?;
        let (nf, naf) = (lp_norm(measure, &f, p)?, lp_norm(measure, &af, p)?);
        if naf > bound * nf + 1e-9 {
            report.violations += 1;
        }
        let (sup_f, sup_af) = (
            lp_norm(measure, &f, f64::INFINITY)?,
            lp_norm(measure, &af, f64::INFINITY)?,
        );
        // a weighted mean can land one rounding step above the max
        if sup_af > sup_f * (1.0 + 4.0 * f64::EPSILON) {
            report.linf_violations += 1;
        }
        if nf > 0.0 {
            report.max_ratio = report.max_ratio.max(naf / nf);
        }
    }
    Ok(report)
}

/// Radii at which ball measures on the support can change, plus half the
/// smallest gap so that every support ball can be a singleton.
pub fn radii_grid(space: &MetricSpace, measure: &DiscreteMeasure) -> Vec<f64> {
    let support = measure.support();
    let mut grid = space.distinct_distances(Some(&support));
    match grid.first() {
        Some(&d) => grid.insert(0, d / 2.0),
        None => grid.push(1.0),
    }
    grid
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparabilityReport {
    /// Smallest `C` with `mu B(x,r) <= C mu B(y,r)` whenever `d(x,y) < r`.
    pub constant: f64,
    /// `(x, y, r)` attaining the constant.
    pub witness: Option<(usize, usize, f64)>,
    /// Largest `||A_s||_1` over [`radii_grid`].
    pub max_norm_over_grid: f64,
    /// `max_norm_over_grid <= C + 1e-12`.
    pub implication_holds: bool,
}

/// Local comparability constant of `measure`, searched over all ordered support
/// pairs and all radii.
///
/// Ball masses only change at pairwise support distances `d_1 < ... < d_K`.
/// For `r` in `(d_k, d_{k+1})` closed balls equal the closed balls of radius
/// `d_k` and the pair condition `d(x,y) < r` admits exactly the pairs with
/// `d(x,y) <= d_k`; open balls on `(d_k, d_{k+1}]` behave the same way. The
/// witness radius is a point of that interval valid for `kind`.
pub fn local_comparability_constant(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    kind: BallKind,
) -> Result<ComparabilityReport> {
    measure.check_space(space)?;
    let (constant, witness) = comparability_search(space, measure, kind);
    let mut max_norm_over_grid: f64 = 0.0;
    for r in radii_grid(space, measure) {
        let op = build_operator(space, measure, r, kind)?;
        max_norm_over_grid = max_norm_over_grid.max(l1_operator_norm(&op));
    }
    Ok(ComparabilityReport {
        constant,
        witness,
        max_norm_over_grid,
        implication_holds: max_norm_over_grid <= constant + 1e-12,
    })
}

/// `(x, y, r)` attaining a comparability ratio.
type PairWitness = Option<(usize, usize, f64)>;

pub(crate) fn comparability_search(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    kind: BallKind,
) -> (f64, PairWitness) {
    let support = measure.support();
    let ds = space.distinct_distances(Some(&support));
    let per_level: Vec<(f64, PairWitness)> = ds
        .par_iter()
        .enumerate()
        .map(|(k, &d)| {
            let masses: Vec<f64> = support
                .iter()
                .map(|&x| ball_mass(space, measure, x, d, BallKind::Closed))
                .collect();
            let witness_r = match (kind, ds.get(k + 1)) {
                (BallKind::Closed, Some(&next)) => d + (next - d) / 2.0,
                (BallKind::Open, Some(&next)) => next,
                (_, None) => 2.0 * d,
            };
            let mut best = (1.0, None);
            for (a, &x) in support.iter().enumerate() {
                for (b, &y) in support.iter().enumerate() {
                    if a != b && space.distance(x, y) <= d {
                        let ratio = masses[a] / masses[b];
                        if ratio > best.0 {
                            best = (ratio, Some((x, y, witness_r)));
                        }
                    }
                }
            }
            best
        })
        .collect();
    per_level
        .into_iter()
        .fold((1.0, None), |acc, c| if c.0 > acc.0 { c } else { acc })
}

/// Centered maximal function `Mf(x) = max_r A_r|f|(x)` over the given radii,
/// on the support (zero elsewhere).
pub fn maximal_function(
    space: &MetricSpace,
    measure: &DiscreteMeasure,
    f: &FunctionOnSpace,
    radii: &[f64],
    kind: BallKind,
) -> Result<FunctionOnSpace> {
    if radii.is_empty() {
        return Err(Error::EmptyRadii);
    }
    measure.check_space(space)?;
    let support = measure.support();
    if let Some(gap) = space.min_positive_distance(&support) {
        let isolating = radii.iter().any(|&r| r > 0.0 && !kind.contains(gap, r));
        if !isolating {
            return Err(Error::RadiiTooCoarse { min_gap: gap });
        }
    }
    let abs = f.abs();
    let mut out = vec![f64::NEG_INFINITY; space.len()];
    for &r in radii {
        let op = build_operator(space, measure, r, kind)?;
        let avg = op.apply(&abs)?;
        for &x in &support {
            out[x] = out[x].max(avg.values()[x]);
        }
    }
    for v in out.iter_mut().filter(|v| v.is_infinite()) {
        *v = 0.0;
    }
    Ok(FunctionOnSpace::from_finite(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{build_space, Geometry, Norm};
    use crate::nets::{net_constant_m, DEFAULT_EXHAUSTIVE_CAP};

    fn line3() -> (MetricSpace, DiscreteMeasure) {
        (
            build_space(Geometry::Coordinates {
                points: vec![vec![0.0], vec![1.0], vec![2.0]],
                norm: Norm::L2,
            })
            .unwrap(),
            DiscreteMeasure::new(vec![1.0; 3]).unwrap(),
        )
    }

    fn point() -> (MetricSpace, DiscreteMeasure) {
        (
            build_space(Geometry::Coordinates {
                points: vec![vec![0.3, 0.1]],
                norm: Norm::L2,
            })
            .unwrap(),
            DiscreteMeasure::new(vec![0.7]).unwrap(),
        )
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15 * b.abs().max(1.0)
    }

    #[test]
    fn line_operator_rows() {
        let (s, m) = line3();
        let op = build_operator(&s, &m, 1.0, BallKind::Closed).unwrap();
        let rows: Vec<Vec<f64>> = op.rows().iter().map(|r| op.coefficients(r)).collect();
        assert_eq!(rows[0], vec![0.5, 0.5]);
        assert!(rows[1].iter().all(|&c| close(c, 1.0 / 3.0)));
        assert_eq!(rows[2], vec![0.5, 0.5]);
    }

    #[test]
    fn single_point_is_trivial() {
        let (s, m) = point();
        for kind in BallKind::BOTH {
            let op = build_operator(&s, &m, 0.25, kind).unwrap();
            assert_eq!(op.coefficients(&op.rows()[0]), vec![1.0]);
            assert_eq!(l1_operator_norm(&op), 1.0);
            assert_eq!(l1_norm_bruteforce_oracle(&op).unwrap(), 1.0);
            assert_eq!(op.conjugate().values, vec![1.0]);
        }
        let sel = greedy_min_measure_selection(&s, &m, 0, 1.0, BallKind::Closed, 0.1).unwrap();
        assert_eq!(sel.selected, vec![0]);
    }

    #[test]
    fn apply_indicator_on_line() {
        let (s, m) = line3();
        let op = build_operator(&s, &m, 1.0, BallKind::Closed).unwrap();
        let out = op.apply(&FunctionOnSpace::indicator(3, 1, 1.0)).unwrap();
        assert_eq!(out.values()[0], 0.5);
        assert!(close(out.values()[1], 1.0 / 3.0));
        assert_eq!(out.values()[2], 0.5);
        let c = op.apply(&FunctionOnSpace::constant(3, 1.0)).unwrap();
        assert_eq!(c.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn conjugate_on_line() {
        let (s, m) = line3();
        let a = conjugate_function(&s, &m, 1.0, BallKind::Closed).unwrap();
        assert!(close(a.values[0], 5.0 / 6.0));
        assert!(close(a.values[1], 4.0 / 3.0));
        assert!(close(a.values[2], 5.0 / 6.0));
        let op = build_operator(&s, &m, 1.0, BallKind::Closed).unwrap();
        assert!(close(l1_operator_norm(&op), 4.0 / 3.0));
        assert!(close(l1_norm_bruteforce_oracle(&op).unwrap(), 4.0 / 3.0));
        assert_eq!(a.sup().0, 1);
    }

    #[test]
    fn off_support_rows_are_absent() {
        let s = build_space(Geometry::Coordinates {
            points: vec![vec![0.0], vec![1.0], vec![2.0]],
            norm: Norm::L1,
        })
        .unwrap();
        let m = DiscreteMeasure::new(vec![1.0, 0.0, 3.0]).unwrap();
        let op = build_operator(&s, &m, 1.0, BallKind::Closed).unwrap();
        assert_eq!(
            op.rows().iter().map(|r| r.point).collect::<Vec<_>>(),
            vec![0, 2]
        );
        let out = op
            .apply(&FunctionOnSpace::new(vec![2.0, 50.0, 4.0]).unwrap())
            .unwrap();
        assert_eq!(out.values(), &[2.0, 0.0, 4.0]);
        let a = op.conjugate();
        assert_eq!(a.values, vec![1.0, 0.0, 1.0]);
        assert!(matches!(
            greedy_min_measure_selection(&s, &m, 1, 1.0, BallKind::Closed, 0.1),
            Err(Error::AnchorOffSupport(1))
        ));
    }

    #[test]
    fn stabilized_operator_has_unit_norm_exactly() {
        let s = build_space(Geometry::Coordinates {
            points: vec![vec![0.0], vec![0.1], vec![0.7], vec![1.3]],
            norm: Norm::L2,
        })
        .unwrap();
        let m = DiscreteMeasure::new(vec![0.1, 0.2, 0.3, 0.7]).unwrap();
        let op = build_operator(&s, &m, 2.0, BallKind::Closed).unwrap();
        assert!(op.is_stabilized());
        assert_eq!(l1_operator_norm(&op), 1.0);
        let f = FunctionOnSpace::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let avg = op.apply(&f).unwrap();
        let global = (0.1 * 1.0 + 0.2 * 2.0 + 0.3 * 3.0 + 0.7 * 4.0) / m.total();
        assert!(avg.values().iter().all(|&v| v == avg.values()[0]));
        assert!(close(avg.values()[0], global));
    }

    #[test]
    fn greedy_trace_on_line() {
        let (s, m) = line3();
        let sel = greedy_min_measure_selection(&s, &m, 1, 1.0, BallKind::Closed, 0.1).unwrap();
        assert_eq!(sel.selected, vec![0, 2]);
        assert_eq!(sel.thresholds, vec![2.0, 2.0]);
        assert_eq!(sel.m(), 2);
        assert!(audit_greedy_selection(&s, &m, &sel).passed());
        let a = conjugate_function(&s, &m, 1.0, BallKind::Closed).unwrap();
        assert!(a.values[1] <= 1.1 * 2.0);
    }

    #[test]
    fn audit_catches_tampering() {
        let (s, m) = line3();
        let mut sel = greedy_min_measure_selection(&s, &m, 1, 1.0, BallKind::Closed, 0.1).unwrap();
        sel.selected = vec![0, 1];
        let audit = audit_greedy_selection(&s, &m, &sel);
        assert!(!audit.is_net);
        assert!(!audit.covers || !audit.passed());
        let mut sel = greedy_min_measure_selection(&s, &m, 1, 1.0, BallKind::Closed, 0.1).unwrap();
        sel.thresholds[1] = 1.0;
        assert!(!audit_greedy_selection(&s, &m, &sel).thresholds_rescanned);
    }

    #[test]
    fn net_bound_on_line_and_point() {
        let (s, m) = line3();
        let net = net_constant_m(&s, BallKind::Closed, None, DEFAULT_EXHAUSTIVE_CAP);
        let rep = verify_net_bound(&s, &m, 1.0, BallKind::Closed, &DEFAULT_EPSILONS, &net).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.net_constant, 2);
        assert!(close(rep.norm, 4.0 / 3.0));
        let (s, m) = point();
        let net = net_constant_m(&s, BallKind::Closed, None, DEFAULT_EXHAUSTIVE_CAP);
        let rep = verify_net_bound(&s, &m, 1.0, BallKind::Closed, &DEFAULT_EPSILONS, &net).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.norm, 1.0);
    }

    #[test]
    fn net_bound_flags_a_too_small_exact_m() {
        let (s, m) = line3();
        let mut net = net_constant_m(&s, BallKind::Closed, None, DEFAULT_EXHAUSTIVE_CAP);
        net.cardinality = 1;
        let rep = verify_net_bound(&s, &m, 1.0, BallKind::Closed, &[0.1], &net).unwrap();
        assert!(rep.falsification);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, NetBoundViolation::NormExceedsM { .. })));
    }

    #[test]
    fn lp_bound_on_line() {
        let (s, m) = line3();
        let op = build_operator(&s, &m, 1.0, BallKind::Closed).unwrap();
        for p in [1.5, 2.0, 4.0] {
            let rep = lp_bound_check(&op, p, 2.0, 10_000, 7).unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert_eq!(rep.indicator_ratio, 1.0);
            assert!(rep.max_ratio <= 2f64.powf(1.0 / p) + 1e-9);
            assert!(rep.max_ratio >= 1.0);
        }
        assert!(matches!(
            lp_bound_check(&op, 1.0, 2.0, 1, 0),
            Err(Error::InvalidP(_))
        ));
        let (s, m) = point();
        let op = build_operator(&s, &m, 1.0, BallKind::Closed).unwrap();
        let rep = lp_bound_check(&op, 2.0, 1.0, 100, 1).unwrap();
        assert_eq!(rep.max_ratio, 1.0);
    }

    #[test]
    fn comparability_on_line() {
        let (s, m) = line3();
        for kind in BallKind::BOTH {
            let rep = local_comparability_constant(&s, &m, kind).unwrap();
            assert_eq!(rep.constant, 1.5);
            let (x, y, r) = rep.witness.unwrap();
            assert_eq!((x, y), (1, 0));
            assert!(s.distance(x, y) < r);
            let ratio =
                m.mass_of(&s.ball(x, r, kind).members) / m.mass_of(&s.ball(y, r, kind).members);
            assert_eq!(ratio, 1.5);
            assert!(rep.implication_holds);
        }
        let (s, m) = point();
        let rep = local_comparability_constant(&s, &m, BallKind::Closed).unwrap();
        assert_eq!(rep.constant, 1.0);
        assert!(rep.witness.is_none());
    }

    #[test]
    fn maximal_function_on_line() {
        let (s, m) = line3();
        let f = FunctionOnSpace::indicator(3, 1, 1.0);
        let mf = maximal_function(&s, &m, &f, &[0.5, 1.0, 2.0], BallKind::Closed).unwrap();
        assert_eq!(mf.values(), &[0.5, 1.0, 0.5]);
        let prob = DiscreteMeasure::uniform(3).unwrap();
        let one = FunctionOnSpace::constant(3, 1.0);
        let mf = maximal_function(&s, &prob, &one, &radii_grid(&s, &prob), BallKind::Open).unwrap();
        assert_eq!(mf.values(), &[1.0, 1.0, 1.0]);
        assert!(matches!(
            maximal_function(&s, &m, &f, &[], BallKind::Closed),
            Err(Error::EmptyRadii)
        ));
        assert!(matches!(
            maximal_function(&s, &m, &f, &[1.0, 2.0], BallKind::Closed),
            Err(Error::RadiiTooCoarse { .. })
        ));
        // an open ball of radius equal to the gap is a singleton
        assert!(maximal_function(&s, &m, &f, &[1.0], BallKind::Open).is_ok());
    }

    #[test]
    fn grid_has_half_gap() {
        let (s, m) = line3();
        assert_eq!(radii_grid(&s, &m), vec![0.5, 1.0, 2.0]);
    }
}
