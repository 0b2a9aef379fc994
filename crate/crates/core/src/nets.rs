//! r-nets inside balls, the net constant `M`, and doubling-constant bounds.
//!
//! A maximum r-net inside a ball is a maximum independent set of the conflict
//! graph whose edges join members too close to both be in the net. Balls up
//! to `exhaustive_cap` members are solved exactly by branch and bound; larger
//! balls fall back to a farthest-point greedy net and are flagged inexact.

use rayon::prelude::*;
use serde::Serialize;

use crate::metric::{BallKind, MetricSpace};

/// Largest ball solved exactly by [`max_net_in_ball`] unless told otherwise.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 18;

/// Largest ball whose cover is refined by exact search in [`doubling_upper_bound`].
pub const EXHAUSTIVE_COVER_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NetKind {
    Strict,
    NonStrict,
}

impl NetKind {
    /// Strict nets go with closed balls, non-strict nets with open balls.
    pub fn for_ball(kind: BallKind) -> Self {
        match kind {
            BallKind::Closed => NetKind::Strict,
            BallKind::Open => NetKind::NonStrict,
        }
    }

    #[inline]
    pub fn separated(self, d: f64, r: f64) -> bool {
        match self {
            NetKind::Strict => d > r,
            NetKind::NonStrict => d >= r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetStats {
    pub radius: f64,
    /// Ball center; `None` never occurs for a single-ball query.
    pub center: Option<usize>,
    pub net_points: Vec<usize>,
    pub cardinality: usize,
    /// True when every ball involved was searched exhaustively.
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    GreedyCover,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingEstimate {
    pub upper_bound: usize,
    /// The net constant `M`, which never exceeds the doubling constant.
    pub lower_bound: usize,
    pub method: CoverMethod,
    pub lower_exact: bool,
    /// Ball `(center, radius)` whose cover attained `upper_bound`.
    pub witness: Option<(usize, f64)>,
}

/// Largest `r`-net of `net_kind` inside `B(center, r)`.
pub fn max_net_in_ball(
    space: &MetricSpace,
    center: usize,
    r: f64,
    ball_kind: BallKind,
    net_kind: NetKind,
    exhaustive_cap: usize,
) -> NetStats {
    let members = space.ball(center, r, ball_kind).members;
    let (net_points, exact) = if members.len() <= exhaustive_cap.min(64) {
        (exact_net(space, &members, r, net_kind), true)
    } else {
        (greedy_net(space, center, &members, r, net_kind), false)
    };
    assert_net(space, &net_points, r, net_kind);
    NetStats {
        radius: r,
        center: Some(center),
        cardinality: net_points.len(),
        net_points,
        exact,
    }
}

fn assert_net(space: &MetricSpace, net: &[usize], r: f64, net_kind: NetKind) {
    for (a, &x) in net.iter().enumerate() {
        for &y in &net[a + 1..] {
            assert!(
                net_kind.separated(space.distance(x, y), r),
                "points {x} and {y} violate the {net_kind:?} {r}-net condition"
            );
        }
    }
}

fn exact_net(space: &MetricSpace, members: &[usize], r: f64, net_kind: NetKind) -> Vec<usize> {
    let k = members.len();
    let adj: Vec<u64> = (0..k)
        .map(|a| {
            (0..k)
                .filter(|&b| {
                    b != a && !net_kind.separated(space.distance(members[a], members[b]), r)
                })
                .fold(0u64, |m, b| m | 1 << b)
        })
        .collect();
    let all = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let best = max_independent_set(&adj, all);
    (0..k)
        .filter(|&b| best >> b & 1 == 1)
        .map(|b| members[b])
        .collect()
}

/// Maximum independent set of the graph restricted to `candidates`, as a bitmask.
pub(crate) fn max_independent_set(adj: &[u64], candidates: u64) -> u64 {
    fn search(adj: &[u64], cand: u64, current: u64, best: &mut u64) {
        if cand == 0 {
            if current.count_ones() > best.count_ones() {
                *best = current;
            }
            return;
        }
        if current.count_ones() + cand.count_ones() <= best.count_ones() {
            return;
        }
        // Vertices with no neighbour among the candidates always belong.
        let mut free = 0u64;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if adj[v] & cand == 0 {
                free |= 1 << v;
            }
        }
        if free != 0 {
            return search(adj, cand & !free, current | free, best);
        }
        // Branch on the candidate with most neighbours (lowest id on ties).
        let mut pivot = cand.trailing_zeros() as usize;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (adj[v] & cand).count_ones() > (adj[pivot] & cand).count_ones() {
                pivot = v;
            }
        }
        search(
            adj,
            cand & !adj[pivot] & !(1 << pivot),
            current | 1 << pivot,
            best,
        );
        search(adj, cand & !(1 << pivot), current, best);
    }
    let mut best = 0u64;
    search(adj, candidates, 0, &mut best);
    best
}

/// Farthest-point net: start at the center, then repeatedly add the admissible
/// member farthest from the current net.
fn greedy_net(
    space: &MetricSpace,
    center: usize,
    members: &[usize],
    r: f64,
    net_kind: NetKind,
) -> Vec<usize> {
    let mut net = vec![center];
    let mut gap: Vec<f64> = members.iter().map(|&y| space.distance(center, y)).collect();
    let mut alive: Vec<bool> = gap.iter().map(|&d| net_kind.separated(d, r)).collect();
    loop {
        let mut pick: Option<usize> = None;
        for (a, _) in members.iter().enumerate() {
            if alive[a] && pick.is_none_or(|p| gap[a] > gap[p]) {
                pick = Some(a);
            }
        }
        let Some(p) = pick else { break };
        let chosen = members[p];
        net.push(chosen);
        for (a, &y) in members.iter().enumerate() {
            let d = space.distance(chosen, y);
            gap[a] = gap[a].min(d);
            alive[a] = alive[a] && net_kind.separated(d, r);
        }
    }
    net.sort_unstable();
    net
}

/// Default candidate radii: distinct positive pairwise distances.
fn candidate_radii(space: &MetricSpace, radii: Option<&[f64]>) -> Vec<f64> {
    let mut rs = match radii {
        Some(r) => r.iter().copied().filter(|&r| r > 0.0).collect(),
        None => space.distinct_distances(None),
    };
    if rs.is_empty() {
        rs.push(1.0);
    }
    rs
}

/// Net constant `M`: largest `r`-net inside any `B(x, r)` over all centers and
/// the given radii (distinct pairwise distances by default). Nets are strict
/// for closed balls and non-strict for open ones.
pub fn net_constant_m(
    space: &MetricSpace,
    ball_kind: BallKind,
    radii: Option<&[f64]>,
    exhaustive_cap: usize,
) -> NetStats {
    let rs = candidate_radii(space, radii);
    let net_kind = NetKind::for_ball(ball_kind);
    let per_center: Vec<(Option<NetStats>, bool)> = (0..space.len())
        .into_par_iter()
        .map(|x| {
            let mut best: Option<NetStats> = None;
            let mut exact = true;
            for &r in &rs {
                let stats = max_net_in_ball(space, x, r, ball_kind, net_kind, exhaustive_cap);
                exact &= stats.exact;
                if best
                    .as_ref()
                    .is_none_or(|b| stats.cardinality > b.cardinality)
                {
                    best = Some(stats);
                }
            }
            (best, exact)
        })
        .collect();
    let exact = per_center.iter().all(|(_, e)| *e);
    let mut best = per_center
        .into_iter()
        .filter_map(|(b, _)| b)
        .reduce(|a, b| if b.cardinality > a.cardinality { b } else { a })
        .expect("space has at least one point");
    best.exact = exact;
    best
}

/// Bounds the doubling constant for the given ball kind on the finite space.
///
/// For every center and every distinct pairwise distance `r`, the ball
/// `B(x, r)` is covered by balls of radius `r/2` centered at points of the
/// space: greedily, then exactly when the ball has at most
/// [`EXHAUSTIVE_COVER_CAP`] members. The largest cover is the upper bound.
/// Restricting cover centers to the sample can only overestimate.
pub fn doubling_upper_bound(space: &MetricSpace, ball_kind: BallKind) -> DoublingEstimate {
    let net = net_constant_m(space, ball_kind, None, DEFAULT_EXHAUSTIVE_CAP);
    doubling_upper_bound_with_net(space, ball_kind, &net)
}

/// Cover size, its `(center, radius)` witness, and whether it was exact.
type CenterCover = (usize, Option<(usize, f64)>, bool);

/// As [`doubling_upper_bound`], reusing an already computed net constant.
pub fn doubling_upper_bound_with_net(
    space: &MetricSpace,
    ball_kind: BallKind,
    net: &NetStats,
) -> DoublingEstimate {
    let rs = space.distinct_distances(None);
    let n = space.len();
    let per_center: Vec<CenterCover> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = 1usize;
            let mut witness = None;
            let mut exact = true;
            for &r in &rs {
                let (size, was_exact) = cover_ball(space, x, r, ball_kind);
                exact &= was_exact;
                if size > best {
                    best = size;
                    witness = Some((x, r));
                }
            }
            (best, witness, exact)
        })
        .collect();
    let exact = per_center.iter().all(|p| p.2);
    let (upper_bound, witness) =
        per_center.iter().fold(
            (1usize, None),
            |acc, p| if p.0 > acc.0 { (p.0, p.1) } else { acc },
        );
    DoublingEstimate {
        upper_bound,
        lower_bound: net.cardinality,
        method: if exact {
            CoverMethod::Exhaustive
        } else {
            CoverMethod::GreedyCover
        },
        lower_exact: net.exact,
        witness,
    }
}

/// Size of a cover of `B(center, r)` by radius-`r/2` balls at space points.
fn cover_ball(space: &MetricSpace, center: usize, r: f64, kind: BallKind) -> (usize, bool) {
    let members = space.ball(center, r, kind).members;
    let half = r / 2.0;
    // Candidate sets as member-index lists, deduplicated, in center id order.
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for z in 0..space.len() {
        let s: Vec<usize> = (0..members.len())
            .filter(|&a| kind.contains(space.distance(z, members[a]), half))
            .collect();
        if !s.is_empty() && !sets.contains(&s) {
            sets.push(s);
        }
    }
    let greedy = greedy_cover(members.len(), &sets);
    if members.len() <= EXHAUSTIVE_COVER_CAP {
        let masks: Vec<u32> = sets
            .iter()
            .map(|s| s.iter().fold(0u32, |m, &a| m | 1 << a))
            .collect();
        (exact_cover(members.len(), &masks, greedy), true)
    } else {
        (greedy, false)
    }
}

fn greedy_cover(universe: usize, sets: &[Vec<usize>]) -> usize {
    let mut covered = vec![false; universe];
    let mut left = universe;
    let mut used = 0;
    while left > 0 {
        let gain = |s: &Vec<usize>| s.iter().filter(|&&a| !covered[a]).count();
        let (best, g) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, gain(s)))
            .fold((0, 0), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        assert!(g > 0, "cover sets do not cover the ball");
        for &a in &sets[best] {
            if !covered[a] {
                covered[a] = true;
                left -= 1;
            }
        }
        used += 1;
    }
    used
}

/// Minimum number of `masks` covering `0..universe`; `upper` is a known cover size.
fn exact_cover(universe: usize, masks: &[u32], upper: usize) -> usize {
    fn search(target: u32, covered: u32, used: usize, masks: &[u32], best: &mut usize) {
        if covered == target {
            *best = (*best).min(used);
            return;
        }
        if used + 1 >= *best {
            return;
        }
        let first = (!covered & target).trailing_zeros();
        for &m in masks.iter().filter(|&&m| m >> first & 1 == 1) {
            search(target, covered | m, used + 1, masks, best);
        }
    }
    let target = if universe == 32 {
        u32::MAX
    } else {
        (1u32 << universe) - 1
    };
    let mut best = upper;
    search(target, 0, 0, masks, &mut best);
    best
}
