//! Finite metric spaces and ball queries.
//!
//! A [`MetricSpace`] is either a cloud of coordinate vectors under an
//! `l1`/`l2`/`linf` norm, or an explicit symmetric distance matrix. Ball
//! membership is decided with plain `<` / `<=` on the computed distance, so
//! instances built from dyadic coordinates under `l1`/`linf` are bit-exact.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spaces with at most this many points get a materialized distance matrix.
pub const DEFAULT_CACHE_MAX_POINTS: usize = 2048;

/// Absolute slack allowed when validating the triangle inequality of a user matrix.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Norm::L1 => diffs.sum(),
            Norm::L2 => diffs.map(|t| t * t).sum::<f64>().sqrt(),
            Norm::Linf => diffs.fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            other => Err(Error::InvalidInput(format!("unknown norm {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallKind {
    Open,
    Closed,
}

impl BallKind {
    pub const BOTH: [BallKind; 2] = [BallKind::Open, BallKind::Closed];

    /// Membership test for a point at distance `d` from the center.
    #[inline]
    pub fn contains(self, d: f64, radius: f64) -> bool {
        match self {
            BallKind::Open => d < radius,
            BallKind::Closed => d <= radius,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BallKind::Open => "open",
            BallKind::Closed => "closed",
        }
    }
}

impl std::fmt::Display for BallKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BallKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(BallKind::Open),
            "closed" => Ok(BallKind::Closed),
            other => Err(Error::InvalidInput(format!("unknown ball kind {other:?}"))),
        }
    }
}

/// How distances are defined, as supplied by the caller.
#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Coordinates { points: Vec<Vec<f64>>, norm: Norm },
    DistanceMatrix(Vec<Vec<f64>>),
}

#[derive(Clone, Copy, Debug)]
pub struct SpaceConfig {
    pub cache_max_points: usize,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            cache_max_points: DEFAULT_CACHE_MAX_POINTS,
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Coords {
        dim: usize,
        coords: Vec<f64>,
        norm: Norm,
        /// Point ids sorted by first coordinate (ties by id), with the sorted keys.
        by_first: Vec<usize>,
        first_keys: Vec<f64>,
    },
    Matrix(Vec<f64>),
}

/// A validated finite metric space on points `0..len()`.
#[derive(Clone, Debug)]
pub struct MetricSpace {
    n: usize,
    repr: Repr,
    cache: Option<Vec<f64>>,
}

/// A ball together with its sorted member list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    pub kind: BallKind,
    pub members: Vec<usize>,
}

impl Ball {
    pub fn contains(&self, point: usize) -> bool {
        self.members.binary_search(&point).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Builds a space with the default configuration.
pub fn build_space(geometry: Geometry) -> Result<MetricSpace> {
    MetricSpace::with_config(geometry, SpaceConfig::default())
}

/// Ball query; see [`MetricSpace::ball`].
pub fn ball(space: &MetricSpace, center: usize, radius: f64, kind: BallKind) -> Ball {
    space.ball(center, radius, kind)
}

pub fn distance(space: &MetricSpace, x: usize, y: usize) -> f64 {
    space.distance(x, y)
}

impl MetricSpace {
    pub fn with_config(geometry: Geometry, config: SpaceConfig) -> Result<Self> {
        let (n, repr) = match geometry {
            Geometry::Coordinates { points, norm } => {
                let n = points.len();
                if n == 0 {
                    return Err(Error::InvalidInput("space needs at least one point".into()));
                }
                let dim = points[0].len();
                if dim == 0 {
                    return Err(Error::InvalidInput(
                        "points need at least one coordinate".into(),
                    ));
                }
                let mut coords = Vec::with_capacity(n * dim);
                for (i, p) in points.iter().enumerate() {
                    if p.len() != dim {
                        return Err(Error::InvalidInput(format!(
                            "point {i} has {} coordinates, expected {dim}",
                            p.len()
                        )));
                    }
                    if let Some(c) = p.iter().find(|c| !c.is_finite()) {
                        return Err(Error::InvalidInput(format!("point {i} has coordinate {c}")));
                    }
                    coords.extend_from_slice(p);
                }
                let point = |i: usize| &coords[i * dim..(i + 1) * dim];
                let mut lex: Vec<usize> = (0..n).collect();
                lex.sort_by(|&a, &b| {
                    point(a)
                        .partial_cmp(point(b))
                        .expect("coordinates are finite")
                        .then(a.cmp(&b))
                });
                if let Some(w) = lex.windows(2).find(|w| point(w[0]) == point(w[1])) {
                    return Err(Error::NonMetric {
                        i: w[0],
                        j: w[1],
                        k: w[1],
                        reason: "distinct points with identical coordinates".into(),
                    });
                }
                let mut by_first: Vec<usize> = (0..n).collect();
                by_first
                    .sort_by(|&a, &b| coords[a * dim].total_cmp(&coords[b * dim]).then(a.cmp(&b)));
                let first_keys = by_first.iter().map(|&i| coords[i * dim]).collect();
                (
                    n,
                    Repr::Coords {
                        dim,
                        coords,
                        norm,
                        by_first,
                        first_keys,
                    },
                )
            }
            Geometry::DistanceMatrix(rows) => {
                let n = rows.len();
                if n == 0 {
                    return Err(Error::InvalidInput("space needs at least one point".into()));
                }
                let mut flat = Vec::with_capacity(n * n);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::InvalidInput(format!(
                            "distance matrix row {i} has {} entries, expected {n}",
                            row.len()
                        )));
                    }
                    flat.extend_from_slice(row);
                }
                validate_metric(n, &flat)?;
                (n, Repr::Matrix(flat))
            }
        };
        let mut space = MetricSpace {
            n,
            repr,
            cache: None,
        };
        if matches!(space.repr, Repr::Coords { .. }) && n <= config.cache_max_points {
            let cache: Vec<f64> = (0..n)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let space = &space;
                    (0..n).map(move |j| space.raw_distance(i, j))
                })
                .collect();
            space.cache = Some(cache);
        }
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Coordinates of point `i`, when the space is coordinate-based.
    pub fn coordinates(&self, i: usize) -> Option<&[f64]> {
        match &self.repr {
            Repr::Coords { dim, coords, .. } => Some(&coords[i * dim..(i + 1) * dim]),
            Repr::Matrix(_) => None,
        }
    }

    pub fn dimension(&self) -> Option<usize> {
        match &self.repr {
            Repr::Coords { dim, .. } => Some(*dim),
            Repr::Matrix(_) => None,
        }
    }

    pub fn norm(&self) -> Option<Norm> {
        match &self.repr {
            Repr::Coords { norm, .. } => Some(*norm),
            Repr::Matrix(_) => None,
        }
    }

    /// Reconstructs the geometry this space was built from.
    pub fn geometry(&self) -> Geometry {
        match &self.repr {
            Repr::Coords {
                dim, coords, norm, ..
            } => Geometry::Coordinates {
                points: coords.chunks(*dim).map(<[f64]>::to_vec).collect(),
                norm: *norm,
            },
            Repr::Matrix(m) => {
                Geometry::DistanceMatrix(m.chunks(self.n).map(<[f64]>::to_vec).collect())
            }
        }
    }

    fn raw_distance(&self, x: usize, y: usize) -> f64 {
        match &self.repr {
            Repr::Coords {
                dim, coords, norm, ..
            } => {
                if x == y {
                    return 0.0;
                }
                norm.eval(
                    &coords[x * dim..(x + 1) * dim],
                    &coords[y * dim..(y + 1) * dim],
                )
            }
            Repr::Matrix(m) => m[x * self.n + y],
        }
    }

    #[inline]
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        match &self.cache {
            Some(c) => c[x * self.n + y],
            None => self.raw_distance(x, y),
        }
    }

    /// Returns the ball `B(center, radius)` of the given kind.
    ///
    /// Panics if `radius` is not a positive number or `center` is out of range.
    pub fn ball(&self, center: usize, radius: f64, kind: BallKind) -> Ball {
        let mut members = Vec::new();
        self.ball_members_into(center, radius, kind, &mut members);
        Ball {
            center,
            radius,
            kind,
            members,
        }
    }

    /// Writes the sorted members of `B(center, radius)` into `out`.
    pub fn ball_members_into(
        &self,
        center: usize,
        radius: f64,
        kind: BallKind,
        out: &mut Vec<usize>,
    ) {
        assert!(radius > 0.0, "ball radius must be positive, got {radius}");
        assert!(center < self.n, "center {center} out of range");
        out.clear();
        match &self.repr {
            Repr::Coords {
                dim,
                coords,
                by_first,
                first_keys,
                ..
            } if self.cache.is_none() => {
                // Every supported norm dominates the first-coordinate gap, so
                // only a window of the sorted order can hold members.
                let c = coords[center * dim];
                let slack = radius * 1e-12 + f64::MIN_POSITIVE;
                let lo = first_keys.partition_point(|&k| k < c - radius - slack);
                let hi = first_keys.partition_point(|&k| k <= c + radius + slack);
                out.extend(
                    by_first[lo..hi]
                        .iter()
                        .copied()
                        .filter(|&y| kind.contains(self.raw_distance(center, y), radius)),
                );
                out.sort_unstable();
            }
            _ => {
                out.extend((0..self.n).filter(|&y| kind.contains(self.distance(center, y), radius)))
            }
        }
    }

    /// Sorted distinct positive distances between points of `subset` (all points if `None`).
    pub fn distinct_distances(&self, subset: Option<&[usize]>) -> Vec<f64> {
        let all: Vec<usize>;
        let pts = match subset {
            Some(s) => s,
            None => {
                all = (0..self.n).collect();
                &all
            }
        };
        let mut ds: Vec<f64> = pts
            .iter()
            .enumerate()
            .flat_map(|(a, &x)| pts[a + 1..].iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.distance(x, y))
            .filter(|&d| d > 0.0)
            .collect();
        ds.sort_by(f64::total_cmp);
        ds.dedup();
        ds
    }

    /// Smallest positive distance between two points of `subset`, if any.
    pub fn min_positive_distance(&self, subset: &[usize]) -> Option<f64> {
        match &self.repr {
            Repr::Coords { dim, coords, .. } if subset.len() > 256 => {
                let mut order = subset.to_vec();
                order.sort_by(|&a, &b| coords[a * dim].total_cmp(&coords[b * dim]).then(a.cmp(&b)));
                let mut best = f64::INFINITY;
                for (a, &x) in order.iter().enumerate() {
                    for &y in &order[a + 1..] {
                        if coords[y * dim] - coords[x * dim] > best {
                            break;
                        }
                        let d = self.distance(x, y);
                        if d > 0.0 && d < best {
                            best = d;
                        }
                    }
                }
                best.is_finite().then_some(best)
            }
            _ => {
                let mut best = f64::INFINITY;
                for (a, &x) in subset.iter().enumerate() {
                    for &y in &subset[a + 1..] {
                        let d = self.distance(x, y);
                        if d > 0.0 && d < best {
                            best = d;
                        }
                    }
                }
                best.is_finite().then_some(best)
            }
        }
    }

    /// Largest distance between two points of `subset`.
    pub fn diameter(&self, subset: &[usize]) -> f64 {
        subset
            .iter()
            .enumerate()
            .flat_map(|(a, &x)| subset[a + 1..].iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.distance(x, y))
            .fold(0.0, f64::max)
    }
}

fn validate_metric(n: usize, m: &[f64]) -> Result<()> {
    let at = |i: usize, j: usize| m[i * n + j];
    for i in 0..n {
        if at(i, i) != 0.0 {
            return Err(Error::NonMetric {
                i,
                j: i,
                k: i,
                reason: format!("nonzero diagonal entry {}", at(i, i)),
            });
        }
        for j in 0..n {
            let d = at(i, j);
            if !d.is_finite() || d < 0.0 {
                return Err(Error::NonMetric {
                    i,
                    j,
                    k: j,
                    reason: format!("entry {d} is not a finite nonnegative number"),
                });
            }
            if d == 0.0 && i != j {
                return Err(Error::NonMetric {
                    i,
                    j,
                    k: j,
                    reason: "distinct points at distance zero".into(),
                });
            }
            if d != at(j, i) {
                return Err(Error::NonMetric {
                    i,
                    j,
                    k: j,
                    reason: format!("asymmetric: d({i},{j}) = {d} but d({j},{i}) = {}", at(j, i)),
                });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                if at(i, j) > at(i, k) + at(k, j) + TRIANGLE_TOLERANCE {
                    return Err(Error::NonMetric {
                        i,
                        j,
                        k,
                        reason: format!(
                            "triangle inequality fails: {} > {} + {}",
                            at(i, j),
                            at(i, k),
                            at(k, j)
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> MetricSpace {
        build_space(Geometry::Coordinates {
            points: vec![vec![0.0], vec![1.0], vec![2.0]],
            norm: Norm::L2,
        })
        .unwrap()
    }

    #[test]
    fn collinear_points() {
        let s = line3();
        assert_eq!(s.distance(0, 2), 2.0);
        assert_eq!(s.distance(1, 1), 0.0);
    }

    #[test]
    fn two_point_matrix_is_valid() {
        let s = build_space(Geometry::DistanceMatrix(vec![
            vec![0.0, 5.0],
            vec![5.0, 0.0],
        ]))
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.distance(1, 0), 5.0);
    }

    #[test]
    fn triangle_violation_reports_triple() {
        let err = build_space(Geometry::DistanceMatrix(vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ]))
        .unwrap_err();
        match err {
            Error::NonMetric { i, j, k, .. } => assert_eq!((i, j, k), (0, 2, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_matrices() {
        let asym = build_space(Geometry::DistanceMatrix(vec![
            vec![0.0, 1.0],
            vec![2.0, 0.0],
        ]));
        assert!(matches!(asym, Err(Error::NonMetric { .. })));
        let diag = build_space(Geometry::DistanceMatrix(vec![
            vec![1.0, 1.0],
            vec![1.0, 0.0],
        ]));
        assert!(matches!(diag, Err(Error::NonMetric { .. })));
        let neg = build_space(Geometry::DistanceMatrix(vec![
            vec![0.0, -1.0],
            vec![-1.0, 0.0],
        ]));
        assert!(matches!(neg, Err(Error::NonMetric { .. })));
        // within the 1e-9 slack
        let lossy = build_space(Geometry::DistanceMatrix(vec![
            vec![0.0, 1.0, 2.0 + 5e-10],
            vec![1.0, 0.0, 1.0],
            vec![2.0 + 5e-10, 1.0, 0.0],
        ]));
        assert!(lossy.is_ok());
        let zero = build_space(Geometry::DistanceMatrix(vec![
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        ]));
        assert!(matches!(zero, Err(Error::NonMetric { i: 0, j: 1, .. })));
    }

    #[test]
    fn rejects_repeated_points() {
        let dup = build_space(Geometry::Coordinates {
            points: vec![vec![1.0, 2.0], vec![0.0, 0.0], vec![1.0, 2.0]],
            norm: Norm::L2,
        });
        assert!(matches!(dup, Err(Error::NonMetric { i: 0, j: 2, .. })));
        let signed_zero = build_space(Geometry::Coordinates {
            points: vec![vec![0.0], vec![-0.0]],
            norm: Norm::L1,
        });
        assert!(signed_zero.is_err());
    }

    #[test]
    fn dyadic_membership_matches_integer_arithmetic() {
        // coordinates k/8 keep every l1 and sup distance exact in binary
        let mut rng = crate::rng::SplitMix64::new(7);
        let mut ks: Vec<[i64; 2]> = Vec::new();
        while ks.len() < 50 {
            let k = [rng.range(0, 63) as i64 - 32, rng.range(0, 63) as i64 - 32];
            if !ks.contains(&k) {
                ks.push(k);
            }
        }
        let points = ks
            .iter()
            .map(|k| k.iter().map(|&c| c as f64 / 8.0).collect())
            .collect::<Vec<_>>();
        for norm in [Norm::L1, Norm::Linf] {
            let space = build_space(Geometry::Coordinates {
                points: points.clone(),
                norm,
            })
            .unwrap();
            let int_dist = |a: [i64; 2], b: [i64; 2]| {
                let (dx, dy) = ((a[0] - b[0]).abs(), (a[1] - b[1]).abs());
                match norm {
                    Norm::L1 => dx + dy,
                    _ => dx.max(dy),
                }
            };
            for r8 in 1..=40i64 {
                let r = r8 as f64 / 8.0;
                for c in 0..50 {
                    for kind in BallKind::BOTH {
                        let expected: Vec<usize> = (0..50)
                            .filter(|&j| {
                                let d = int_dist(ks[c], ks[j]);
                                match kind {
                                    BallKind::Open => d < r8,
                                    BallKind::Closed => d <= r8,
                                }
                            })
                            .collect();
                        assert_eq!(
                            space.ball(c, r, kind).members,
                            expected,
                            "{norm:?} c={c} r={r} {kind}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn closed_and_open_balls_on_a_line() {
        let s = line3();
        assert_eq!(s.ball(1, 1.0, BallKind::Closed).members, vec![0, 1, 2]);
        assert_eq!(s.ball(1, 1.0, BallKind::Open).members, vec![1]);
    }

    #[test]
    fn square_vertices_are_isolated_at_unit_radius() {
        let s = build_space(Geometry::Coordinates {
            points: vec![
                vec![-1.0, -1.0],
                vec![-1.0, 1.0],
                vec![1.0, -1.0],
                vec![1.0, 1.0],
            ],
            norm: Norm::Linf,
        })
        .unwrap();
        assert_eq!(s.ball(3, 1.0, BallKind::Closed).members, vec![3]);
        for (a, b) in [(0, 1), (0, 3), (1, 2), (2, 3)] {
            assert_eq!(s.distance(a, b), 2.0);
        }
    }

    #[test]
    fn linf_and_l2_distances() {
        let s = build_space(Geometry::Coordinates {
            points: vec![vec![0.75, 0.75], vec![-0.75, 0.75]],
            norm: Norm::Linf,
        })
        .unwrap();
        assert_eq!(s.distance(0, 1), 1.5);
        let s = build_space(Geometry::Coordinates {
            points: vec![vec![0.0, 0.0], vec![3.0, 4.0]],
            norm: Norm::L2,
        })
        .unwrap();
        assert_eq!(s.distance(0, 1), 5.0);
    }

    #[test]
    fn uncached_queries_match_cached() {
        let points: Vec<Vec<f64>> = (0..300)
            .map(|i| {
                vec![
                    ((i * 37) % 101) as f64 * 0.125,
                    ((i * 53) % 89) as f64 * 0.25,
                ]
            })
            .collect();
        let cached = build_space(Geometry::Coordinates {
            points: points.clone(),
            norm: Norm::L2,
        })
        .unwrap();
        let uncached = MetricSpace::with_config(
            Geometry::Coordinates {
                points,
                norm: Norm::L2,
            },
            SpaceConfig {
                cache_max_points: 0,
            },
        )
        .unwrap();
        for c in [0, 17, 150, 299] {
            for r in [0.1, 1.0, 2.5, 7.0, 40.0] {
                for kind in BallKind::BOTH {
                    assert_eq!(cached.ball(c, r, kind), uncached.ball(c, r, kind));
                }
            }
        }
        let all: Vec<usize> = (0..300).collect();
        assert_eq!(
            cached.min_positive_distance(&all),
            uncached.min_positive_distance(&all)
        );
    }

    #[test]
    fn distinct_distances_are_sorted_and_unique() {
        let s = line3();
        assert_eq!(s.distinct_distances(None), vec![1.0, 2.0]);
        assert_eq!(s.distinct_distances(Some(&[0, 2])), vec![2.0]);
        assert_eq!(s.min_positive_distance(&[0, 1, 2]), Some(1.0));
        assert_eq!(s.min_positive_distance(&[1]), None);
        assert_eq!(s.diameter(&[0, 1, 2]), 2.0);
    }

    #[test]
    #[should_panic(expected = "positive")]
    fn zero_radius_panics() {
        line3().ball(0, 0.0, BallKind::Closed);
    }
}
