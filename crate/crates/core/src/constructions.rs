//! Extremal and sampled instances.
//!
//! [`gen_sharpness`] builds, for `n = 1..N`, a cluster centered at `3n e_1`
//! carrying mass `1/n`, surrounded by the `2^d` vertices of `[-3/4, 3/4]^d`
//! translated by `3n e_1`, each of unit mass, all under the sup norm. Closed
//! unit balls never reach across clusters, and the `L^1` norm of the closed
//! unit averaging operator climbs towards `2^d` as `N` grows. Coordinates are
//! dyadic, so every distance in the construction is exact.

use serde::{Deserialize, Serialize};

use crate::averaging::{build_operator, l1_operator_norm};
use crate::error::{Error, Result};
use crate::measure::{lp_norm, DiscreteMeasure, FunctionOnSpace};
use crate::metric::{build_space, BallKind, Geometry, MetricSpace, Norm};
use crate::rng::SplitMix64;

pub const MAX_DIMENSION: usize = 10;

/// Largest number of points [`gen_sharpness`] will produce.
pub const SHARPNESS_MAX_POINTS: usize = 200_000;

#[derive(Clone, Debug)]
pub struct SharpnessInstance {
    pub dim: usize,
    pub clusters: usize,
    pub space: MetricSpace,
    pub measure: DiscreteMeasure,
    /// `centers[n - 1]` is the id of `3n e_1`.
    pub centers: Vec<usize>,
    /// `vertices[n - 1]` are the ids of the translated cube vertices of cluster `n`.
    pub vertices: Vec<Vec<usize>>,
}

impl SharpnessInstance {
    /// `f_n = n 1_{3n e_1}`, which has unit `L^1` norm.
    pub fn test_function(&self, n: usize) -> FunctionOnSpace {
        assert!((1..=self.clusters).contains(&n), "cluster {n} out of range");
        FunctionOnSpace::indicator(self.space.len(), self.centers[n - 1], n as f64)
    }
}

/// Vertex `bits` of `[-h, h]^d`: coordinate `i` is `+h` when bit `i` is set.
fn cube_vertex(d: usize, bits: usize, h: f64) -> Vec<f64> {
    (0..d)
        .map(|i| if bits >> i & 1 == 1 { h } else { -h })
        .collect()
}

pub fn gen_sharpness(d: usize, clusters: usize) -> Result<SharpnessInstance> {
    if d == 0 || clusters == 0 {
        return Err(Error::InvalidInput(
            "dimension and cluster count must be positive".into(),
        ));
    }
    if d > MAX_DIMENSION {
        return Err(Error::TooLarge(format!(
            "dimension {d} exceeds {MAX_DIMENSION}"
        )));
    }
    let per_cluster = (1usize << d) + 1;
    if per_cluster.saturating_mul(clusters) > SHARPNESS_MAX_POINTS {
        return Err(Error::TooLarge(format!(
            "{} points exceed the cap of {SHARPNESS_MAX_POINTS}",
            per_cluster.saturating_mul(clusters)
        )));
    }
    let mut points = Vec::with_capacity(per_cluster * clusters);
    let mut weights = Vec::with_capacity(per_cluster * clusters);
    let mut centers = Vec::with_capacity(clusters);
    let mut vertices = Vec::with_capacity(clusters);
    for n in 1..=clusters {
        let shift = 3.0 * n as f64;
        let mut center = vec![0.0; d];
        center[0] = shift;
        centers.push(points.len());
        points.push(center);
        weights.push(1.0 / n as f64);
        let mut ids = Vec::with_capacity(1 << d);
        for bits in 0..1usize << d {
            let mut v = cube_vertex(d, bits, 0.75);
            v[0] += shift;
            ids.push(points.len());
            points.push(v);
            weights.push(1.0);
        }
        vertices.push(ids);
    }
    Ok(SharpnessInstance {
        dim: d,
        clusters,
        space: build_space(Geometry::Coordinates {
            points,
            norm: Norm::Linf,
        })?,
        measure: DiscreteMeasure::new(weights)?,
        centers,
        vertices,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterRow {
    pub n: usize,
    /// `||A f_n||_1` with `A` the closed unit averaging operator.
    pub value: f64,
    /// `2^d n / (n + 1)`.
    pub threshold: f64,
    /// `value - threshold`.
    pub margin: f64,
    /// `(1/n) / (1/n + 2^d)`, the margin in exact arithmetic.
    pub exact_margin: f64,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub dim: usize,
    pub clusters: usize,
    pub rows: Vec<ClusterRow>,
    pub operator_norm: f64,
    /// `2^d - operator_norm`.
    pub gap: f64,
}

impl SharpnessReport {
    pub fn all_strict(&self) -> bool {
        self.rows.iter().all(|r| r.strict)
    }
}

pub fn sharpness_report(instance: &SharpnessInstance) -> Result<SharpnessReport> {
    let op = build_operator(&instance.space, &instance.measure, 1.0, BallKind::Closed)?;
    let cube = (1u64 << instance.dim) as f64;
    let mut rows = Vec::with_capacity(instance.clusters);
    for n in 1..=instance.clusters {
        let image = op.apply(&instance.test_function(n))?;
        let value = lp_norm(&instance.measure, &image, 1.0)?;
        let nf = n as f64;
        let threshold = cube * nf / (nf + 1.0);
        rows.push(ClusterRow {
            n,
            value,
            threshold,
            margin: value - threshold,
            exact_margin: nf.recip() / (nf.recip() + cube),
            strict: value > threshold,
        });
    }
    let operator_norm = l1_operator_norm(&op);
    Ok(SharpnessReport {
        dim: instance.dim,
        clusters: instance.clusters,
        rows,
        operator_norm,
        gap: cube - operator_norm,
    })
}

/// The `2^d` vertices of `[-h, h]^d` followed by the origin, under the sup norm.
pub fn gen_cube_vertices(d: usize, half_width: f64) -> Result<MetricSpace> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if d > MAX_DIMENSION {
        return Err(Error::TooLarge(format!(
            "dimension {d} exceeds {MAX_DIMENSION}"
        )));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "half width must be positive, got {half_width}"
        )));
    }
    let mut points: Vec<Vec<f64>> = (0..1usize << d)
        .map(|b| cube_vertex(d, b, half_width))
        .collect();
    points.push(vec![0.0; d]);
    build_space(Geometry::Coordinates {
        points,
        norm: Norm::Linf,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Standard normal in `R^d` under the Euclidean norm.
    Gaussian { dim: usize },
    /// Rate-1 exponential on `[0, inf)`.
    Exponential1d,
}

#[derive(Clone, Debug)]
pub struct SampledInstance {
    pub generator: Generator,
    pub size: usize,
    pub seed: u64,
    pub space: MetricSpace,
    pub measure: DiscreteMeasure,
}

/// Empirical measure of `size` draws, each with weight `1/size`.
pub fn sample_instance(generator: Generator, size: usize, seed: u64) -> Result<SampledInstance> {
    if size == 0 {
        return Err(Error::InvalidInput("sample size must be positive".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let points: Vec<Vec<f64>> = match generator {
        Generator::Gaussian { dim } => {
            if dim == 0 {
                return Err(Error::InvalidInput("dimension must be positive".into()));
            }
            (0..size)
                .map(|_| (0..dim).map(|_| rng.standard_normal()).collect())
                .collect()
        }
        Generator::Exponential1d => (0..size).map(|_| vec![rng.exponential()]).collect(),
    };
    Ok(SampledInstance {
        generator,
        size,
        seed,
        space: build_space(Geometry::Coordinates {
            points,
            norm: Norm::L2,
        })?,
        measure: DiscreteMeasure::uniform(size)?,
    })
}
