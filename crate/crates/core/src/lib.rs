//! Averaging operators on finite metric measure spaces.
//!
//! The crate computes the averaging operators `A_s f(x) = mu(B(x,s))^{-1}
//! sum_{y in B(x,s)} f(y) mu(y)`, their exact `L^1 -> L^1` norms via the
//! conjugate function, the net constant `M` and doubling-constant bounds, and
//! checks the bound `||A_s||_1 <= M` together with its greedy certificate.
//!
//! - [`metric`]: finite metric spaces, open and closed balls
//! - [`measure`]: discrete measures, functions, weighted `L^p` norms
//! - [`nets`]: maximum r-nets, net constant, doubling bounds
//! - [`averaging`]: operators, conjugate function, norm certificates,
//!   comparability constant, maximal function
//! - [`constructions`]: the cube-vertex cluster family and sampled instances
//! - [`experiments`]: radius scans, convergence runs, the verification suite
//! - [`io`]: JSON and CSV formats
//!
//! ```
//! use mmslab::prelude::*;
//!
//! let space = build_space(Geometry::Coordinates {
//!     points: vec![vec![0.0], vec![1.0], vec![2.0]],
//!     norm: Norm::L2,
//! })?;
//! let measure = DiscreteMeasure::new(vec![1.0; 3])?;
//! let op = build_operator(&space, &measure, 1.0, BallKind::Closed)?;
//! assert!((l1_operator_norm(&op) - 4.0 / 3.0).abs() < 1e-15);
//! # Ok::<(), mmslab::Error>(())
//! ```

pub mod averaging;
pub mod cli;
pub mod constructions;
mod error;
pub mod experiments;
pub mod io;
pub mod measure;
pub mod metric;
pub mod nets;
pub mod rng;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::averaging::{
        apply, audit_greedy_selection, build_operator, conjugate_function,
        greedy_min_measure_selection, l1_norm_bruteforce_oracle, l1_operator_norm,
        local_comparability_constant, lp_bound_check, maximal_function, radii_grid,
        verify_net_bound, AveragingOperator, ConjugateFunction, GreedySelection,
    };
    pub use crate::constructions::{
        gen_cube_vertices, gen_sharpness, sample_instance, Generator, SharpnessInstance,
    };
    pub use crate::measure::{
        lp_norm, mu_ball, restrict_to_support, DiscreteMeasure, FunctionOnSpace,
    };
    pub use crate::metric::{build_space, BallKind, Geometry, MetricSpace, Norm};
    pub use crate::nets::{
        doubling_upper_bound, max_net_in_ball, net_constant_m, NetKind, NetStats,
    };
    pub use crate::{Error, Result};
}
