//! Discrete measures, ball masses and weighted Lp norms.

use mmslab::measure::{lp_norm, mu_ball, DiscreteMeasure, FunctionOnSpace};
use mmslab::metric::{build_space, BallKind, Geometry, Norm};

fn main() -> mmslab::Result<()> {
    let space = build_space(Geometry::Coordinates {
        points: vec![vec![0.0], vec![1.0], vec![2.0], vec![5.0]],
        norm: Norm::L1,
    })?;
    // the last point carries no mass and is outside the support
    let measure = DiscreteMeasure::new(vec![1.0, 2.0, 1.0, 0.0])?;
    println!(
        "support {:?}, total mass {}",
        measure.support(),
        measure.total()
    );
    println!(
        "mass of B(1, 1]: {}",
        mu_ball(&measure, &space.ball(1, 1.0, BallKind::Closed))
    );

    let f = FunctionOnSpace::new(vec![3.0, -1.0, 0.5, 100.0])?;
    for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
        println!("||f||_{p} = {:.6}", lp_norm(&measure, &f, p)?);
    }
    Ok(())
}
