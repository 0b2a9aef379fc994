//! Building spaces from coordinates or a distance matrix and querying balls.

use mmslab::metric::{build_space, BallKind, Geometry, Norm};

fn main() -> mmslab::Result<()> {
    let line = build_space(Geometry::Coordinates {
        points: vec![vec![0.0], vec![1.0], vec![2.0]],
        norm: Norm::L2,
    })?;
    for kind in BallKind::BOTH {
        println!(
            "{kind:>6} ball of radius 1 at point 1: {:?}",
            line.ball(1, 1.0, kind).members
        );
    }

    // a four-cycle with its graph metric
    let cycle = build_space(Geometry::DistanceMatrix(vec![
        vec![0.0, 1.0, 2.0, 1.0],
        vec![1.0, 0.0, 1.0, 2.0],
        vec![2.0, 1.0, 0.0, 1.0],
        vec![1.0, 2.0, 1.0, 0.0],
    ]))?;
    println!(
        "cycle distances: {:?}, diameter {}",
        cycle.distinct_distances(None),
        cycle.diameter(&[0, 1, 2, 3])
    );

    let broken = build_space(Geometry::DistanceMatrix(vec![
        vec![0.0, 1.0, 3.0],
        vec![1.0, 0.0, 1.0],
        vec![3.0, 1.0, 0.0],
    ]));
    match broken {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("the triangle inequality fails"),
    }
    Ok(())
}
