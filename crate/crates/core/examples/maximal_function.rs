//! The centered maximal function over a grid of radii.

use mmslab::averaging::{maximal_function, radii_grid};
use mmslab::measure::{lp_norm, DiscreteMeasure, FunctionOnSpace};
use mmslab::metric::{build_space, BallKind, Geometry, Norm};

fn main() -> mmslab::Result<()> {
    let points: Vec<Vec<f64>> = (0..12).map(|i| vec![(i * i) as f64 / 10.0]).collect();
    let space = build_space(Geometry::Coordinates {
        points,
        norm: Norm::L2,
    })?;
    let measure = DiscreteMeasure::uniform(space.len())?;
    let f = FunctionOnSpace::indicator(space.len(), 5, 1.0);
    let radii = radii_grid(&space, &measure);
    let mf = maximal_function(&space, &measure, &f, &radii, BallKind::Closed)?;
    for (x, v) in mf.values().iter().enumerate() {
        println!("Mf({x:>2}) = {v:.4}");
    }
    println!(
        "||f||_1 = {:.4}, ||Mf||_1 = {:.4}",
        lp_norm(&measure, &f, 1.0)?,
        lp_norm(&measure, &mf, 1.0)?
    );
    Ok(())
}
