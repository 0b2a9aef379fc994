//! Local comparability of ball masses implies a norm bound, but bounded norms
//! do not need it: on the cluster family the constant keeps growing.

use mmslab::averaging::{build_operator, l1_operator_norm, local_comparability_constant};
use mmslab::constructions::gen_sharpness;
use mmslab::experiments::random_instance;
use mmslab::metric::BallKind;

fn main() -> mmslab::Result<()> {
    let (space, measure) = random_instance(3, 25, 2);
    let rep = local_comparability_constant(&space, &measure, BallKind::Open)?;
    println!(
        "random instance: C = {:.4} at {:?}, largest norm over radii {:.4}",
        rep.constant, rep.witness, rep.max_norm_over_grid
    );

    for clusters in [2, 4, 16, 64, 256] {
        let inst = gen_sharpness(2, clusters)?;
        let c =
            local_comparability_constant(&inst.space, &inst.measure, BallKind::Closed)?.constant;
        let norm = l1_operator_norm(&build_operator(
            &inst.space,
            &inst.measure,
            1.0,
            BallKind::Closed,
        )?);
        println!("{clusters:>3} clusters: C = {c:.6}, ||A_1||_1 = {norm:.6}");
    }
    Ok(())
}
