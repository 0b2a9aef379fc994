//! Ball averages of a smooth function on a Gaussian sample approach the
//! function as the radius shrinks, and equal it once balls are singletons.

use mmslab::constructions::{sample_instance, Generator};
use mmslab::experiments::{convergence_experiment, dyadic_radii, FunctionSpec};
use mmslab::metric::BallKind;

fn main() -> mmslab::Result<()> {
    let inst = sample_instance(Generator::Gaussian { dim: 2 }, 2000, 1)?;
    let f = FunctionSpec::GaussianBump.evaluate(&inst.space)?;
    let rep = convergence_experiment(
        &inst.space,
        &inst.measure,
        &f,
        1.0,
        &dyadic_radii(16),
        BallKind::Closed,
        None,
    )?;
    println!("minimum gap {:?}", rep.min_gap);
    for row in &rep.rows {
        println!(
            "r = {:<12.6e} error {:<12.6e} ||A_r||_1 = {:.4}",
            row.radius, row.error, row.l1_norm
        );
    }
    println!("largest norm along the way: {:.4}", rep.sup_l1_norm);
    Ok(())
}
