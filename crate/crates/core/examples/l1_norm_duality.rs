//! The L1 operator norm of a ball average equals the sup of its conjugate
//! function, and a one-point-at-a-time oracle agrees.

use mmslab::averaging::{build_operator, l1_norm_bruteforce_oracle};
use mmslab::experiments::{random_instance, spread_radii};
use mmslab::metric::BallKind;

fn main() -> mmslab::Result<()> {
    for seed in 0..5 {
        let (space, measure) = random_instance(seed, 30, 3);
        for s in spread_radii(&space, 3) {
            let op = build_operator(&space, &measure, s, BallKind::Closed)?;
            let (argmax, norm) = op.conjugate().sup();
            let oracle = l1_norm_bruteforce_oracle(&op)?;
            println!(
                "seed {seed} n={:>2} s={s:.4}: sup a_s = {norm:.12} at {argmax:>2}, oracle {oracle:.12}",
                space.len()
            );
        }
    }
    Ok(())
}
