//! Clusters of cube vertices around a light center push the closed-ball
//! average towards the 2^d bound without reaching it.

use mmslab::constructions::{gen_sharpness, sharpness_report};

fn main() -> mmslab::Result<()> {
    for d in 1..=3 {
        let inst = gen_sharpness(d, 32)?;
        let rep = sharpness_report(&inst)?;
        println!(
            "d={d}: {} points, ||A||_1 = {:.6} (bound {})",
            inst.space.len(),
            rep.operator_norm,
            1 << d
        );
        for row in rep.rows.iter().filter(|r| [1, 2, 8, 32].contains(&r.n)) {
            println!(
                "   n={:>2}: ||A f_n||_1 = {:.6} > {:.6}, margin {:.2e}",
                row.n, row.value, row.threshold, row.margin
            );
        }
    }
    Ok(())
}
