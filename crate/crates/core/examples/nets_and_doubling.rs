//! Exact net constants and greedy doubling bounds.

use mmslab::constructions::gen_cube_vertices;
use mmslab::metric::BallKind;
use mmslab::nets::{
    doubling_upper_bound_with_net, max_net_in_ball, net_constant_m, NetKind, DEFAULT_EXHAUSTIVE_CAP,
};

fn main() -> mmslab::Result<()> {
    for d in 1..=3 {
        // vertices of [-1, 1]^d plus the origin under the sup norm
        let cube = gen_cube_vertices(d, 1.0)?;
        let origin = cube.len() - 1;
        let net = max_net_in_ball(
            &cube,
            origin,
            1.0,
            BallKind::Closed,
            NetKind::Strict,
            DEFAULT_EXHAUSTIVE_CAP,
        );
        println!(
            "d={d}: largest 1-net in the closed unit ball at the origin has {} points",
            net.cardinality
        );
        for kind in BallKind::BOTH {
            let m = net_constant_m(&cube, kind, None, DEFAULT_EXHAUSTIVE_CAP);
            let doubling = doubling_upper_bound_with_net(&cube, kind, &m);
            println!(
                "      {kind:>6} balls: M = {} (exact: {}, radius {}), doubling constant in [{}, {}]",
                m.cardinality, m.exact, m.radius, doubling.lower_bound, doubling.upper_bound
            );
        }
    }
    Ok(())
}
