//! The greedy minimal-measure selection that bounds a_s(y) by a net size.

use mmslab::averaging::{
    audit_greedy_selection, build_operator, greedy_min_measure_selection, verify_net_bound,
};
use mmslab::experiments::random_instance;
use mmslab::metric::BallKind;
use mmslab::nets::{net_constant_m, DEFAULT_EXHAUSTIVE_CAP};

fn main() -> mmslab::Result<()> {
    let (space, measure) = random_instance(11, 16, 2);
    let kind = BallKind::Closed;
    let s = space.distinct_distances(None)[space.distinct_distances(None).len() / 3];
    let a = build_operator(&space, &measure, s, kind)?.conjugate();
    let net = net_constant_m(&space, kind, None, DEFAULT_EXHAUSTIVE_CAP);
    println!(
        "{} points, s = {s:.4}, M = {} (exact: {})",
        space.len(),
        net.cardinality,
        net.exact
    );

    for y in measure.support().into_iter().take(5) {
        let sel = greedy_min_measure_selection(&space, &measure, y, s, kind, 0.1)?;
        let audit = audit_greedy_selection(&space, &measure, &sel);
        println!(
            "y={y:>2}: a_s(y) = {:.4} <= 1.1 * {} ; picks {:?}, audit {}",
            a.values[y],
            sel.m(),
            sel.selected,
            if audit.passed() { "ok" } else { "FAILED" }
        );
    }

    let report = verify_net_bound(&space, &measure, s, kind, &[0.5, 0.1, 0.01], &net)?;
    println!(
        "norm {:.4} <= M = {}: {} ({} anchors checked)",
        report.norm,
        report.net_constant,
        report.passed(),
        report.anchors_checked
    );
    Ok(())
}
