//! Scan radii and print the CSV table the command line produces.

use mmslab::constructions::gen_sharpness;
use mmslab::experiments::{scan, write_scan_csv, ScanOptions};
use mmslab::metric::BallKind;

fn main() -> mmslab::Result<()> {
    let inst = gen_sharpness(2, 8)?;
    let radii = [0.5, 0.75, 1.0, 1.5, 3.0];
    let rows = scan(
        &inst.space,
        &inst.measure,
        &radii,
        &BallKind::BOTH,
        &[2.0],
        &ScanOptions::default(),
    )?;
    write_scan_csv(std::io::stdout().lock(), &rows)?;
    Ok(())
}
