//! Stability thresholds as the number of slots K grows, at low and high SNR.

use std::path::Path;

use schedcomm::qsim::SimConfig;
use schedcomm::scenario::{sweep_rows, Scenario};
use schedcomm::Result;

fn main() -> Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for name in ["sweep_snr_low.json", "sweep_snr_high.json"] {
        let mut sc = Scenario::load(&dir.join(name))?;
        if let Some(sw) = sc.sweep.as_mut() {
            sw.simulate = false;
        }
        println!("{name}");
        for row in sweep_rows(&sc, &SimConfig::default())? {
            println!(
                "  K = {:>2}: inner {:.5}, outer {:.5}, nats {:.5}",
                row.axis, row.inner_threshold, row.outer_threshold, row.nat_inner_threshold
            );
        }
    }
    Ok(())
}
