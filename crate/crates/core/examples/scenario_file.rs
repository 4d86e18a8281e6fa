//! Drive the whole pipeline from a scenario file, as the command line does.

use std::path::PathBuf;

use schedcomm::qsim::SimConfig;
use schedcomm::scenario::{cmd_codelen, cmd_region, cmd_simulate, Scenario};
use schedcomm::Result;

fn main() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/adder_joint.json")
        });
    let sc = Scenario::load(&path)?;
    println!("codelen: {}", cmd_codelen(&sc)?);
    println!("region: {}", cmd_region(&sc)?);
    let cfg = SimConfig {
        horizon: 50_000,
        replications: 4,
        seed: 1,
    };
    println!("simulate: {}", cmd_simulate(&sc, &cfg)?.json);
    Ok(())
}
