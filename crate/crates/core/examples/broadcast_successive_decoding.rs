//! Successive decoding on a degraded broadcast channel: exponent ladder,
//! achievable rates and the schedule region.

use schedcomm::channel::{dbc_rate_constraints, DegradedBroadcastSpec, Dmc};
use schedcomm::codelen::{length_table, DbcExponents, DbcOptions, MessageClass};
use schedcomm::exponents::RhoParam;
use schedcomm::regions::{outer_membership, rate_vectors_joint};
use schedcomm::sched::enumerate_schedules;
use schedcomm::Result;

fn main() -> Result<()> {
    let spec = DegradedBroadcastSpec::new(
        Dmc::bsc(0.05)?,
        vec![Dmc::bsc(0.1)?],
        vec![Dmc::bsc(0.2)?],
        vec![0.5, 0.5],
    )?;
    let rho = RhoParam::new(0.5)?;
    let e = DbcExponents::new(&spec, rho)?;
    for j in 0..2 {
        for k in j..2 {
            println!(
                "E0 level {} at receiver {}: {:.6}",
                k + 1,
                j + 1,
                e.get(k, j)
            );
        }
    }
    let rates = dbc_rate_constraints(&spec)?;
    println!("rate region: {rates:?}");

    let classes = vec![MessageClass::new(2, 0.01)?; 2];
    let space = enumerate_schedules(2, 2)?;
    let lengths = length_table(&space, |s| {
        Ok(e.min_lengths(&classes, s, rho, DbcOptions::default())?.n)
    })?;
    let gens: Vec<Vec<f64>> = rate_vectors_joint(&space, &lengths)?
        .into_iter()
        .map(|g| g.r)
        .collect();
    for ea in [[0.005, 0.005], [0.02, 0.02]] {
        let m = outer_membership(&ea, &gens)?;
        println!(
            "EA = {ea:?}: inside = {}, lambda = {:.3}",
            m.inside, m.lambda
        );
    }
    Ok(())
}
