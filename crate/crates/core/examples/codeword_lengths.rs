//! Minimal codeword lengths for joint decoding on a MAC and for successive
//! decoding on a two-receiver degraded broadcast channel.

use schedcomm::channel::{DegradedBroadcastSpec, DiscreteMac, Dmc, InputDistribution};
use schedcomm::codelen::{min_codeword_length_dbc, DbcOptions, MacExponents, MessageClass};
use schedcomm::exponents::RhoParam;
use schedcomm::sched::{enumerate_schedules, Schedule};
use schedcomm::Result;

fn main() -> Result<()> {
    let rho = RhoParam::new(0.5)?;
    let classes = vec![MessageClass::new(4, 0.01)?; 2];

    let adder = DiscreteMac::binary_adder(2);
    let q = InputDistribution::uniform(&[2, 2]);
    let e = MacExponents::new(&adder, &q, rho)?;
    println!("binary adder MAC, M = 4, p_e = 0.01");
    for s in enumerate_schedules(2, 3)?.nonempty() {
        let n = e.min_length(&classes, s, rho)?;
        println!("  N{s} = {:>4}  bracket [{}, {}]", n.n, n.lower, n.upper);
    }

    let dbc = DegradedBroadcastSpec::new(
        Dmc::bsc(0.05)?,
        vec![Dmc::bsc(0.1)?],
        vec![Dmc::bsc(0.2)?],
        vec![0.5, 0.5],
    )?;
    println!("degraded broadcast, BSC hops 0.05 then 0.1");
    for null_message in [false, true] {
        let s = Schedule::new(vec![1, 1]);
        let n = min_codeword_length_dbc(&dbc, &classes, &s, rho, DbcOptions { null_message })?;
        let per: Vec<u64> = n.per_receiver.iter().flatten().map(|c| c.n).collect();
        println!(
            "  null message {null_message}: N(1,1) = {}, per receiver {per:?}",
            n.n
        );
    }
    Ok(())
}
