//! Joint decoding on the binary adder MAC: test a rate point against the
//! stability region, synthesize a state-independent policy for it, and
//! simulate the subclass system.

use schedcomm::channel::{DiscreteMac, InputDistribution};
use schedcomm::codelen::{length_table, MacExponents, MessageClass};
use schedcomm::exponents::RhoParam;
use schedcomm::qsim::{ArrivalModel, Mode, SimConfig, Simulator};
use schedcomm::regions::{outer_membership, rate_vectors_joint, synthesize_policy};
use schedcomm::sched::{enumerate_schedules, Policy, PolicySpec};
use schedcomm::Result;

fn main() -> Result<()> {
    let rho = RhoParam::new(0.5)?;
    let classes = vec![MessageClass::new(4, 0.01)?; 2];
    let e = MacExponents::new(
        &DiscreteMac::binary_adder(2),
        &InputDistribution::uniform(&[2, 2]),
        rho,
    )?;
    let space = enumerate_schedules(2, 3)?;
    let lengths = length_table(&space, |s| Ok(e.min_length(&classes, s, rho)?.n))?;
    let gens = rate_vectors_joint(&space, &lengths)?;

    let ea = [0.02, 0.015];
    let rows: Vec<Vec<f64>> = gens.iter().map(|g| g.r.clone()).collect();
    let m = outer_membership(&ea, &rows)?;
    println!(
        "EA = {ea:?}: inside = {}, lambda = {:.3}",
        m.inside, m.lambda
    );

    let synth = synthesize_policy(&ea, &gens)?;
    println!("policy:");
    for w in synth.p.entries() {
        println!("  p{} = {:.4}", w.s, w.w);
    }
    println!("slack per class: {:.3?}", synth.slack);

    let support_lengths: Vec<u32> = synth
        .p
        .entries()
        .iter()
        .map(|w| lengths[space.index_of(&w.s).expect("in space")].expect("non-empty") as u32)
        .collect();
    let policy = Policy::new(PolicySpec::subclass(synth.p.clone()), &space, |_| 0.0)?;
    let sim = Simulator::subclass(
        Mode::Joint,
        policy,
        3,
        support_lengths,
        ArrivalModel::poisson(&ea).with_split(synth.split.clone()),
    )?;
    let report = sim.run(&SimConfig::default())?;
    println!("simulation verdict: {:?}", report.verdict());
    Ok(())
}
