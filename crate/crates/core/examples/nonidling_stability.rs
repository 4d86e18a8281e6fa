//! Independent decoding on a Gaussian MAC: inner and transience bounds of
//! the non-idling policy checked against simulation.

use schedcomm::channel::GaussianMacSpec;
use schedcomm::codelen::{service_requirement, MessageClass};
use schedcomm::exponents::{e0_gaussian_quantum, RhoParam};
use schedcomm::qsim::{ArrivalModel, SimConfig, Simulator};
use schedcomm::regions::{nonidling_inner_bounds, nonidling_transience_bound, Quanta};
use schedcomm::sched::{enumerate_schedules, Policy, PolicySpec, TieBreak};
use schedcomm::Result;

fn main() -> Result<()> {
    let rho = RhoParam::new(1.0)?;
    let spec = GaussianMacSpec::new(vec![1.0, 2.0])?;
    let k = 2;
    let classes = vec![MessageClass::new(4, 1e-3)?; 2];
    let req: Vec<f64> = classes
        .iter()
        .map(|c| service_requirement(c, rho).value())
        .collect();
    let space = enumerate_schedules(2, k)?;
    let quanta = Quanta::gaussian(&spec, space.clone(), rho)?;

    let d = [0.5, 0.5];
    let inner = nonidling_inner_bounds(&req, &quanta)?.threshold(&d);
    let outer = nonidling_transience_bound(&req, &quanta, &[0, 1])?.threshold(&d);
    println!("direction {d:?}: stable below {inner:.5}, transient above {outer:.5}");

    for scale in [0.9 * inner, 1.2 * outer] {
        let ea: Vec<f64> = d.iter().map(|x| x * scale).collect();
        let policy = Policy::new(PolicySpec::non_idling(TieBreak::Renormalize), &space, |s| {
            quanta.offered(s, None)
        })?;
        let sim = Simulator::independent(
            policy,
            space.clone(),
            req.clone(),
            |s, j| e0_gaussian_quantum(&spec, s, j, rho),
            ArrivalModel::poisson(&ea),
        )?;
        let report = sim.run(&SimConfig::default())?;
        println!(
            "  EA = {ea:.5?}: {} stable, {} unstable, {} inconclusive",
            report.stable, report.unstable, report.inconclusive
        );
    }
    Ok(())
}
