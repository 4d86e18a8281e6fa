//! Queueing cases with closed-form answers.

use schedcomm::qsim::{
    sojourn_stats, ArrivalModel, BatchLaw, SimConfig, Simulator, StabilityLabel,
};
use schedcomm::sched::{enumerate_schedules, Policy, PolicySpec, TieBreak};

/// One class, one server, every message needs `slots` slots of service.
fn single_server(slots: u32, arrivals: ArrivalModel) -> Simulator {
    let space = enumerate_schedules(1, 1).unwrap();
    let policy = Policy::new(
        PolicySpec::non_idling(TieBreak::Renormalize),
        &space,
        |_| 1.0,
    )
    .unwrap();
    // A requirement just under `slots` quanta of size 1.
    let req = slots as f64 - 0.5;
    Simulator::independent(policy, space, vec![req], |_, _| Ok(1.0), arrivals).unwrap()
}

/// Discrete-time M/D/1: Poisson(λ) batches each slot, deterministic service
/// of `D` slots. With `ρ = λD` the mean wait is
/// `(ρ − 2ρ² + D²(λ + λ²)) / (2(1 − ρ))` and the mean sojourn adds
/// `D + Dλ/2 − ρ`, where the last two terms place arrivals within the slot.
fn md1_mean_sojourn(lambda: f64, d: f64) -> f64 {
    let rho = lambda * d;
    let wait = (rho - 2.0 * rho * rho + d * d * (lambda + lambda * lambda)) / (2.0 * (1.0 - rho));
    wait - rho + d * lambda / 2.0 + d
}

#[test]
fn poisson_batches_match_md1() {
    let (lambda, d) = (0.2, 3);
    let expected = md1_mean_sojourn(lambda, d as f64);
    assert!((expected - 5.25).abs() < 1e-12);
    let sim = single_server(d, ArrivalModel::poisson(&[lambda]));
    let report = sim
        .run(&SimConfig {
            horizon: 200_000,
            replications: 4,
            seed: 7,
        })
        .unwrap();
    assert_eq!(report.verdict(), StabilityLabel::Stable);
    let stats = sojourn_stats(&report)[0].stats.clone().unwrap();
    let rel = (stats.mean - expected).abs() / expected;
    assert!(rel < 0.03, "mean sojourn {} vs {expected}", stats.mean);
}

#[test]
fn periodic_arrivals_never_wait() {
    for (period, d) in [(3u64, 3u32), (5, 2), (7, 7)] {
        let law = BatchLaw::Cycle { period, batch: 1 };
        let sim = single_server(d, ArrivalModel::new(vec![law]));
        let report = sim
            .run(&SimConfig {
                horizon: 10_000,
                replications: 1,
                seed: 1,
            })
            .unwrap();
        let soj = &report.replications[0].sojourns[0];
        assert!(soj.len() > 1000);
        assert!(
            soj.iter().all(|&x| x == d as u64),
            "period {period} length {d}"
        );
    }
}

#[test]
fn overload_grows_without_bound() {
    let sim = single_server(4, ArrivalModel::poisson(&[0.5]));
    let report = sim
        .run(&SimConfig {
            horizon: 50_000,
            replications: 2,
            seed: 3,
        })
        .unwrap();
    assert_eq!(report.verdict(), StabilityLabel::Unstable);
    let last = *report.replications[0].total_messages.last().unwrap() as f64;
    // Net drift is λ − 1/D = 0.25 messages per slot.
    assert!((last / 50_000.0 - 0.25).abs() < 0.02, "backlog {last}");
}
