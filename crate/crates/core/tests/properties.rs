mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schedcomm::channel::{
    mutual_information, DiscreteMac, Dmc, GaussianMacSpec, InputDistribution,
};
use schedcomm::codelen::{service_requirement, union_bound, MacExponents, MessageClass};
use schedcomm::exponents::{e0_single, RhoParam};
use schedcomm::qsim::{ArrivalModel, Mode, SimRng, Simulator, SystemState};
use schedcomm::regions::{
    nonidling_inner_bounds, nonidling_transience_bound, outer_membership, padded_rate_vectors,
    rate_vectors_independent, state_independent_region, Quanta,
};
use schedcomm::sched::{
    enumerate_schedules, induced_distribution, Policy, PolicySpec, Schedule, ScheduleDistribution,
    TieBreak,
};

fn rho(v: f64) -> RhoParam {
    RhoParam::new(v).unwrap()
}

fn dmc_strategy(max: usize) -> impl Strategy<Value = (Dmc, Vec<f64>)> {
    (2..=max, 2..=max, any::<u64>()).prop_map(|(nx, ny, seed)| {
        let mut rng = common::rng(seed);
        let ch = common::random_dmc(&mut rng, nx, ny);
        let q = common::simplex(&mut rng, nx);
        (ch, q)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponent_between_zero_and_rho_times_mi((ch, q) in dmc_strategy(4), r in 0.01f64..=1.0) {
        let e = e0_single(&ch, &q, rho(r)).unwrap();
        let mi = mutual_information(&ch, &q).unwrap();
        prop_assert!(e >= 0.0);
        prop_assert!(e <= r * mi + 1e-12);
    }

    #[test]
    fn exponent_increasing_and_ratio_decreasing((ch, q) in dmc_strategy(4), a in 0.01f64..1.0, b in 0.01f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (el, eh) = (e0_single(&ch, &q, rho(lo)).unwrap(), e0_single(&ch, &q, rho(hi)).unwrap());
        prop_assert!(eh >= el - 1e-12);
        prop_assert!(eh / hi <= el / lo + 1e-12);
    }

    #[test]
    fn processing_never_helps((ch, q) in dmc_strategy(4), seed in any::<u64>(), r in 0.05f64..=1.0) {
        let mut rng = common::rng(seed);
        let post = common::random_dmc(&mut rng, ch.outputs(), 3);
        let cascade = ch.then(&post).unwrap();
        prop_assert!(mutual_information(&cascade, &q).unwrap() <= mutual_information(&ch, &q).unwrap() + 1e-12);
        prop_assert!(e0_single(&cascade, &q, rho(r)).unwrap() <= e0_single(&ch, &q, rho(r)).unwrap() + 1e-12);
    }

    #[test]
    fn codeword_length_is_minimal(seed in any::<u64>(), r in 0.2f64..1.0, m in 2u64..32, pe in 1e-5f64..0.2, s1 in 0usize..3, s2 in 1usize..3) {
        let mut rng = common::rng(seed);
        let ch = common::random_mac(&mut rng, vec![2, 2], 3);
        let q = common::random_input(&mut rng, &[2, 2]);
        let classes = vec![MessageClass::new(m, pe).unwrap(); 2];
        let e = MacExponents::new(&ch, &q, rho(r)).unwrap();
        let s = Schedule::new(vec![s1, s2]);
        let len = e.min_length(&classes, &s, rho(r)).unwrap();
        let terms = e.terms(&classes, &s, rho(r)).unwrap();
        prop_assert!(union_bound(&terms, len.n) <= pe);
        if len.n > 1 {
            prop_assert!(union_bound(&terms, len.n - 1) > pe);
        }
        prop_assert!(len.lower <= len.n || len.bracket_anomaly);
        prop_assert!(len.n <= len.upper || len.bracket_anomaly);
    }

    #[test]
    fn policy_actions_are_feasible(j in 1usize..4, k in 1usize..5, n in prop::collection::vec(0usize..6, 3), seed in any::<u64>(), maxweight in any::<bool>()) {
        let n = &n[..j];
        let space = enumerate_schedules(j, k).unwrap();
        let tie = if maxweight { TieBreak::Maxweight } else { TieBreak::Renormalize };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = common::simplex(&mut rng, space.len());
        let p = ScheduleDistribution::from_pairs(space.schedules().iter().cloned().zip(w)).unwrap();
        for spec in [PolicySpec::non_idling(tie), PolicySpec::state_independent(p.clone())] {
            let idling = spec.kind == schedcomm::sched::PolicyKind::NonIdling;
            let policy = Policy::new(spec, &space, |s| s.total() as f64).unwrap();
            for _ in 0..20 {
                let a = policy.choose_schedule(n, &mut rng).unwrap();
                prop_assert!(a.total() <= k);
                prop_assert!((0..j).all(|c| a.get(c) <= n[c]));
                if idling {
                    let queued: usize = n.iter().sum();
                    prop_assert_eq!(a.total(), queued.min(k));
                }
            }
        }
        let induced = induced_distribution(&p, n);
        prop_assert!((induced.values().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inner_inside_outer_inside_transience(snr in prop::collection::vec(0.1f64..20.0, 1..=3), k in 1usize..5, r in 0.1f64..=1.0, d in prop::collection::vec(0.05f64..1.0, 3)) {
        let j = snr.len();
        let d = &d[..j];
        let spec = GaussianMacSpec::new(snr).unwrap();
        let quanta = Quanta::gaussian(&spec, enumerate_schedules(j, k).unwrap(), rho(r)).unwrap();
        let classes = vec![MessageClass::new(4, 1e-3).unwrap(); j];
        let req: Vec<f64> = classes.iter().map(|c| service_requirement(c, rho(r)).value()).collect();
        let gens: Vec<Vec<f64>> = rate_vectors_independent(&req, &quanta).unwrap().into_iter().map(|g| g.r).collect();
        let outer = outer_membership(d, &gens).unwrap().lambda;
        let inner = nonidling_inner_bounds(&req, &quanta).unwrap().threshold(d);
        prop_assert!(inner <= outer * (1.0 + 1e-9));
        let all: Vec<usize> = (0..j).collect();
        let tr = nonidling_transience_bound(&req, &quanta, &all).unwrap().threshold(d);
        prop_assert!(tr >= inner * (1.0 - 1e-9));
        // Saturated non-idling systems only use full schedules.
        let full_gens: Vec<Vec<f64>> = rate_vectors_independent(&req, &quanta)
            .unwrap()
            .into_iter()
            .filter(|g| g.s.total() == k)
            .map(|g| g.r)
            .collect();
        let saturated = outer_membership(d, &full_gens).unwrap().lambda;
        prop_assert!(tr >= saturated * (1.0 - 1e-9));
        // State-independent thresholds are reached by the padded generators.
        let padded: Vec<Vec<f64>> = padded_rate_vectors(&req, &quanta).unwrap().into_iter().map(|g| g.r).collect();
        let full: Vec<Schedule> = quanta.space().full().cloned().collect();
        let p = ScheduleDistribution::from_pairs(full.iter().map(|s| (s.clone(), 1.0 / full.len() as f64))).unwrap();
        let thr = state_independent_region(&req, &quanta, &p).unwrap();
        let point: Vec<f64> = thr.iter().map(|t| 0.999 * t).collect();
        prop_assert!(outer_membership(&point, &padded).unwrap().inside);
    }

    #[test]
    fn membership_certificates(seed in any::<u64>(), n in 1usize..8, scale in 0.1f64..3.0) {
        let mut rng = common::rng(seed);
        let gens: Vec<Vec<f64>> = (0..n).map(|_| (0..2).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect()).collect();
        let ea: Vec<f64> = (0..2).map(|_| scale * rand::Rng::random_range(&mut rng, 0.01..0.5)).collect();
        let m = outer_membership(&ea, &gens).unwrap();
        let mix: Vec<f64> = (0..2).map(|j| gens.iter().zip(&m.weights).map(|(g, w)| w * g[j]).sum()).collect();
        prop_assert!(m.weights.iter().sum::<f64>() <= 1.0 + 1e-9);
        for jj in 0..2 {
            prop_assert!(mix[jj] >= m.lambda * ea[jj] - 1e-9);
        }
        if let Some(y) = &m.certificate {
            let dot = |v: &[f64]| v.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
            prop_assert!((dot(&ea) - 1.0).abs() < 1e-9);
            for g in &gens {
                prop_assert!(dot(g) < 1.0 + 1e-9);
            }
        }
    }
}

/// Subclass dynamics keep at most one partially served cohort per slice.
#[test]
fn at_most_one_ongoing_cohort() {
    let space = enumerate_schedules(2, 3).unwrap();
    let support: Vec<Schedule> = space.full().cloned().collect();
    let w = 1.0 / support.len() as f64;
    let p = ScheduleDistribution::from_pairs(support.iter().map(|s| (s.clone(), w))).unwrap();
    let policy = Policy::new(PolicySpec::subclass(p), &space, |_| 0.0).unwrap();
    let lengths: Vec<u32> = (0..support.len() as u32).map(|i| 3 + i).collect();
    let split: Vec<Vec<f64>> = (0..2)
        .map(|j| {
            let raw: Vec<f64> = support.iter().map(|s| s.get(j) as f64).collect();
            let t: f64 = raw.iter().sum();
            raw.iter().map(|v| v / t).collect()
        })
        .collect();
    let sim = Simulator::subclass(
        Mode::Joint,
        policy,
        3,
        lengths.clone(),
        ArrivalModel::poisson(&[0.3, 0.2]).with_split(split),
    )
    .unwrap();
    for seed in 0..5 {
        let mut rng = SimRng::new(seed, 0);
        let mut state = sim.empty_state();
        for t in 0..5_000 {
            sim.step(&mut state, t, &mut rng).unwrap();
            let SystemState::Subclass { slices, .. } = &state else {
                unreachable!()
            };
            for (i, slice) in slices.iter().enumerate() {
                let partial: Vec<u32> = slice
                    .iter()
                    .flatten()
                    .map(|&(x, _)| x)
                    .filter(|&x| x < lengths[i])
                    .collect();
                assert!(
                    partial.windows(2).all(|w| w[0] == w[1]),
                    "slot {t} slice {i}: {partial:?}"
                );
                let per_class: Vec<usize> = slice
                    .iter()
                    .map(|q| q.iter().filter(|&&(x, _)| x < lengths[i]).count())
                    .collect();
                assert!((0..2).all(|j| per_class[j] <= support[i].get(j)));
            }
        }
    }
}

#[test]
fn mac_with_identical_rows_has_no_exponent() {
    let ch = DiscreteMac::from_fn(vec![2, 2], 2, |_, _| 0.5).unwrap();
    let q = InputDistribution::uniform(&[2, 2]);
    let e = MacExponents::new(&ch, &q, rho(1.0)).unwrap();
    assert!(e.get(&[0, 1]).abs() < 1e-12);
    let c = vec![MessageClass::new(2, 1e-3).unwrap(); 2];
    let err = e
        .min_length(&c, &Schedule::new(vec![1, 1]), rho(1.0))
        .unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
