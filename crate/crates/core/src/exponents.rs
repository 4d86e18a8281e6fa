//! Gallager-style random-coding exponents.
//!
//! Every family is evaluated through one routine on a [`MixtureChannel`]:
//!
//! ```text
//! E(ρ) = −ln Σ_z w_z Σ_y ( Σ_x Q_z(x) p_z(y|x)^{1/(1+ρ)} )^{1+ρ}
//! ```
//!
//! Both sums are taken in the log domain, so tiny transition probabilities
//! do not underflow.

use serde::{Deserialize, Serialize};

use crate::channel::{
    dbc_effective_channel, decode_tuple, DegradedBroadcastSpec, DiscreteMac, Dmc, GaussianMacSpec,
    InputDistribution, MixtureChannel,
};
use crate::error::{Error, Result};
use crate::sched::Schedule;

/// Reliability-rate trade-off parameter, `0 < ρ ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RhoParam(f64);

impl RhoParam {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_finite() && rho > 0.0 && rho <= 1.0 {
            Ok(Self(rho))
        } else {
            Err(Error::InvalidParameter(format!(
                "rho must lie in (0, 1], got {rho}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RhoParam {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        RhoParam::new(v)
    }
}

impl From<RhoParam> for f64 {
    fn from(r: RhoParam) -> f64 {
        r.0
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.filter(|t| *t > f64::NEG_INFINITY).collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

fn ln_or_neg_inf(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Exponent of an arbitrary conditional mixture.
pub fn e0_mixture(m: &MixtureChannel, rho: RhoParam) -> f64 {
    let r = rho.value();
    let inv = 1.0 / (1.0 + r);
    let outer =
        m.components
            .iter()
            .filter(|c| c.weight > 0.0)
            .flat_map(|c| {
                let lw = c.weight.ln();
                (0..c.channel.outputs()).map(move |y| {
                    let inner = log_sum_exp(c.input.iter().enumerate().map(|(x, &qx)| {
                        ln_or_neg_inf(qx) + inv * ln_or_neg_inf(c.channel.prob(x, y))
                    }));
                    lw + (1.0 + r) * inner
                })
            });
    let total = log_sum_exp(outer);
    // The inner sum never exceeds one; clamp round-off below zero.
    (-total).max(0.0)
}

/// `E₀(ρ, Q)` of a single-user channel.
pub fn e0_single(ch: &Dmc, q: &[f64], rho: RhoParam) -> Result<f64> {
    Ok(e0_mixture(&MixtureChannel::single(ch, q)?, rho))
}

/// Effective single-user channel seen by the first port of class `j` when
/// every other scheduled codeletter is averaged out under its input law.
///
/// The MAC has one port per scheduled message, laid out class-major: the
/// first `s_1` ports carry class 1, the next `s_2` class 2, and so on.
/// `q` holds one distribution per class, shared by all of its ports.
pub fn interference_channel(
    ch: &DiscreteMac,
    q: &InputDistribution,
    s: &Schedule,
    j: usize,
) -> Result<Dmc> {
    if q.sources() != s.classes() {
        return Err(Error::DimensionMismatch(format!(
            "{} class input laws for a {}-class schedule",
            q.sources(),
            s.classes()
        )));
    }
    if j >= s.classes() {
        return Err(Error::InvalidIndex(format!("class {j}")));
    }
    if s.get(j) == 0 {
        return Err(Error::InvalidParameter(format!(
            "class {} is not scheduled, no effective channel",
            j + 1
        )));
    }
    let port_class: Vec<usize> = (0..s.classes())
        .flat_map(|c| std::iter::repeat_n(c, s.get(c)))
        .collect();
    if port_class.len() != ch.sources() {
        return Err(Error::DimensionMismatch(format!(
            "schedule places {} messages but the channel has {} ports",
            port_class.len(),
            ch.sources()
        )));
    }
    let ports_q =
        InputDistribution::new(port_class.iter().map(|&c| q.source(c).to_vec()).collect())?;
    ch.check_input(&ports_q)?;
    let me = port_class.iter().position(|&c| c == j).expect("scheduled");
    let sizes = ch.input_sizes();
    let ny = ch.output_size();
    let mut t = vec![0.0; sizes[me] * ny];
    let mut x = vec![0usize; sizes.len()];
    for idx in 0..ch.tuple_count() {
        decode_tuple(sizes, idx, &mut x);
        let w: f64 = x
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != me)
            .map(|(p, &v)| ports_q.source(p)[v])
            .product();
        if w == 0.0 {
            continue;
        }
        for y in 0..ny {
            t[x[me] * ny + y] += w * ch.prob_idx(idx, y);
        }
    }
    Dmc::new(sizes[me], ny, t)
}

/// Per-class exponent under schedule `s` with interference treated as noise.
pub fn e0_independent(
    ch: &DiscreteMac,
    q: &InputDistribution,
    s: &Schedule,
    j: usize,
    rho: RhoParam,
) -> Result<f64> {
    let eff = interference_channel(ch, q, s, j)?;
    e0_single(&eff, q.source(j), rho)
}

/// Closed-form Gaussian service quantum `φ_j(s)`.
pub fn e0_gaussian_quantum(
    spec: &GaussianMacSpec,
    s: &Schedule,
    j: usize,
    rho: RhoParam,
) -> Result<f64> {
    let snr = spec.snr();
    if s.classes() != snr.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}-class schedule for a {}-class channel",
            s.classes(),
            snr.len()
        )));
    }
    if j >= snr.len() {
        return Err(Error::InvalidIndex(format!("class {j}")));
    }
    if s.get(j) == 0 {
        return Err(Error::InvalidParameter(format!(
            "class {} is not scheduled, quantum undefined",
            j + 1
        )));
    }
    let r = rho.value();
    let load: f64 = s.counts().iter().zip(snr).map(|(&c, g)| c as f64 * g).sum();
    let interference = load - snr[j] + 1.0;
    Ok(r * (snr[j] / ((1.0 + r) * interference)).ln_1p())
}

/// Joint-decoding subset exponent `E_{o,S}(ρ, Q)`.
pub fn e0_mac_subset(
    ch: &DiscreteMac,
    q: &InputDistribution,
    subset: &[usize],
    rho: RhoParam,
) -> Result<f64> {
    Ok(e0_mixture(&MixtureChannel::mac_subset(ch, q, subset)?, rho))
}

/// Successive-decoding exponent for ladder level `k` at receiver `j`
/// (0-based, `k >= j`).
pub fn e0_dbc(spec: &DegradedBroadcastSpec, k: usize, j: usize, rho: RhoParam) -> Result<f64> {
    dbc_effective_channel(spec, k, j)?;
    Ok(e0_mixture(&MixtureChannel::dbc(spec, k, j)?, rho))
}

/// Grid used by [`e0_over_rho_limit`].
pub const LIMIT_GRID: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Estimate of `lim_{ρ→0} E(ρ)/ρ` with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoLimit {
    pub value: f64,
    pub tolerance: f64,
}

/// Extrapolates `E(ρ)/ρ` to `ρ = 0` from [`LIMIT_GRID`].
///
/// `E/ρ` is close to `I − aρ` near zero, so each neighbouring pair on the
/// decade grid gives a linear extrapolation `(10 g(ρ/10) − g(ρ)) / 9`. The
/// estimate is the last one and the tolerance the spread of the last two.
pub fn e0_over_rho_limit(mut exponent: impl FnMut(RhoParam) -> Result<f64>) -> Result<RhoLimit> {
    let g = LIMIT_GRID
        .iter()
        .map(|&r| Ok(exponent(RhoParam::new(r)?)? / r))
        .collect::<Result<Vec<f64>>>()?;
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergent(format!(
            "non-finite E/rho values {g:?}"
        )));
    }
    let scale = g.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    for w in g.windows(2) {
        if w[1] < w[0] - 1e-7 * scale {
            return Err(Error::NonConvergent(format!(
                "E/rho increases as rho grows: {g:?}"
            )));
        }
    }
    let ext: Vec<f64> = g.windows(2).map(|w| (10.0 * w[1] - w[0]) / 9.0).collect();
    let n = ext.len();
    let value = ext[n - 1];
    let tolerance = (ext[n - 1] - ext[n - 2]).abs().max(f64::EPSILON * scale);
    if tolerance > 1e-6 * scale {
        return Err(Error::NonConvergent(format!(
            "extrapolates spread by {tolerance:e}: {ext:?}"
        )));
    }
    Ok(RhoLimit {
        value: value.max(0.0),
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{mac_conditional_mi, mutual_information};

    const LN2: f64 = std::f64::consts::LN_2;

    fn rho(v: f64) -> RhoParam {
        RhoParam::new(v).unwrap()
    }

    /// Direct, non-log-domain evaluation of the single-user exponent.
    fn e0_direct(ch: &Dmc, q: &[f64], r: f64) -> f64 {
        let mut s = 0.0;
        for y in 0..ch.outputs() {
            let inner: f64 = (0..ch.inputs())
                .map(|x| q[x] * ch.prob(x, y).powf(1.0 / (1.0 + r)))
                .sum();
            s += inner.powf(1.0 + r);
        }
        -s.ln()
    }

    #[test]
    fn rho_bounds() {
        assert!(RhoParam::new(0.0).is_err());
        assert!(RhoParam::new(1.0 + 1e-12).is_err());
        assert!(RhoParam::new(f64::NAN).is_err());
        assert!(RhoParam::new(1.0).is_ok());
        assert!(serde_json::from_str::<RhoParam>("0").is_err());
    }

    #[test]
    fn single_noiseless_and_bsc() {
        let id = Dmc::identity(2);
        for r in [0.1, 0.5, 1.0] {
            assert!((e0_single(&id, &[0.5, 0.5], rho(r)).unwrap() - r * LN2).abs() < 1e-14);
        }
        let bsc = Dmc::bsc(0.1).unwrap();
        let v = e0_single(&bsc, &[0.5, 0.5], rho(1.0)).unwrap();
        let oracle = LN2 - (1.0 + 2.0 * 0.09f64.sqrt()).ln();
        assert!((v - oracle).abs() < 1e-14);
        assert!((v - 0.22314).abs() < 1e-5);
        assert!(e0_single(&bsc, &[0.5, 0.5], rho(1e-9)).unwrap() < 1e-9);
    }

    #[test]
    fn log_domain_matches_direct() {
        let ch = Dmc::from_rows(vec![
            vec![0.7, 0.2, 0.1],
            vec![0.1, 0.1, 0.8],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        let q = [0.2, 0.5, 0.3];
        for r in [0.05, 0.3, 1.0] {
            let a = e0_single(&ch, &q, rho(r)).unwrap();
            assert!((a - e0_direct(&ch, &q, r)).abs() < 1e-13);
        }
    }

    #[test]
    fn independent_unit_schedule_is_marginal() {
        let bsc = Dmc::bsc(0.2).unwrap();
        let mac = DiscreteMac::from_single(&bsc);
        let q = InputDistribution::single(vec![0.4, 0.6]).unwrap();
        let s = Schedule::new(vec![1]);
        let a = e0_independent(&mac, &q, &s, 0, rho(0.7)).unwrap();
        let b = e0_single(&bsc, &[0.4, 0.6], rho(0.7)).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(e0_independent(&mac, &q, &Schedule::new(vec![0]), 0, rho(0.7)).is_err());
    }

    #[test]
    fn independent_adder_matches_hand_marginal() {
        // y = x1 + x2 with x2 uniform noise: rows (1/2,1/2,0) and (0,1/2,1/2).
        let eff = Dmc::from_rows(vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5]]).unwrap();
        let q = InputDistribution::uniform(&[2, 2]);
        let s = Schedule::new(vec![1, 1]);
        let a = e0_independent(&DiscreteMac::binary_adder(2), &q, &s, 0, rho(1.0)).unwrap();
        let b = e0_direct(&eff, &[0.5, 0.5], 1.0);
        assert!((a - b).abs() < 1e-14, "{a} {b}");
        // Same-class interferer on two ports.
        let one = InputDistribution::uniform(&[2]);
        let c = e0_independent(
            &DiscreteMac::binary_adder(2),
            &one,
            &Schedule::new(vec![2]),
            0,
            rho(1.0),
        )
        .unwrap();
        assert!((c - b).abs() < 1e-14);
    }

    #[test]
    fn gaussian_quantum_values() {
        let g = GaussianMacSpec::new(vec![1.0]).unwrap();
        let v = e0_gaussian_quantum(&g, &Schedule::new(vec![1]), 0, rho(1.0)).unwrap();
        assert!((v - 1.5f64.ln()).abs() < 1e-15);
        let g10 = GaussianMacSpec::new(vec![10.0]).unwrap();
        let v = e0_gaussian_quantum(&g10, &Schedule::new(vec![4]), 0, rho(1.0)).unwrap();
        assert!((v - (1.0 + 10.0 / 62.0f64).ln()).abs() < 1e-15);
        assert!((v - 0.14953).abs() < 1e-5);
        assert!(e0_gaussian_quantum(&g10, &Schedule::new(vec![0]), 0, rho(1.0)).is_err());
    }

    #[test]
    fn gaussian_subschedule_dominance() {
        let g = GaussianMacSpec::new(vec![0.5, 2.0, 7.0]).unwrap();
        let big = Schedule::new(vec![2, 1, 3]);
        for small in [vec![1, 1, 3], vec![2, 0, 1], vec![1, 0, 0]] {
            let small = Schedule::new(small);
            let a = e0_gaussian_quantum(&g, &small, 0, rho(0.5)).unwrap();
            let b = e0_gaussian_quantum(&g, &big, 0, rho(0.5)).unwrap();
            assert!(a >= b);
        }
    }

    #[test]
    fn subset_exponent_reductions() {
        let bsc = Dmc::bsc(0.15).unwrap();
        let mac = DiscreteMac::from_single(&bsc);
        let q = InputDistribution::single(vec![0.3, 0.7]).unwrap();
        let a = e0_mac_subset(&mac, &q, &[0], rho(0.6)).unwrap();
        assert!((a - e0_single(&bsc, &[0.3, 0.7], rho(0.6)).unwrap()).abs() < 1e-15);

        let par = DiscreteMac::parallel_noiseless(vec![2, 2]);
        let q2 = InputDistribution::uniform(&[2, 2]);
        let v = e0_mac_subset(&par, &q2, &[0], rho(1.0)).unwrap();
        assert!((v - LN2).abs() < 1e-14);
        assert_eq!(
            e0_mac_subset(&par, &q2, &[], rho(1.0)),
            Err(Error::EmptySubset)
        );
    }

    #[test]
    fn dbc_exponent_reductions() {
        let hop = Dmc::bsc(0.1).unwrap();
        let one = DegradedBroadcastSpec::single(hop.clone(), vec![0.5, 0.5]).unwrap();
        let a = e0_dbc(&one, 0, 0, rho(1.0)).unwrap();
        assert!((a - e0_single(&hop, &[0.5, 0.5], rho(1.0)).unwrap()).abs() < 1e-15);

        let two = DegradedBroadcastSpec::new(
            hop,
            vec![Dmc::identity(2)],
            vec![Dmc::bsc(0.2).unwrap()],
            vec![0.5, 0.5],
        )
        .unwrap();
        let y1 = e0_dbc(&two, 1, 0, rho(1.0)).unwrap();
        let y2 = e0_dbc(&two, 1, 1, rho(1.0)).unwrap();
        assert!((y1 - y2).abs() < 1e-15);
        assert!(e0_dbc(&two, 0, 1, rho(1.0)).is_err());
    }

    #[test]
    fn limit_recovers_mutual_information() {
        let bsc = Dmc::bsc(0.1).unwrap();
        let lim = e0_over_rho_limit(|r| e0_single(&bsc, &[0.5, 0.5], r)).unwrap();
        let mi = mutual_information(&bsc, &[0.5, 0.5]).unwrap();
        assert!((lim.value - mi).abs() < 1e-4);
        assert!((lim.value - 0.3680).abs() < 1e-4);

        let add = DiscreteMac::binary_adder(2);
        let q = InputDistribution::uniform(&[2, 2]);
        let lim = e0_over_rho_limit(|r| e0_mac_subset(&add, &q, &[0, 1], r)).unwrap();
        let mi = mac_conditional_mi(&add, &q, &[0, 1]).unwrap();
        assert!((lim.value - mi).abs() < 1e-4);

        let id = Dmc::identity(2);
        let lim = e0_over_rho_limit(|r| e0_single(&id, &[0.5, 0.5], r)).unwrap();
        assert!((lim.value - LN2).abs() < 1e-9);
    }

    #[test]
    fn limit_flags_broken_exponent() {
        let r = e0_over_rho_limit(|r| Ok(r.value().sqrt()));
        assert!(matches!(r, Err(Error::NonConvergent(_))));
    }
}
