//! Service requirements, random-coding error bounds and minimal codeword
//! lengths.
//!
//! Every bound in this module has the shape `χ(N) = Σ_i exp(a_i − N E_i)`
//! with `a_i ≥ 0` collecting the `ρ s ln M` rate terms. The smallest `N`
//! with `χ(N) ≤ p_e` is found by bisection inside the analytic bracket
//!
//! ```text
//! max_i ⌈−ln p_e + a_i⌉_{E_i} / E_i  ≤  N  ≤  max_i ⌈−ln(p_e / T) + a_i⌉_{E_i} / E_i
//! ```
//!
//! where `T` is the number of terms.

use serde::{Deserialize, Serialize};

use crate::channel::{nonempty_subsets, DegradedBroadcastSpec, DiscreteMac, InputDistribution};
use crate::error::{Error, Result};
use crate::exponents::{e0_dbc, e0_mac_subset, RhoParam};
use crate::sched::{Schedule, ScheduleSpace};

/// Parameters of one message class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawClass", into = "RawClass")]
pub struct MessageClass {
    alphabet_size: u64,
    target_error: f64,
    snr: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawClass {
    alphabet_size: u64,
    target_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    snr: Option<f64>,
}

impl TryFrom<RawClass> for MessageClass {
    type Error = Error;
    fn try_from(r: RawClass) -> Result<Self> {
        let c = MessageClass::new(r.alphabet_size, r.target_error)?;
        match r.snr {
            Some(g) => c.with_snr(g),
            None => Ok(c),
        }
    }
}

impl From<MessageClass> for RawClass {
    fn from(c: MessageClass) -> Self {
        RawClass {
            alphabet_size: c.alphabet_size,
            target_error: c.target_error,
            snr: c.snr,
        }
    }
}

impl MessageClass {
    pub fn new(alphabet_size: u64, target_error: f64) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::InvalidParameter(format!(
                "alphabet size must be at least 2, got {alphabet_size}"
            )));
        }
        if !(target_error > 0.0 && target_error < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target error must lie in (0, 1), got {target_error}"
            )));
        }
        Ok(Self {
            alphabet_size,
            target_error,
            snr: None,
        })
    }

    pub fn with_snr(mut self, snr: f64) -> Result<Self> {
        if !(snr.is_finite() && snr > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "SNR must be > 0, got {snr}"
            )));
        }
        self.snr = Some(snr);
        Ok(self)
    }

    pub fn alphabet_size(&self) -> u64 {
        self.alphabet_size
    }

    pub fn target_error(&self) -> f64 {
        self.target_error
    }

    pub fn snr(&self) -> Option<f64> {
        self.snr
    }

    pub fn ln_alphabet(&self) -> f64 {
        (self.alphabet_size as f64).ln()
    }
}

/// Nats of decoding work a message needs.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ServiceRequirement(f64);

impl ServiceRequirement {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `S_j = −ln p_{e,j} + ρ ln M_j`.
pub fn service_requirement(cls: &MessageClass, rho: RhoParam) -> ServiceRequirement {
    ServiceRequirement(-cls.target_error.ln() + rho.value() * cls.ln_alphabet())
}

/// Number of multiples `n = min{n ≥ 1 : x ≤ n q}`.
pub fn ceil_multiple_count(x: f64, q: f64) -> u64 {
    let n = (x / q - 1e-12).ceil();
    if n < 1.0 {
        1
    } else {
        n as u64
    }
}

/// `⌈x⌉_q = min{n ≥ 1 : x ≤ n q} · q`.
pub fn ceil_to_multiple(x: f64, q: f64) -> f64 {
    ceil_multiple_count(x, q) as f64 * q
}

/// One term `exp(offset − N · exponent)` of a union bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    /// Classes (joint decoding) or ladder levels (broadcast) of this term.
    pub members: Vec<usize>,
    pub offset: f64,
    pub exponent: f64,
}

impl BoundTerm {
    pub fn value(&self, n: u64) -> f64 {
        (self.offset - n as f64 * self.exponent).exp()
    }
}

/// Evaluates `Σ exp(a_i − N E_i)`.
pub fn union_bound(terms: &[BoundTerm], n: u64) -> f64 {
    terms.iter().map(|t| t.value(n)).sum()
}

/// Minimal codeword length together with its bracket and certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodewordLength {
    #[serde(rename = "N")]
    pub n: u64,
    pub lower: u64,
    pub upper: u64,
    pub chi_n: f64,
    /// `χ(N − 1)`; absent when `N = 1`.
    pub chi_prev: Option<f64>,
    /// The bracket had to be widened because of floating-point rounding.
    pub bracket_anomaly: bool,
}

/// Smallest `N ≥ 1` with `Σ exp(a_i − N E_i) ≤ p_e`.
pub fn min_length_for_terms(terms: &[BoundTerm], pe: f64) -> Result<CodewordLength> {
    if terms.is_empty() {
        return Err(Error::InvalidParameter("empty bound".into()));
    }
    if !(pe > 0.0 && pe < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p_e must lie in (0, 1), got {pe}"
        )));
    }
    if let Some(t) = terms.iter().find(|t| !(t.exponent > 0.0)) {
        return Err(Error::Infeasible(format!(
            "term {:?} has exponent {} <= 0 and never decays",
            t.members, t.exponent
        )));
    }
    let count = terms.len() as f64;
    let lower = terms
        .iter()
        .map(|t| ceil_multiple_count(-pe.ln() + t.offset, t.exponent))
        .max()
        .unwrap();
    let upper = terms
        .iter()
        .map(|t| ceil_multiple_count(-(pe / count).ln() + t.offset, t.exponent))
        .max()
        .unwrap();
    let ok = |n: u64| union_bound(terms, n) <= pe;

    let mut anomaly = upper < lower;
    let mut hi = upper.max(lower);
    while !ok(hi) {
        anomaly = true;
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::Infeasible("codeword length overflows u64".into()))?;
    }
    let mut lo = lower.min(hi);
    if ok(lo) {
        // Walk down past any rounding slack in the lower bound.
        while lo > 1 && ok(lo - 1) {
            anomaly = true;
            lo -= 1;
        }
        hi = lo;
    } else {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let n = hi;
    Ok(CodewordLength {
        n,
        lower,
        upper,
        chi_n: union_bound(terms, n),
        chi_prev: (n > 1).then(|| union_bound(terms, n - 1)),
        bracket_anomaly: anomaly,
    })
}

fn check_classes(classes: &[MessageClass], s: &Schedule) -> Result<()> {
    if classes.len() != s.classes() {
        return Err(Error::DimensionMismatch(format!(
            "{} classes for a {}-class schedule",
            classes.len(),
            s.classes()
        )));
    }
    Ok(())
}

/// Subset exponents `E_{o,S}(ρ, Q)` of a MAC, computed once and indexed by
/// source bitmask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacExponents {
    sources: usize,
    by_mask: Vec<f64>,
}

impl MacExponents {
    pub fn new(ch: &DiscreteMac, q: &InputDistribution, rho: RhoParam) -> Result<Self> {
        let n = ch.sources();
        let mut by_mask = vec![f64::NAN; 1 << n];
        for s in nonempty_subsets(n) {
            let m: usize = s.iter().map(|j| 1 << j).sum();
            by_mask[m] = e0_mac_subset(ch, q, &s, rho)?;
        }
        Ok(Self {
            sources: n,
            by_mask,
        })
    }

    pub fn get(&self, subset: &[usize]) -> f64 {
        self.by_mask[subset.iter().map(|j| 1usize << j).sum::<usize>()]
    }

    /// Terms of `χ(𝒥(s), N)` for schedule `s`.
    pub fn terms(
        &self,
        classes: &[MessageClass],
        s: &Schedule,
        rho: RhoParam,
    ) -> Result<Vec<BoundTerm>> {
        check_classes(classes, s)?;
        if s.classes() != self.sources {
            return Err(Error::DimensionMismatch(format!(
                "{}-class schedule for a {}-source channel",
                s.classes(),
                self.sources
            )));
        }
        let active = s.active();
        if active.is_empty() {
            return Err(Error::InvalidParameter("empty schedule".into()));
        }
        Ok(nonempty_subsets(active.len())
            .map(|idx| {
                let members: Vec<usize> = idx.iter().map(|&i| active[i]).collect();
                let offset = rho.value()
                    * members
                        .iter()
                        .map(|&j| s.get(j) as f64 * classes[j].ln_alphabet())
                        .sum::<f64>();
                BoundTerm {
                    exponent: self.get(&members),
                    members,
                    offset,
                }
            })
            .collect())
    }

    /// `N(s)` under joint decoding with `p_e = min_{j ∈ 𝒥(s)} p_{e,j}`.
    pub fn min_length(
        &self,
        classes: &[MessageClass],
        s: &Schedule,
        rho: RhoParam,
    ) -> Result<CodewordLength> {
        let terms = self.terms(classes, s, rho)?;
        min_length_for_terms(&terms, joint_target(classes, s))
    }
}

fn joint_target(classes: &[MessageClass], s: &Schedule) -> f64 {
    s.active()
        .iter()
        .map(|&j| classes[j].target_error)
        .fold(1.0, f64::min)
}

/// `χ(𝒥(s), N)` for joint decoding on a discrete MAC.
pub fn chi_mac(
    ch: &DiscreteMac,
    q: &InputDistribution,
    classes: &[MessageClass],
    s: &Schedule,
    rho: RhoParam,
    n: u64,
) -> Result<f64> {
    let e = MacExponents::new(ch, q, rho)?;
    Ok(union_bound(&e.terms(classes, s, rho)?, n))
}

/// `N(s)`: the smallest `N` with `χ(𝒥(s), N) ≤ p_e`.
pub fn min_codeword_length_mac(
    ch: &DiscreteMac,
    q: &InputDistribution,
    classes: &[MessageClass],
    s: &Schedule,
    rho: RhoParam,
) -> Result<CodewordLength> {
    MacExponents::new(ch, q, rho)?.min_length(classes, s, rho)
}

/// Successive-decoding exponents `E_{o,X_k,Y_j}` for all `k >= j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbcExponents {
    receivers: usize,
    /// `table[j][k - j]`.
    table: Vec<Vec<f64>>,
}

/// Options for broadcast codeword lengths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbcOptions {
    /// Count a null message in every alphabet (`M_j + 1`), which lets
    /// receivers learn which levels are idle without a control channel.
    #[serde(default)]
    pub null_message: bool,
}

/// `N_j(s)` per receiver and `N(s) = max_j N_j(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbcCodewordLengths {
    pub per_receiver: Vec<Option<CodewordLength>>,
    #[serde(rename = "N")]
    pub n: u64,
}

impl DbcExponents {
    pub fn new(spec: &DegradedBroadcastSpec, rho: RhoParam) -> Result<Self> {
        let n = spec.receivers();
        let table = (0..n)
            .map(|j| {
                (j..n)
                    .map(|k| e0_dbc(spec, k, j, rho))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            receivers: n,
            table,
        })
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.table[j][k - j]
    }

    /// Terms of `χ_j(s, N)`; levels with `s_k = 0` contribute `exp(−N E)`.
    pub fn terms(
        &self,
        classes: &[MessageClass],
        s: &Schedule,
        rho: RhoParam,
        j: usize,
        opts: DbcOptions,
    ) -> Result<Vec<BoundTerm>> {
        check_classes(classes, s)?;
        if s.classes() != self.receivers {
            return Err(Error::DimensionMismatch(format!(
                "{}-class schedule for a {}-receiver channel",
                s.classes(),
                self.receivers
            )));
        }
        if j >= self.receivers {
            return Err(Error::InvalidIndex(format!("receiver {j}")));
        }
        Ok((j..self.receivers)
            .map(|k| {
                let ln_m = if opts.null_message {
                    ((classes[k].alphabet_size + 1) as f64).ln()
                } else {
                    classes[k].ln_alphabet()
                };
                BoundTerm {
                    members: vec![k],
                    offset: rho.value() * s.get(k) as f64 * ln_m,
                    exponent: self.get(k, j),
                }
            })
            .collect())
    }

    pub fn min_lengths(
        &self,
        classes: &[MessageClass],
        s: &Schedule,
        rho: RhoParam,
        opts: DbcOptions,
    ) -> Result<DbcCodewordLengths> {
        check_classes(classes, s)?;
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty schedule".into()));
        }
        let per_receiver = (0..self.receivers)
            .map(|j| {
                if s.get(j) == 0 {
                    return Ok(None);
                }
                let t = self.terms(classes, s, rho, j, opts)?;
                min_length_for_terms(&t, classes[j].target_error).map(Some)
            })
            .collect::<Result<Vec<_>>>()?;
        let n = per_receiver
            .iter()
            .flatten()
            .map(|c| c.n)
            .max()
            .unwrap_or(0);
        Ok(DbcCodewordLengths { per_receiver, n })
    }
}

/// `χ_j(s, N)` for receiver `j` (0-based).
pub fn chi_dbc(
    spec: &DegradedBroadcastSpec,
    classes: &[MessageClass],
    s: &Schedule,
    rho: RhoParam,
    j: usize,
    n: u64,
    opts: DbcOptions,
) -> Result<f64> {
    let e = DbcExponents::new(spec, rho)?;
    Ok(union_bound(&e.terms(classes, s, rho, j, opts)?, n))
}

/// `N_j(s)` for every scheduled receiver and `N(s)`.
pub fn min_codeword_length_dbc(
    spec: &DegradedBroadcastSpec,
    classes: &[MessageClass],
    s: &Schedule,
    rho: RhoParam,
    opts: DbcOptions,
) -> Result<DbcCodewordLengths> {
    DbcExponents::new(spec, rho)?.min_lengths(classes, s, rho, opts)
}

/// `N(s)` for every schedule of a space; `None` for the empty schedule.
pub fn length_table(
    space: &ScheduleSpace,
    mut length: impl FnMut(&Schedule) -> Result<u64>,
) -> Result<Vec<Option<u64>>> {
    space
        .schedules()
        .iter()
        .map(|s| {
            if s.is_empty() {
                Ok(None)
            } else {
                length(s).map(Some)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Dmc;

    fn rho(v: f64) -> RhoParam {
        RhoParam::new(v).unwrap()
    }

    #[test]
    fn service_requirement_values() {
        let c = MessageClass::new(2, 1e-3).unwrap();
        let s = service_requirement(&c, rho(1.0)).value();
        assert!((s - 7.600902459542082).abs() < 1e-12);
        let c = MessageClass::new(2, (-1.0f64).exp()).unwrap();
        let s = service_requirement(&c, rho(1.0)).value();
        assert!((s - (1.0 + std::f64::consts::LN_2)).abs() < 1e-15);
        let big = MessageClass::new(1 << 60, 0.5).unwrap();
        let ratio = service_requirement(&big, rho(0.3)).value() / big.ln_alphabet();
        assert!((ratio - 0.3).abs() < 0.02);
    }

    #[test]
    fn class_validation() {
        assert!(MessageClass::new(1, 0.1).is_err());
        assert!(MessageClass::new(2, 0.0).is_err());
        assert!(MessageClass::new(2, 1.0).is_err());
        assert!(MessageClass::new(2, 0.1).unwrap().with_snr(0.0).is_err());
    }

    #[test]
    fn ceiling_to_multiple() {
        assert_eq!(ceil_to_multiple(3.0, 1.0), 3.0);
        assert_eq!(ceil_to_multiple(3.0000001, 1.0), 4.0);
        assert_eq!(ceil_to_multiple(0.01, 1.0), 1.0);
        assert_eq!(ceil_multiple_count(0.3, 0.1), 3);
        assert_eq!(ceil_multiple_count(1.0, 0.25), 4);
    }

    #[test]
    fn single_class_length_is_35() {
        // S = 7.60090, E0 = 0.22314 for BSC(0.1) at rho = 1.
        let ch = DiscreteMac::from_single(&Dmc::bsc(0.1).unwrap());
        let q = InputDistribution::uniform(&[2]);
        let c = [MessageClass::new(2, 1e-3).unwrap()];
        let r = min_codeword_length_mac(&ch, &q, &c, &Schedule::new(vec![1]), rho(1.0)).unwrap();
        assert_eq!(r.n, 35);
        assert_eq!((r.lower, r.upper), (35, 35));
        assert!(r.chi_n <= 1e-3 && r.chi_prev.unwrap() > 1e-3);
        assert!(!r.bracket_anomaly);
    }

    #[test]
    fn single_term_chi() {
        let ch = DiscreteMac::from_single(&Dmc::bsc(0.1).unwrap());
        let q = InputDistribution::uniform(&[2]);
        let c = [MessageClass::new(4, 1e-2).unwrap()];
        let s = Schedule::new(vec![3]);
        let e = e0_mac_subset(&ch, &q, &[0], rho(0.5)).unwrap();
        let v = chi_mac(&ch, &q, &c, &s, rho(0.5), 40).unwrap();
        let oracle = (0.5 * 3.0 * 4f64.ln() - 40.0 * e).exp();
        assert!((v - oracle).abs() < 1e-15 * oracle.max(1.0));
    }

    #[test]
    fn adder_chi_term_by_term() {
        let ch = DiscreteMac::binary_adder(2);
        let q = InputDistribution::uniform(&[2, 2]);
        let c = [
            MessageClass::new(2, 1e-3).unwrap(),
            MessageClass::new(2, 1e-3).unwrap(),
        ];
        let s = Schedule::new(vec![1, 1]);
        let v = chi_mac(&ch, &q, &c, &s, rho(1.0), 40).unwrap();
        let ln2 = std::f64::consts::LN_2;
        let mut oracle = 0.0;
        for (sub, a) in [(vec![0], ln2), (vec![1], ln2), (vec![0, 1], 2.0 * ln2)] {
            oracle += (a - 40.0 * e0_mac_subset(&ch, &q, &sub, rho(1.0)).unwrap()).exp();
        }
        assert!((v - oracle).abs() < 1e-15);
        assert!(chi_mac(&ch, &q, &c, &Schedule::zero(2), rho(1.0), 40).is_err());
    }

    #[test]
    fn infeasible_when_exponent_vanishes() {
        let ch = DiscreteMac::from_single(&Dmc::bsc(0.5).unwrap());
        let q = InputDistribution::uniform(&[2]);
        let c = [MessageClass::new(2, 1e-3).unwrap()];
        let r = min_codeword_length_mac(&ch, &q, &c, &Schedule::new(vec![1]), rho(1.0));
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn trivial_target_gives_one() {
        let t = [BoundTerm {
            members: vec![0],
            offset: 0.0,
            exponent: 5.0,
        }];
        let r = min_length_for_terms(&t, 0.5).unwrap();
        assert_eq!(r.n, 1);
        assert_eq!(r.chi_prev, None);
    }

    #[test]
    fn dbc_single_receiver_matches_mac() {
        let hop = Dmc::bsc(0.1).unwrap();
        let spec = DegradedBroadcastSpec::single(hop.clone(), vec![0.5, 0.5]).unwrap();
        let c = [MessageClass::new(2, 1e-3).unwrap()];
        let s = Schedule::new(vec![2]);
        let a = min_codeword_length_dbc(&spec, &c, &s, rho(1.0), DbcOptions::default()).unwrap();
        let b = min_codeword_length_mac(
            &DiscreteMac::from_single(&hop),
            &InputDistribution::uniform(&[2]),
            &c,
            &s,
            rho(1.0),
        )
        .unwrap();
        assert_eq!(a.n, b.n);
        assert_eq!(a.per_receiver[0].as_ref().unwrap().n, b.n);
    }

    #[test]
    fn dbc_cascade_matches_scan() {
        let spec = DegradedBroadcastSpec::new(
            Dmc::bsc(0.02).unwrap(),
            vec![Dmc::bsc(0.05).unwrap()],
            vec![Dmc::bsc(0.1).unwrap()],
            vec![0.5, 0.5],
        )
        .unwrap();
        let c = [
            MessageClass::new(2, 1e-3).unwrap(),
            MessageClass::new(4, 1e-2).unwrap(),
        ];
        let s = Schedule::new(vec![1, 2]);
        let opts = DbcOptions::default();
        let r = min_codeword_length_dbc(&spec, &c, &s, rho(0.8), opts).unwrap();
        for j in 0..2 {
            let pe = c[j].target_error();
            let scan = (1..)
                .find(|&n| chi_dbc(&spec, &c, &s, rho(0.8), j, n, opts).unwrap() <= pe)
                .unwrap();
            assert_eq!(r.per_receiver[j].as_ref().unwrap().n, scan);
        }
        let nulls =
            min_codeword_length_dbc(&spec, &c, &s, rho(0.8), DbcOptions { null_message: true })
                .unwrap();
        assert!(nulls.n >= r.n);
    }
}
