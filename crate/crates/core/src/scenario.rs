//! Scenario files and the commands of the `schedcomm` binary.
//!
//! Every command takes a [`Scenario`] and returns the text it prints:
//! pretty JSON for `exponent`, `codelen`, `region` and `simulate`, CSV for
//! `sweep`. Numbers are written with Rust's shortest round-trip formatting,
//! which never depends on the locale.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{
    mac_conditional_mi, nonempty_subsets, ChannelSpec, DiscreteMac, GaussianMacSpec,
    InputDistribution, MixtureChannel,
};
use crate::codelen::{
    ceil_multiple_count, service_requirement, CodewordLength, DbcExponents, DbcOptions,
    MacExponents, MessageClass,
};
use crate::error::{Error, Result};
use crate::exponents::RhoParam;
use crate::qsim::{
    sojourn_stats, ArrivalModel, BatchLaw, Mode, SimConfig, SimReport, Simulator, StabilityLabel,
};
use crate::regions::{
    joint_region, nonidling_inner_bounds, nonidling_transience_bound, outer_membership,
    rate_vectors_independent, rate_vectors_joint, state_independent_region, synthesize_policy,
    NonIdlingBounds, Quanta, RateVector, SynthesizedPolicy,
};
use crate::sched::{
    enumerate_schedules, Policy, PolicyKind, PolicySpec, Schedule, ScheduleDistribution,
    ScheduleSpace, TieBreak,
};

/// Parameter swept by `cmd_sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    K,
    #[serde(rename = "rho")]
    Rho,
    #[serde(rename = "snr")]
    Snr,
    M,
}

impl SweepAxis {
    fn name(self) -> &'static str {
        match self {
            SweepAxis::K => "K",
            SweepAxis::Rho => "rho",
            SweepAxis::Snr => "snr",
            SweepAxis::M => "M",
        }
    }
}

/// Sweep definition inside a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Strictly increasing axis values.
    pub values: Vec<f64>,
    /// Arrival direction `d`; thresholds are the largest `t` with `t·d`
    /// inside. Defaults to all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    /// Also simulate at 0.9 and 1.1 times the inner threshold.
    #[serde(default)]
    pub simulate: bool,
}

/// A complete system description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub mode: Mode,
    pub channel: ChannelSpec,
    /// Input law of a discrete MAC; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<InputDistribution>,
    pub classes: Vec<MessageClass>,
    pub rho: RhoParam,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrivals: Option<Vec<BatchLaw>>,
    /// Subclass splitting vectors, one row per class over the policy support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Vec<Vec<f64>>>,
    /// Arrival rate vector for `region`, and for `simulate` without `arrivals`.
    #[serde(default, rename = "EA", skip_serializing_if = "Option::is_none")]
    pub ea: Option<Vec<f64>>,
    /// Restricts `codelen` to one schedule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    #[serde(default)]
    pub null_message: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// Per-mode quantities derived once from a scenario.
#[derive(Debug, Clone)]
pub enum Analysis {
    Independent {
        requirements: Vec<f64>,
        quanta: Quanta,
    },
    /// Joint or broadcast decoding, indexed like `space.schedules()`.
    Coded {
        space: ScheduleSpace,
        lengths: Vec<Option<u64>>,
    },
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(text)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn classes(&self) -> usize {
        self.classes.len()
    }

    /// Cross-field consistency of mode, channel, classes and policy.
    pub fn validate(&self) -> Result<()> {
        let j = self.classes();
        if j == 0 {
            return Err(Error::Config("at least one class is required".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        match (&self.mode, &self.channel) {
            (Mode::Independent, ChannelSpec::GaussianMac(g)) => {
                if g.classes() != j {
                    return Err(Error::Config(format!(
                        "{} SNRs for {j} classes",
                        g.classes()
                    )));
                }
                for (c, &snr) in self.classes.iter().zip(g.snr()) {
                    if c.snr().is_some_and(|x| x != snr) {
                        return Err(Error::Config("class snr disagrees with the channel".into()));
                    }
                }
            }
            (Mode::Joint, ChannelSpec::DiscreteMac(m)) => {
                if m.sources() != j {
                    return Err(Error::Config(format!(
                        "{}-source MAC for {j} classes",
                        m.sources()
                    )));
                }
                if let Some(q) = &self.q {
                    m.check_input(q)?;
                }
            }
            (Mode::Dbc, ChannelSpec::Dbc(d)) => {
                if d.receivers() != j {
                    return Err(Error::Config(format!(
                        "{}-receiver channel for {j} classes",
                        d.receivers()
                    )));
                }
            }
            (m, _) => {
                return Err(Error::ModeMismatch(format!(
                    "mode {m:?} needs channel kind {}",
                    match m {
                        Mode::Independent => "gaussian_mac",
                        Mode::Joint => "discrete_mac",
                        Mode::Dbc => "dbc",
                    }
                )))
            }
        }
        if self.q.is_some() && self.mode != Mode::Joint {
            return Err(Error::Config(
                "q applies to discrete_mac channels only".into(),
            ));
        }
        let space = self.space()?;
        if let Some(p) = &self.policy {
            let subclass = p.kind == PolicyKind::SubclassStateIndependent;
            if subclass != self.mode.uses_subclasses() {
                return Err(Error::ModeMismatch(format!(
                    "policy kind {:?} does not fit mode {:?}",
                    p.kind, self.mode
                )));
            }
            p.validate(&space)?;
        }
        let check_len = |what: &str, n: usize| -> Result<()> {
            if n != j {
                return Err(Error::Config(format!(
                    "{what} has {n} entries for {j} classes"
                )));
            }
            Ok(())
        };
        if let Some(a) = &self.arrivals {
            check_len("arrivals", a.len())?;
            for law in a {
                law.validate()?;
            }
        }
        if let Some(ea) = &self.ea {
            check_len("EA", ea.len())?;
            if ea.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
                return Err(Error::Config("EA entries must be finite and >= 0".into()));
            }
        }
        if let Some(s) = &self.schedule {
            if !space.contains(s) || s.is_empty() {
                return Err(Error::Config(format!(
                    "schedule {s} is not a non-empty schedule of the space"
                )));
            }
        }
        if self.split.is_some() && !self.mode.uses_subclasses() {
            return Err(Error::Config(
                "split applies to joint and dbc modes only".into(),
            ));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() || sw.values.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Config(
                    "sweep values must be strictly increasing".into(),
                ));
            }
            if let Some(d) = &sw.direction {
                check_len("sweep direction", d.len())?;
                if d.iter().any(|&v| !(v >= 0.0)) || d.iter().all(|&v| v == 0.0) {
                    return Err(Error::Config(
                        "sweep direction must be >= 0 and non-zero".into(),
                    ));
                }
            }
            if sw.axis == SweepAxis::Snr && self.mode != Mode::Independent {
                return Err(Error::Config(
                    "the snr axis needs a gaussian_mac channel".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<ScheduleSpace> {
        enumerate_schedules(self.classes(), self.k)
    }

    fn input_law(&self, m: &DiscreteMac) -> InputDistribution {
        self.q
            .clone()
            .unwrap_or_else(|| InputDistribution::uniform(m.input_sizes()))
    }

    fn dbc_options(&self) -> DbcOptions {
        DbcOptions {
            null_message: self.null_message,
        }
    }

    pub fn requirements(&self) -> Vec<f64> {
        self.classes
            .iter()
            .map(|c| service_requirement(c, self.rho).value())
            .collect()
    }

    /// Quanta (independent) or codeword lengths (joint and broadcast) for
    /// the whole schedule space.
    pub fn analyze(&self) -> Result<Analysis> {
        let space = self.space()?;
        match &self.channel {
            ChannelSpec::GaussianMac(g) => Ok(Analysis::Independent {
                requirements: self.requirements(),
                quanta: Quanta::gaussian(g, space, self.rho)?,
            }),
            ChannelSpec::DiscreteMac(m) => {
                let e = MacExponents::new(m, &self.input_law(m), self.rho)?;
                let lengths = space
                    .schedules()
                    .iter()
                    .map(|s| {
                        if s.is_empty() {
                            Ok(None)
                        } else {
                            e.min_length(&self.classes, s, self.rho).map(|c| Some(c.n))
                        }
                    })
                    .collect::<Result<_>>()?;
                Ok(Analysis::Coded { space, lengths })
            }
            ChannelSpec::Dbc(d) => {
                let e = DbcExponents::new(d, self.rho)?;
                let lengths = space
                    .schedules()
                    .iter()
                    .map(|s| {
                        if s.is_empty() {
                            Ok(None)
                        } else {
                            e.min_lengths(&self.classes, s, self.rho, self.dbc_options())
                                .map(|c| Some(c.n))
                        }
                    })
                    .collect::<Result<_>>()?;
                Ok(Analysis::Coded { space, lengths })
            }
        }
    }

    /// The scenario with one sweep axis set to `v`.
    pub fn with_axis(&self, axis: SweepAxis, v: f64) -> Result<Scenario> {
        let mut sc = self.clone();
        match axis {
            SweepAxis::K => sc.k = as_count(v, "K")? as usize,
            SweepAxis::Rho => sc.rho = RhoParam::new(v)?,
            SweepAxis::Snr => {
                sc.channel = ChannelSpec::GaussianMac(GaussianMacSpec::equal(self.classes(), v)?);
                sc.classes = self
                    .classes
                    .iter()
                    .map(|c| MessageClass::new(c.alphabet_size(), c.target_error()))
                    .collect::<Result<_>>()?;
            }
            SweepAxis::M => {
                let m = as_count(v, "M")?;
                sc.classes = self
                    .classes
                    .iter()
                    .map(|c| {
                        let n = MessageClass::new(m, c.target_error())?;
                        match c.snr() {
                            Some(g) => n.with_snr(g),
                            None => Ok(n),
                        }
                    })
                    .collect::<Result<_>>()?;
            }
        }
        sc.validate()?;
        Ok(sc)
    }
}

fn as_count(v: f64, what: &str) -> Result<u64> {
    if !(v >= 1.0) || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(Error::Config(format!(
            "{what} must be a positive integer, got {v}"
        )));
    }
    Ok(v as u64)
}

impl Analysis {
    pub fn space(&self) -> &ScheduleSpace {
        match self {
            Analysis::Independent { quanta, .. } => quanta.space(),
            Analysis::Coded { space, .. } => space,
        }
    }

    /// Generators `r(s)` of the outer bound.
    pub fn generators(&self) -> Result<Vec<RateVector>> {
        match self {
            Analysis::Independent {
                requirements,
                quanta,
            } => rate_vectors_independent(requirements, quanta),
            Analysis::Coded { space, lengths } => rate_vectors_joint(space, lengths),
        }
    }

    fn nonidling(&self) -> Option<Result<NonIdlingBounds>> {
        match self {
            Analysis::Independent {
                requirements,
                quanta,
            } => Some(nonidling_inner_bounds(requirements, quanta)),
            Analysis::Coded { .. } => None,
        }
    }

    /// Per-class thresholds of a state-independent or subclass policy.
    pub fn policy_thresholds(&self, p: &ScheduleDistribution) -> Result<Vec<f64>> {
        match self {
            Analysis::Independent {
                requirements,
                quanta,
            } => state_independent_region(requirements, quanta, p),
            Analysis::Coded { space, lengths } => Ok(joint_region(space, lengths, p)?.class),
        }
    }

    /// Largest `t` with `t·d` inside the outer bound.
    pub fn outer_threshold(&self, d: &[f64]) -> Result<f64> {
        let rows: Vec<Vec<f64>> = self.generators()?.into_iter().map(|g| g.r).collect();
        Ok(outer_membership(d, &rows)?.lambda)
    }

    /// Largest `t` with `t·d` provably stable under `policy`.
    ///
    /// Non-idling policies use the better of the two sufficient conditions.
    /// Without a policy, coded modes use the outer bound, which synthesized
    /// policies reach from inside.
    pub fn inner_threshold(&self, d: &[f64], policy: Option<&PolicySpec>) -> Result<f64> {
        match (policy.and_then(|p| p.p.as_ref().map(|q| (p.kind, q))), self) {
            (Some((PolicyKind::NonIdling, _)), _) | (None, Analysis::Independent { .. }) => {
                Ok(self
                    .nonidling()
                    .expect("independent")
                    .map(|b| b.threshold(d))?)
            }
            (Some((_, p)), _) => {
                let thr = self.policy_thresholds(p)?;
                Ok(thr
                    .iter()
                    .zip(d)
                    .filter(|(_, &dj)| dj > 0.0)
                    .map(|(t, dj)| t / dj)
                    .fold(f64::INFINITY, f64::min))
            }
            (None, Analysis::Coded { .. }) => self.outer_threshold(d),
        }
    }
}

fn pretty(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// `exponent`: quanta, subset exponents or ladder exponents, each with the
/// mutual information it tends to as `ρ → 0`.
pub fn cmd_exponent(sc: &Scenario) -> Result<String> {
    let rho = sc.rho;
    let out = match &sc.channel {
        ChannelSpec::GaussianMac(g) => {
            let quanta = Quanta::gaussian(g, sc.space()?, rho)?;
            let rows: Vec<Value> = quanta
                .space()
                .nonempty()
                .map(|s| json!({ "s": s, "phi": quanta.get(s) }))
                .collect();
            json!({ "mode": sc.mode, "rho": rho, "quanta": rows })
        }
        ChannelSpec::DiscreteMac(m) => {
            let q = sc.input_law(m);
            let e = MacExponents::new(m, &q, rho)?;
            let rows = nonempty_subsets(m.sources())
                .map(|s| {
                    Ok(json!({
                        "subset": s,
                        "E0": e.get(&s),
                        "mutual_information": mac_conditional_mi(m, &q, &s)?,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            json!({ "mode": sc.mode, "rho": rho, "subsets": rows })
        }
        ChannelSpec::Dbc(d) => {
            let e = DbcExponents::new(d, rho)?;
            let mut rows = Vec::new();
            for j in 0..d.receivers() {
                for k in j..d.receivers() {
                    rows.push(json!({
                        "level": k,
                        "receiver": j,
                        "E0": e.get(k, j),
                        "mutual_information": MixtureChannel::dbc(d, k, j)?.conditional_mi(),
                    }));
                }
            }
            json!({ "mode": sc.mode, "rho": rho, "ladder": rows })
        }
    };
    pretty(&out)
}

#[derive(Serialize)]
struct LengthRow<'a> {
    s: &'a Schedule,
    #[serde(flatten)]
    length: CodewordLength,
}

/// `codelen`: codeword lengths with their brackets and bound values, or
/// service requirements and slot counts in independent mode.
pub fn cmd_codelen(sc: &Scenario) -> Result<String> {
    let space = sc.space()?;
    let targets: Vec<Schedule> = match &sc.schedule {
        Some(s) => vec![s.clone()],
        None => space.nonempty().cloned().collect(),
    };
    let rows: Vec<Value> = match &sc.channel {
        ChannelSpec::GaussianMac(g) => {
            let req = sc.requirements();
            let quanta = Quanta::gaussian(g, space, sc.rho)?;
            targets
                .iter()
                .map(|s| {
                    let slots: Vec<Option<u64>> = (0..s.classes())
                        .map(|j| {
                            (s.get(j) > 0).then(|| ceil_multiple_count(req[j], quanta.get(s)[j]))
                        })
                        .collect();
                    json!({ "s": s, "slots": slots })
                })
                .collect()
        }
        ChannelSpec::DiscreteMac(m) => {
            let e = MacExponents::new(m, &sc.input_law(m), sc.rho)?;
            targets
                .iter()
                .map(|s| {
                    let length = e.min_length(&sc.classes, s, sc.rho)?;
                    Ok(serde_json::to_value(LengthRow { s, length })?)
                })
                .collect::<Result<_>>()?
        }
        ChannelSpec::Dbc(d) => {
            let e = DbcExponents::new(d, sc.rho)?;
            targets
                .iter()
                .map(|s| {
                    let l = e.min_lengths(&sc.classes, s, sc.rho, sc.dbc_options())?;
                    Ok(json!({ "s": s, "N": l.n, "per_receiver": l.per_receiver }))
                })
                .collect::<Result<_>>()?
        }
    };
    if sc.schedule.is_some() {
        let mut row = rows.into_iter().next().expect("one target");
        if let Value::Object(o) = &mut row {
            if sc.mode == Mode::Independent {
                o.insert("requirements".into(), json!(sc.requirements()));
            }
        }
        return pretty(&row);
    }
    let mut out = json!({ "mode": sc.mode, "lengths": rows });
    if sc.mode == Mode::Independent {
        out["requirements"] = json!(sc.requirements());
    }
    pretty(&out)
}

fn weighted(gens: &[RateVector], w: &[f64]) -> Vec<Value> {
    gens.iter()
        .zip(w)
        .filter(|(_, &w)| w > 0.0)
        .map(|(g, w)| json!({ "s": g.s, "w": w }))
        .collect()
}

/// `region`: outer-bound membership of `EA` with hull weights or a
/// separating certificate, plus the mode's inner conditions.
pub fn cmd_region(sc: &Scenario) -> Result<String> {
    let ea = sc
        .ea
        .as_ref()
        .ok_or_else(|| Error::Config("region needs EA".into()))?;
    let an = sc.analyze()?;
    let gens = an.generators()?;
    let rows: Vec<Vec<f64>> = gens.iter().map(|g| g.r.clone()).collect();
    let m = outer_membership(ea, &rows)?;
    let mut out = json!({
        "mode": sc.mode,
        "EA": ea,
        "verdict": if m.inside { "inside" } else { "outside" },
        "lambda": m.lambda,
        "weights": weighted(&gens, &m.weights),
        "certificate": m.certificate,
    });
    if let Analysis::Independent {
        requirements,
        quanta,
    } = &an
    {
        let b = nonidling_inner_bounds(requirements, quanta)?;
        let transient: Vec<Vec<usize>> = nonempty_subsets(sc.classes())
            .filter_map(
                |s| match nonidling_transience_bound(requirements, quanta, &s) {
                    Ok(t) if t.holds(ea) => Some(Ok(s)),
                    Ok(_) => None,
                    Err(e) => Some(Err(e)),
                },
            )
            .collect::<Result<_>>()?;
        out["nonidling"] = json!({
            "first_condition": b.first_holds(ea),
            "second_condition": b.second_holds(ea),
            "stable": b.holds(ea),
            "transient_subsets": transient,
        });
    }
    if let Some(p) = sc.policy.as_ref().and_then(|p| p.p.as_ref()) {
        if sc
            .policy
            .as_ref()
            .is_some_and(|p| p.kind != PolicyKind::NonIdling)
        {
            let thr = an.policy_thresholds(p)?;
            let stable = ea.iter().zip(&thr).all(|(a, t)| a < t);
            out["policy"] = json!({ "thresholds": thr, "stable": stable });
        }
    }
    if sc.mode.uses_subclasses() {
        out["synthesized"] = match synthesize_policy(ea, &gens) {
            Ok(sp) => serde_json::to_value(sp)?,
            Err(Error::NotInterior { .. }) => Value::Null,
            Err(e) => return Err(e),
        };
    }
    pretty(&out)
}

/// A runnable system together with the policy it uses.
pub struct Prepared {
    pub simulator: Simulator,
    pub policy: PolicySpec,
    pub split: Option<Vec<Vec<f64>>>,
}

fn split_for(an: &Analysis, p: &ScheduleDistribution, classes: usize) -> Result<Vec<Vec<f64>>> {
    let gens = an.generators()?;
    let space = an.space();
    let served: Vec<Vec<f64>> = p
        .entries()
        .iter()
        .map(|e| {
            let r = &gens[space.index_of(&e.s).expect("validated")].r;
            r.iter().map(|v| e.w * v).collect()
        })
        .collect();
    Ok((0..classes)
        .map(|j| {
            let tot: f64 = served.iter().map(|r| r[j]).sum();
            served
                .iter()
                .map(|r| if tot > 0.0 { r[j] / tot } else { 0.0 })
                .collect()
        })
        .collect())
}

/// Builds the simulator for `arrivals`, synthesizing a subclass policy from
/// the arrival means when a coded scenario names none.
pub fn prepare(sc: &Scenario, an: &Analysis, arrivals: Vec<BatchLaw>) -> Result<Prepared> {
    let space = an.space().clone();
    match an {
        Analysis::Independent {
            requirements,
            quanta,
        } => {
            let spec = sc
                .policy
                .clone()
                .unwrap_or_else(|| PolicySpec::non_idling(TieBreak::Renormalize));
            let policy = Policy::new(spec.clone(), &space, |s| quanta.offered(s, None))?;
            let simulator = Simulator::independent(
                policy,
                space,
                requirements.clone(),
                |s, j| Ok(quanta.get(s)[j]),
                ArrivalModel::new(arrivals),
            )?;
            Ok(Prepared {
                simulator,
                policy: spec,
                split: None,
            })
        }
        Analysis::Coded { lengths, .. } => {
            let means: Vec<f64> = arrivals.iter().map(BatchLaw::mean).collect();
            let (spec, split) = match &sc.policy {
                Some(spec) => {
                    let p = spec.p.as_ref().expect("validated");
                    let split = match &sc.split {
                        Some(s) => s.clone(),
                        None => split_for(an, p, sc.classes())?,
                    };
                    (spec.clone(), split)
                }
                None => {
                    let sp: SynthesizedPolicy = synthesize_policy(&means, &an.generators()?)?;
                    (PolicySpec::subclass(sp.p), sp.split)
                }
            };
            let support_lengths = spec
                .p
                .as_ref()
                .expect("subclass policy")
                .entries()
                .iter()
                .map(|e| {
                    let n = lengths[space.index_of(&e.s).expect("validated")].ok_or_else(|| {
                        Error::Config(format!("policy schedules the empty schedule {}", e.s))
                    })?;
                    u32::try_from(n)
                        .map_err(|_| Error::Infeasible(format!("N({}) = {n} overflows", e.s)))
                })
                .collect::<Result<Vec<u32>>>()?;
            let policy = Policy::new(spec.clone(), &space, |_| 0.0)?;
            let simulator = Simulator::subclass(
                sc.mode,
                policy,
                space.k(),
                support_lengths,
                ArrivalModel::new(arrivals).with_split(split.clone()),
            )?;
            Ok(Prepared {
                simulator,
                policy: spec,
                split: Some(split),
            })
        }
    }
}

fn scenario_arrivals(sc: &Scenario) -> Result<Vec<BatchLaw>> {
    match (&sc.arrivals, &sc.ea) {
        (Some(a), _) => Ok(a.clone()),
        (None, Some(ea)) => Ok(ArrivalModel::poisson(ea).per_class),
        (None, None) => Err(Error::Config("simulate needs arrivals or EA".into())),
    }
}

/// Result of `cmd_simulate`, also used to write the time-series CSV.
pub struct SimulationOutput {
    pub json: String,
    pub report: SimReport,
}

/// `simulate`: runs the system and reports verdicts and delay statistics.
pub fn cmd_simulate(sc: &Scenario, cfg: &SimConfig) -> Result<SimulationOutput> {
    let an = sc.analyze()?;
    let prepared = prepare(sc, &an, scenario_arrivals(sc)?)?;
    let report = prepared.simulator.run(cfg)?;
    let out = json!({
        "mode": sc.mode,
        "verdict": report.verdict(),
        "policy": prepared.policy,
        "split": prepared.split,
        "report": report,
        "sojourn": sojourn_stats(&report),
    });
    Ok(SimulationOutput {
        json: pretty(&out)?,
        report,
    })
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: f64,
    pub inner_threshold: f64,
    pub outer_threshold: f64,
    /// Inner threshold in nats per slot, `t Σ_j d_j ln M_j`.
    pub nat_inner_threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict_at_0_9: Option<StabilityLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict_at_1_1: Option<StabilityLabel>,
}

fn sweep_point(sc: &Scenario, sw: &SweepSpec, v: f64, cfg: &SimConfig) -> Result<SweepRow> {
    let pt = sc.with_axis(sw.axis, v)?;
    let d = sw
        .direction
        .clone()
        .unwrap_or_else(|| vec![1.0; pt.classes()]);
    let an = pt.analyze()?;
    let inner = an.inner_threshold(&d, pt.policy.as_ref())?;
    let outer = an.outer_threshold(&d)?;
    let nat: f64 = inner
        * d.iter()
            .zip(&pt.classes)
            .map(|(a, c)| a * c.ln_alphabet())
            .sum::<f64>();
    let mut row = SweepRow {
        axis: v,
        inner_threshold: inner,
        outer_threshold: outer,
        nat_inner_threshold: nat,
        verdict_at_0_9: None,
        verdict_at_1_1: None,
    };
    if sw.simulate && inner.is_finite() {
        let rates = |f: f64| {
            ArrivalModel::poisson(&d.iter().map(|x| f * inner * x).collect::<Vec<_>>()).per_class
        };
        let below = prepare(&pt, &an, rates(0.9))?;
        row.verdict_at_0_9 = Some(below.simulator.run(cfg)?.verdict());
        // Coded modes reuse the policy built for the lower point.
        let mut above_sc = pt.clone();
        if above_sc.mode.uses_subclasses() {
            above_sc.policy = Some(below.policy.clone());
            above_sc.split = below.split.clone();
        }
        let above = prepare(&above_sc, &an, rates(1.1))?;
        row.verdict_at_1_1 = Some(above.simulator.run(cfg)?.verdict());
    }
    Ok(row)
}

/// `sweep`: thresholds along the scenario's sweep axis, as CSV.
pub fn cmd_sweep(sc: &Scenario, cfg: &SimConfig) -> Result<String> {
    let sw = sc
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep needs a sweep section".into()))?;
    let rows = sw
        .values
        .par_iter()
        .map(|&v| sweep_point(sc, sw, v, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        sw.axis.name(),
        "inner_threshold",
        "outer_threshold",
        "nat_inner_threshold",
    ];
    if sw.simulate {
        header.extend(["verdict_at_0.9", "verdict_at_1.1"]);
    }
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    let label = |l: Option<StabilityLabel>| match l {
        Some(StabilityLabel::Stable) => "stable",
        Some(StabilityLabel::Unstable) => "unstable",
        Some(StabilityLabel::Inconclusive) => "inconclusive",
        None => "",
    };
    for r in &rows {
        let mut rec = vec![
            r.axis.to_string(),
            r.inner_threshold.to_string(),
            r.outer_threshold.to_string(),
            r.nat_inner_threshold.to_string(),
        ];
        if sw.simulate {
            rec.push(label(r.verdict_at_0_9).into());
            rec.push(label(r.verdict_at_1_1).into());
        }
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Sweep rows without CSV formatting, for library callers.
pub fn sweep_rows(sc: &Scenario, cfg: &SimConfig) -> Result<Vec<SweepRow>> {
    let sw = sc
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep needs a sweep section".into()))?;
    sw.values
        .par_iter()
        .map(|&v| sweep_point(sc, sw, v, cfg))
        .collect()
}
