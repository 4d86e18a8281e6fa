//! Slotted multiclass processor-sharing queue.
//!
//! Each slot runs in a fixed order: the state is read, the policy picks an
//! action, scheduled messages receive service, completed messages leave and
//! the slot's arrivals join the tails of their queues.
//!
//! In independent-decoding mode a served class-`j` message loses
//! `min(x, φ_j(s))` nats of residual requirement. In joint and broadcast
//! mode messages are pre-assigned to a subclass `(j, s)` on arrival, start
//! with `N(s)` units and lose one unit per served slot, so a cohort that
//! starts together also finishes together.

use std::collections::VecDeque;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sched::{Policy, PolicyKind, Schedule, ScheduleSpace, SubclassView};

/// Residuals at or below this are complete.
pub const COMPLETION_TOL: f64 = 1e-12;
/// Safety cap on a single batch.
pub const MAX_BATCH: u64 = 1_000_000;

/// Decoding mode of a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Independent,
    Joint,
    Dbc,
}

impl Mode {
    pub fn uses_subclasses(self) -> bool {
        !matches!(self, Mode::Independent)
    }
}

/// Batch-size law of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum BatchLaw {
    Poisson {
        rate: f64,
    },
    Bernoulli {
        p: f64,
    },
    /// `batch` messages at every slot `t` with `t % period == 0`.
    Cycle {
        period: u64,
        batch: u64,
    },
}

impl BatchLaw {
    pub fn mean(&self) -> f64 {
        match *self {
            BatchLaw::Poisson { rate } => rate,
            BatchLaw::Bernoulli { p } => p,
            BatchLaw::Cycle { period, batch } => batch as f64 / period as f64,
        }
    }

    /// Same law family with mean `mean`.
    pub fn with_mean(&self, mean: f64) -> Result<BatchLaw> {
        let law = match *self {
            BatchLaw::Poisson { .. } => BatchLaw::Poisson { rate: mean },
            BatchLaw::Bernoulli { .. } => BatchLaw::Bernoulli { p: mean },
            BatchLaw::Cycle { .. } => {
                return Err(Error::Config(
                    "deterministic cycles cannot be rescaled".into(),
                ))
            }
        };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BatchLaw::Poisson { rate } if !(rate.is_finite() && rate >= 0.0) => Err(Error::Config(
                format!("Poisson rate must be finite and >= 0, got {rate}"),
            )),
            BatchLaw::Bernoulli { p } if !(0.0..=1.0).contains(&p) => Err(Error::Config(format!(
                "Bernoulli probability must lie in [0, 1], got {p}"
            ))),
            BatchLaw::Cycle { period: 0, .. } => {
                Err(Error::Config("cycle period must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    fn sampler(&self) -> Result<BatchSampler> {
        self.validate()?;
        Ok(match *self {
            BatchLaw::Poisson { rate } if rate > 0.0 => BatchSampler::Poisson(
                Poisson::new(rate).map_err(|e| Error::Config(format!("Poisson({rate}): {e}")))?,
            ),
            BatchLaw::Poisson { .. } => BatchSampler::Zero,
            BatchLaw::Bernoulli { p } => BatchSampler::Bernoulli(p),
            BatchLaw::Cycle { period, batch } => BatchSampler::Cycle { period, batch },
        })
    }
}

#[derive(Debug, Clone)]
enum BatchSampler {
    Zero,
    Poisson(Poisson<f64>),
    Bernoulli(f64),
    Cycle { period: u64, batch: u64 },
}

impl BatchSampler {
    fn sample<R: Rng + ?Sized>(&self, t: u64, rng: &mut R) -> u64 {
        let n = match self {
            BatchSampler::Zero => 0,
            BatchSampler::Poisson(d) => d.sample(rng) as u64,
            BatchSampler::Bernoulli(p) => rng.random_bool(*p) as u64,
            BatchSampler::Cycle { period, batch } => {
                if t.is_multiple_of(*period) {
                    *batch
                } else {
                    0
                }
            }
        };
        n.min(MAX_BATCH)
    }
}

/// Arrival processes of all classes, plus the subclass splitting vectors
/// `μ_j` in joint and broadcast mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalModel {
    pub per_class: Vec<BatchLaw>,
    /// `split[j][i]`: probability that a class-`j` arrival joins slice `i`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Vec<Vec<f64>>>,
}

impl ArrivalModel {
    pub fn new(per_class: Vec<BatchLaw>) -> Self {
        Self {
            per_class,
            split: None,
        }
    }

    pub fn with_split(mut self, split: Vec<Vec<f64>>) -> Self {
        self.split = Some(split);
        self
    }

    pub fn means(&self) -> Vec<f64> {
        self.per_class.iter().map(BatchLaw::mean).collect()
    }

    /// Poisson arrivals with the given means.
    pub fn poisson(means: &[f64]) -> Self {
        Self::new(
            means
                .iter()
                .map(|&rate| BatchLaw::Poisson { rate })
                .collect(),
        )
    }
}

/// Per-class FIFO of `(residual, arrival slot)`.
type RealQueue = VecDeque<(f64, u64)>;
/// Per-class FIFO of `(residual units, arrival slot)`.
type UnitQueue = VecDeque<(u32, u64)>;

/// The Markov-chain state.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemState {
    Independent {
        queues: Vec<RealQueue>,
    },
    /// `slices[i][j]` is subclass `(j, s_i)` for support schedule `s_i`.
    Subclass {
        slices: Vec<Vec<UnitQueue>>,
        lengths: Vec<u32>,
    },
}

impl SystemState {
    pub fn queue_lengths(&self) -> Vec<usize> {
        match self {
            SystemState::Independent { queues } => queues.iter().map(VecDeque::len).collect(),
            SystemState::Subclass { slices, .. } => {
                let classes = slices.first().map_or(0, Vec::len);
                (0..classes)
                    .map(|j| slices.iter().map(|s| s[j].len()).sum())
                    .collect()
            }
        }
    }

    pub fn total_messages(&self) -> usize {
        self.queue_lengths().iter().sum()
    }

    /// Total residual service (nats, or channel uses in subclass mode).
    pub fn total_work(&self) -> f64 {
        match self {
            SystemState::Independent { queues } => queues.iter().flatten().map(|&(x, _)| x).sum(),
            SystemState::Subclass { slices, .. } => slices
                .iter()
                .flatten()
                .flatten()
                .map(|&(x, _)| x as f64)
                .sum(),
        }
    }

    /// Residuals of every queue, head first.
    pub fn residuals(&self) -> Vec<Vec<f64>> {
        match self {
            SystemState::Independent { queues } => queues
                .iter()
                .map(|q| q.iter().map(|&(x, _)| x).collect())
                .collect(),
            SystemState::Subclass { slices, .. } => slices
                .iter()
                .flatten()
                .map(|q| q.iter().map(|&(x, _)| x as f64).collect())
                .collect(),
        }
    }
}

impl SubclassView for SystemState {
    fn queued(&self, slice: usize, j: usize) -> usize {
        match self {
            SystemState::Subclass { slices, .. } => slices[slice][j].len(),
            SystemState::Independent { .. } => 0,
        }
    }

    fn ongoing(&self, slice: usize, j: usize) -> usize {
        match self {
            SystemState::Subclass { slices, lengths } => slices[slice][j]
                .iter()
                .take_while(|&&(x, _)| x < lengths[slice])
                .count(),
            SystemState::Independent { .. } => 0,
        }
    }
}

/// What was served in one slot.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Schedule(Schedule),
    Subclass { slice: usize, counts: Vec<usize> },
}

/// Result of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub action: Action,
    /// Residual work removed by service.
    pub served_work: f64,
    /// Service offered by the action, `Σ s_j φ_j(s)`.
    pub offered_work: f64,
    /// `(class, sojourn)` of each departure.
    pub departures: Vec<(usize, u64)>,
    pub arrivals: Vec<u64>,
    /// Work brought by the arrivals.
    pub arrived_work: f64,
}

#[derive(Debug, Clone)]
enum Service {
    Quanta {
        space: ScheduleSpace,
        requirements: Vec<f64>,
        quanta: Vec<Vec<f64>>,
    },
    Lengths {
        lengths: Vec<u32>,
        split: Vec<Option<WeightedIndex<f64>>>,
    },
}

/// The queueing system: mode, policy, service model and arrivals.
#[derive(Debug, Clone)]
pub struct Simulator {
    mode: Mode,
    classes: usize,
    k: usize,
    policy: Policy,
    service: Service,
    arrivals: ArrivalModel,
    samplers: Vec<BatchSampler>,
}

/// Independent random streams of one replication.
#[derive(Debug, Clone)]
pub struct SimRng {
    pub arrivals: ChaCha8Rng,
    pub policy: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SimRng {
    /// Streams for replication `rep` of base seed `seed`.
    pub fn new(seed: u64, rep: u64) -> Self {
        let s = splitmix64(seed ^ splitmix64(rep));
        let mut arrivals = ChaCha8Rng::seed_from_u64(s);
        arrivals.set_stream(1);
        let mut policy = ChaCha8Rng::seed_from_u64(s);
        policy.set_stream(2);
        Self { arrivals, policy }
    }
}

impl Simulator {
    /// Independent decoding: `requirements[j] = S_j` and `quantum(s, j) = φ_j(s)`
    /// for every `s` in `space` with `s_j > 0`.
    pub fn independent(
        policy: Policy,
        space: ScheduleSpace,
        requirements: Vec<f64>,
        mut quantum: impl FnMut(&Schedule, usize) -> Result<f64>,
        arrivals: ArrivalModel,
    ) -> Result<Self> {
        let classes = space.classes();
        if policy.kind() == PolicyKind::SubclassStateIndependent {
            return Err(Error::ModeMismatch(
                "independent decoding needs a class-level policy".into(),
            ));
        }
        if requirements.len() != classes {
            return Err(Error::DimensionMismatch(format!(
                "{} requirements for {classes} classes",
                requirements.len()
            )));
        }
        if let Some(s) = requirements.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::Config(format!(
                "service requirement must be > 0, got {s}"
            )));
        }
        let quanta = space
            .schedules()
            .iter()
            .map(|s| {
                (0..classes)
                    .map(|j| if s.get(j) > 0 { quantum(s, j) } else { Ok(0.0) })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let k = space.k();
        Self::finish(
            Mode::Independent,
            classes,
            k,
            policy,
            Service::Quanta {
                space,
                requirements,
                quanta,
            },
            arrivals,
        )
    }

    /// Joint or broadcast decoding: `lengths[i] = N(s_i)` for support schedule
    /// `s_i` of the policy, with `arrivals.split` giving `μ_j`.
    pub fn subclass(
        mode: Mode,
        policy: Policy,
        k: usize,
        lengths: Vec<u32>,
        arrivals: ArrivalModel,
    ) -> Result<Self> {
        if !mode.uses_subclasses() {
            return Err(Error::ModeMismatch(
                "subclass system needs joint or dbc mode".into(),
            ));
        }
        if policy.kind() != PolicyKind::SubclassStateIndependent {
            return Err(Error::ModeMismatch(
                "joint and broadcast decoding need a subclass policy".into(),
            ));
        }
        let support = policy.support();
        if lengths.len() != support.len() || lengths.contains(&0) {
            return Err(Error::Config(
                "need one positive codeword length per support schedule".into(),
            ));
        }
        let classes = support.first().map_or(0, Schedule::classes);
        let split = arrivals
            .split
            .as_ref()
            .ok_or_else(|| Error::Config("subclass mode needs a splitting vector".into()))?;
        if split.len() != classes || split.iter().any(|m| m.len() != support.len()) {
            return Err(Error::DimensionMismatch(
                "split must be J rows of one weight per support schedule".into(),
            ));
        }
        let mut samplers = Vec::with_capacity(classes);
        for (j, mu) in split.iter().enumerate() {
            if mu.iter().all(|&w| w == 0.0) {
                if arrivals.per_class[j].mean() > 0.0 {
                    return Err(Error::Config(format!(
                        "class {} has arrivals but no subclass to join",
                        j + 1
                    )));
                }
                samplers.push(None);
                continue;
            }
            crate::channel::check_distribution(&format!("mu_{}", j + 1), mu)?;
            if let Some(i) = (0..mu.len()).find(|&i| mu[i] > 0.0 && support[i].get(j) == 0) {
                return Err(Error::Config(format!(
                    "class {} split onto schedule {} that never serves it",
                    j + 1,
                    support[i]
                )));
            }
            samplers.push(Some(
                WeightedIndex::new(mu.iter().copied())
                    .map_err(|e| Error::Config(format!("mu_{}: {e}", j + 1)))?,
            ));
        }
        Self::finish(
            mode,
            classes,
            k,
            policy,
            Service::Lengths {
                lengths,
                split: samplers,
            },
            arrivals,
        )
    }

    fn finish(
        mode: Mode,
        classes: usize,
        k: usize,
        policy: Policy,
        service: Service,
        arrivals: ArrivalModel,
    ) -> Result<Self> {
        if arrivals.per_class.len() != classes {
            return Err(Error::DimensionMismatch(format!(
                "{} arrival laws for {classes} classes",
                arrivals.per_class.len()
            )));
        }
        let samplers = arrivals
            .per_class
            .iter()
            .map(BatchLaw::sampler)
            .collect::<Result<_>>()?;
        Ok(Self {
            mode,
            classes,
            k,
            policy,
            service,
            arrivals,
            samplers,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn arrivals(&self) -> &ArrivalModel {
        &self.arrivals
    }

    /// Mean arriving work per slot (nats or channel uses).
    pub fn mean_arriving_work(&self) -> f64 {
        match &self.service {
            Service::Quanta { requirements, .. } => self
                .arrivals
                .per_class
                .iter()
                .zip(requirements)
                .map(|(a, s)| a.mean() * s)
                .sum(),
            Service::Lengths { lengths, .. } => {
                let split = self.arrivals.split.as_ref().expect("validated");
                self.arrivals
                    .per_class
                    .iter()
                    .zip(split)
                    .map(|(a, mu)| {
                        a.mean()
                            * mu.iter()
                                .zip(lengths)
                                .map(|(m, &n)| m * n as f64)
                                .sum::<f64>()
                    })
                    .sum()
            }
        }
    }

    /// Number of queues watched for empty visits: classes, or subclasses.
    pub fn queue_count(&self) -> usize {
        match &self.service {
            Service::Quanta { .. } => self.classes,
            Service::Lengths { lengths, .. } => lengths.len() * self.classes,
        }
    }

    pub fn empty_state(&self) -> SystemState {
        match &self.service {
            Service::Quanta { .. } => SystemState::Independent {
                queues: vec![VecDeque::new(); self.classes],
            },
            Service::Lengths { lengths, .. } => SystemState::Subclass {
                slices: vec![vec![VecDeque::new(); self.classes]; lengths.len()],
                lengths: lengths.clone(),
            },
        }
    }

    /// Advances `state` by slot `t`.
    pub fn step(&self, state: &mut SystemState, t: u64, rng: &mut SimRng) -> Result<StepOutcome> {
        let mut departures = Vec::new();
        let (action, served_work, offered_work) = match (&self.service, &mut *state) {
            (Service::Quanta { space, quanta, .. }, SystemState::Independent { queues }) => {
                let n: Vec<usize> = queues.iter().map(VecDeque::len).collect();
                let s = self.policy.choose_schedule(&n, &mut rng.policy)?;
                let idx = space
                    .index_of(&s)
                    .ok_or_else(|| Error::InvalidIndex(format!("schedule {s} outside S_K")))?;
                let phi = &quanta[idx];
                let mut served = 0.0;
                let mut offered = 0.0;
                for (j, q) in queues.iter_mut().enumerate() {
                    let sj = s.get(j);
                    offered += sj as f64 * phi[j];
                    for m in q.iter_mut().take(sj) {
                        let d = m.0.min(phi[j]);
                        m.0 -= d;
                        served += d;
                    }
                    let mut i = 0;
                    while i < sj.min(q.len()) {
                        if q[i].0 <= COMPLETION_TOL {
                            let (x, a) = q.remove(i).unwrap();
                            served += x;
                            departures.push((j, t - a));
                        } else {
                            i += 1;
                        }
                    }
                }
                (Action::Schedule(s), served, offered)
            }
            (Service::Lengths { .. }, st @ SystemState::Subclass { .. }) => {
                let a = self.policy.choose_subclass(&*st, &mut rng.policy)?;
                let SystemState::Subclass { slices, .. } = st else {
                    unreachable!()
                };
                let slice = &mut slices[a.slice];
                let mut served = 0.0;
                for (j, &c) in a.counts.iter().enumerate() {
                    let q = &mut slice[j];
                    for m in q.iter_mut().take(c) {
                        m.0 -= 1;
                        served += 1.0;
                    }
                    while q.front().is_some_and(|m| m.0 == 0) {
                        let (_, arr) = q.pop_front().unwrap();
                        departures.push((j, t - arr));
                    }
                }
                let offered = a.counts.iter().sum::<usize>() as f64;
                (
                    Action::Subclass {
                        slice: a.slice,
                        counts: a.counts,
                    },
                    served,
                    offered,
                )
            }
            _ => {
                return Err(Error::ModeMismatch(
                    "state does not match the system mode".into(),
                ))
            }
        };

        let mut arrivals = Vec::with_capacity(self.classes);
        let mut arrived_work = 0.0;
        for (j, sampler) in self.samplers.iter().enumerate() {
            let n = sampler.sample(t, &mut rng.arrivals);
            arrivals.push(n);
            match (&self.service, &mut *state) {
                (Service::Quanta { requirements, .. }, SystemState::Independent { queues }) => {
                    for _ in 0..n {
                        queues[j].push_back((requirements[j], t));
                    }
                    arrived_work += n as f64 * requirements[j];
                }
                (Service::Lengths { lengths, split }, SystemState::Subclass { slices, .. }) => {
                    if n > 0 {
                        let d = split[j].as_ref().expect("validated");
                        for _ in 0..n {
                            let i = d.sample(&mut rng.arrivals);
                            slices[i][j].push_back((lengths[i], t));
                            arrived_work += lengths[i] as f64;
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        Ok(StepOutcome {
            action,
            served_work,
            offered_work,
            departures,
            arrivals,
            arrived_work,
        })
    }

    fn empty_flags(&self, state: &SystemState, out: &mut [u64]) {
        match state {
            SystemState::Independent { queues } => {
                for (c, q) in out.iter_mut().zip(queues) {
                    *c += q.is_empty() as u64;
                }
            }
            SystemState::Subclass { slices, .. } => {
                for (c, q) in out.iter_mut().zip(slices.iter().flatten()) {
                    *c += q.is_empty() as u64;
                }
            }
        }
    }

    /// One replication from the empty state.
    pub fn run_replication(&self, seed: u64, rep: u64, horizon: u64) -> Result<ReplicationReport> {
        let mut rng = SimRng::new(seed, rep);
        let mut state = self.empty_state();
        let half = horizon / 2;
        let mut total_messages = Vec::with_capacity(horizon as usize);
        let mut total_work = Vec::with_capacity(horizon as usize);
        let mut empty_visits = vec![0u64; self.queue_count()];
        let mut sojourns = vec![Vec::new(); self.classes];
        let mut messages: u64 = 0;
        let mut work = 0.0f64;
        for t in 0..horizon {
            let out = self.step(&mut state, t, &mut rng)?;
            messages -= out.departures.len() as u64;
            work -= out.served_work;
            for (j, d) in out.departures {
                sojourns[j].push(d);
            }
            messages += out.arrivals.iter().sum::<u64>();
            work += out.arrived_work;
            if messages == 0 || work < 0.0 {
                work = 0.0;
            }
            total_messages.push(messages);
            total_work.push(work);
            if t >= half {
                self.empty_flags(&state, &mut empty_visits);
            }
        }
        let verdict = classify_stability(
            &total_work,
            &total_messages,
            &empty_visits,
            self.mean_arriving_work(),
            ClassifierConfig::default(),
        );
        Ok(ReplicationReport {
            replication: rep,
            horizon,
            total_messages,
            total_work,
            empty_visits,
            sojourns,
            verdict,
        })
    }

    /// Runs `cfg.replications` independent replications in parallel.
    pub fn run(&self, cfg: &SimConfig) -> Result<SimReport> {
        cfg.validate(self.k)?;
        let reps = (0..cfg.replications as u64)
            .into_par_iter()
            .map(|r| self.run_replication(cfg.seed, r, cfg.horizon))
            .collect::<Result<Vec<_>>>()?;
        Ok(SimReport::new(self.mode, cfg.clone(), reps))
    }
}

/// Horizon, replication count and base seed of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub horizon: u64,
    pub replications: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            horizon: 200_000,
            replications: 8,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, k: usize) -> Result<()> {
        if self.horizon < 10 * k as u64 || self.horizon < 2 {
            return Err(Error::Config(format!(
                "horizon {} is shorter than 10 K = {}",
                self.horizon,
                10 * k
            )));
        }
        if self.replications == 0 {
            return Err(Error::Config("need at least one replication".into()));
        }
        Ok(())
    }
}

/// Empirical stability label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityLabel {
    Stable,
    Unstable,
    Inconclusive,
}

/// Tunables of [`classify_stability`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// Slope band half-width as a fraction of the mean arriving work per slot.
    pub epsilon_factor: f64,
    /// Minimum per-queue empty-visit rate for a stable verdict.
    pub min_empty_rate: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            epsilon_factor: 0.01,
            min_empty_rate: 1e-4,
        }
    }
}

/// Verdict with the statistics it was based on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub label: StabilityLabel,
    /// Least-squares slope of total work over the second half, per slot.
    pub slope: f64,
    pub epsilon: f64,
    /// Smallest per-queue fraction of second-half slots spent empty.
    pub min_empty_rate: f64,
    /// Mean number of messages over the second half.
    pub mean_queue: f64,
    /// Batch-means 95% half-width of `mean_queue`.
    pub mean_queue_ci: f64,
}

/// Least-squares slope of `y` against its index.
pub fn ls_slope(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    if y.len() < 2 {
        return 0.0;
    }
    let xm = (n - 1.0) / 2.0;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &v) in y.iter().enumerate() {
        let dx = i as f64 - xm;
        sxy += dx * (v - ym);
        sxx += dx * dx;
    }
    sxy / sxx
}

const BATCHES: usize = 20;
/// Two-sided 95% Student quantile with `BATCHES - 1` degrees of freedom.
const T_QUANTILE: f64 = 2.093;

/// Mean and batch-means 95% half-width.
pub fn batch_means(y: &[f64]) -> (f64, f64) {
    let n = y.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let b = n / BATCHES;
    if b == 0 {
        return (mean, f64::INFINITY);
    }
    let bm: Vec<f64> = (0..BATCHES)
        .map(|i| y[i * b..(i + 1) * b].iter().sum::<f64>() / b as f64)
        .collect();
    let m = bm.iter().sum::<f64>() / BATCHES as f64;
    let var = bm.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    (mean, T_QUANTILE * (var / BATCHES as f64).sqrt())
}

/// Labels a replication from its work series and second-half empty counts.
///
/// Stable when the second-half slope lies in `(−ε, ε)` and every queue is
/// empty in at least a `min_empty_rate` fraction of those slots; unstable
/// when the slope exceeds `ε` and some queue never empties; otherwise
/// inconclusive. `ε = epsilon_factor ×` mean arriving work per slot.
pub fn classify_stability(
    work: &[f64],
    messages: &[u64],
    empty_visits: &[u64],
    mean_arriving_work: f64,
    cfg: ClassifierConfig,
) -> StabilityVerdict {
    let half = work.len() / 2;
    let tail = &work[half..];
    let span = (work.len() - half).max(1) as f64;
    let q: Vec<f64> = messages[half..].iter().map(|&m| m as f64).collect();
    let (mean_queue, mean_queue_ci) = batch_means(&q);
    let min_empty_rate = empty_visits
        .iter()
        .map(|&c| c as f64 / span)
        .fold(1.0, f64::min);
    if tail.iter().all(|&w| w == 0.0) {
        return StabilityVerdict {
            label: StabilityLabel::Stable,
            slope: 0.0,
            epsilon: cfg.epsilon_factor * mean_arriving_work,
            min_empty_rate,
            mean_queue,
            mean_queue_ci,
        };
    }
    let slope = ls_slope(tail);
    let eps = cfg.epsilon_factor * mean_arriving_work;
    let label = if slope > eps && empty_visits.contains(&0) {
        StabilityLabel::Unstable
    } else if slope.abs() < eps && min_empty_rate >= cfg.min_empty_rate {
        StabilityLabel::Stable
    } else {
        StabilityLabel::Inconclusive
    };
    StabilityVerdict {
        label,
        slope,
        epsilon: eps,
        min_empty_rate,
        mean_queue,
        mean_queue_ci,
    }
}

/// Everything recorded in one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub replication: u64,
    pub horizon: u64,
    /// `n(α)` after each slot.
    #[serde(skip)]
    pub total_messages: Vec<u64>,
    /// Total residual work after each slot.
    #[serde(skip)]
    pub total_work: Vec<f64>,
    /// Second-half slots in which each watched queue was empty.
    pub empty_visits: Vec<u64>,
    /// Sojourn times per class.
    #[serde(skip)]
    pub sojourns: Vec<Vec<u64>>,
    pub verdict: StabilityVerdict,
}

impl ReplicationReport {
    /// Time series as CSV with columns `slot,total_messages,total_work`.
    pub fn series_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["slot", "total_messages", "total_work"])
            .map_err(|e| Error::Io(e.to_string()))?;
        for (t, (m, x)) in self.total_messages.iter().zip(&self.total_work).enumerate() {
            w.write_record([t.to_string(), m.to_string(), format!("{x:.6}")])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Aggregated output of [`Simulator::run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub mode: Mode,
    pub config: SimConfig,
    pub stable: usize,
    pub unstable: usize,
    pub inconclusive: usize,
    pub replications: Vec<ReplicationReport>,
}

impl SimReport {
    fn new(mode: Mode, config: SimConfig, replications: Vec<ReplicationReport>) -> Self {
        let count = |l| replications.iter().filter(|r| r.verdict.label == l).count();
        Self {
            mode,
            config,
            stable: count(StabilityLabel::Stable),
            unstable: count(StabilityLabel::Unstable),
            inconclusive: count(StabilityLabel::Inconclusive),
            replications,
        }
    }

    /// Majority label; ties resolve to inconclusive.
    pub fn verdict(&self) -> StabilityLabel {
        let n = self.replications.len();
        if 2 * self.stable > n {
            StabilityLabel::Stable
        } else if 2 * self.unstable > n {
            StabilityLabel::Unstable
        } else {
            StabilityLabel::Inconclusive
        }
    }
}

/// Delay statistics of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SojournStats {
    pub mean: f64,
    pub ci_half_width: f64,
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

/// Sojourn summary of one class; `stats` is absent when there were too few
/// departures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSojourn {
    pub class: usize,
    pub departures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<SojournStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

/// Minimum departures for sojourn statistics.
pub const MIN_DEPARTURES: usize = 100;

/// Per-class mean and percentile delays pooled over replications.
pub fn sojourn_stats(report: &SimReport) -> Vec<ClassSojourn> {
    let classes = report.replications.first().map_or(0, |r| r.sojourns.len());
    (0..classes)
        .map(|j| {
            let mut d: Vec<u64> = report
                .replications
                .iter()
                .flat_map(|r| r.sojourns[j].iter().copied())
                .collect();
            let departures = d.len();
            if departures < MIN_DEPARTURES {
                return ClassSojourn {
                    class: j,
                    departures,
                    stats: None,
                    flag: Some(format!(
                        "only {departures} departures, need {MIN_DEPARTURES}"
                    )),
                };
            }
            let y: Vec<f64> = d.iter().map(|&v| v as f64).collect();
            let (mean, ci) = batch_means(&y);
            d.sort_unstable();
            let pct = |p: f64| d[(((departures - 1) as f64) * p).round() as usize];
            ClassSojourn {
                class: j,
                departures,
                stats: Some(SojournStats {
                    mean,
                    ci_half_width: ci,
                    p50: pct(0.5),
                    p90: pct(0.9),
                    p99: pct(0.99),
                    max: d[departures - 1],
                }),
                flag: None,
            }
        })
        .collect()
}
