//! Schedules, the sub-schedule lattice and the three stationary policy
//! families.

use std::collections::{BTreeMap, HashMap};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of simultaneously served messages per class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule(Vec<usize>);

impl Schedule {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    pub fn zero(classes: usize) -> Self {
        Self(vec![0; classes])
    }

    pub fn unit(classes: usize, j: usize) -> Self {
        let mut v = vec![0; classes];
        v[j] = 1;
        Self(v)
    }

    pub fn classes(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, j: usize) -> usize {
        self.0[j]
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Classes with `s_j > 0`.
    pub fn active(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&j| self.0[j] > 0).collect()
    }

    /// `self ⪯ other` componentwise.
    pub fn is_subschedule_of(&self, other: &Schedule) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The schedule set `𝒮_K` in lexicographic order.
#[derive(Debug, Clone)]
pub struct ScheduleSpace {
    classes: usize,
    k: usize,
    schedules: Vec<Schedule>,
    index: HashMap<Schedule, usize>,
}

/// Enumerates `{s : Σ s_j ≤ K}` for `J` classes.
pub fn enumerate_schedules(classes: usize, k: usize) -> Result<ScheduleSpace> {
    if classes == 0 || k == 0 {
        return Err(Error::InvalidParameter("J and K must be at least 1".into()));
    }
    fn rec(prefix: &mut Vec<usize>, left: usize, classes: usize, out: &mut Vec<Schedule>) {
        if prefix.len() == classes {
            out.push(Schedule(prefix.clone()));
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            rec(prefix, left - c, classes, out);
            prefix.pop();
        }
    }
    let mut schedules = Vec::new();
    rec(&mut Vec::with_capacity(classes), k, classes, &mut schedules);
    let index = schedules
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(ScheduleSpace {
        classes,
        k,
        schedules,
        index,
    })
}

impl ScheduleSpace {
    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.schedules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schedules.is_empty()
    }

    pub fn schedules(&self) -> &[Schedule] {
        &self.schedules
    }

    pub fn index_of(&self, s: &Schedule) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// `𝒮̄_K`: schedules using all `K` slots.
    pub fn full(&self) -> impl Iterator<Item = &Schedule> + '_ {
        self.schedules.iter().filter(move |s| s.total() == self.k)
    }

    /// Non-empty schedules.
    pub fn nonempty(&self) -> impl Iterator<Item = &Schedule> + '_ {
        self.schedules.iter().filter(|s| !s.is_empty())
    }

    pub fn contains(&self, s: &Schedule) -> bool {
        self.index.contains_key(s)
    }
}

/// `s*_j = min(s_j, n_j)`.
pub fn maximal_subschedule(s: &Schedule, n: &[usize]) -> Schedule {
    Schedule(s.0.iter().zip(n).map(|(&a, &b)| a.min(b)).collect())
}

/// One weighted entry of a schedule distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSchedule {
    pub s: Schedule,
    pub w: f64,
}

/// A probability distribution `p^ω` over schedules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<WeightedSchedule>", into = "Vec<WeightedSchedule>")]
pub struct ScheduleDistribution {
    entries: Vec<WeightedSchedule>,
}

impl TryFrom<Vec<WeightedSchedule>> for ScheduleDistribution {
    type Error = Error;
    fn try_from(v: Vec<WeightedSchedule>) -> Result<Self> {
        ScheduleDistribution::new(v)
    }
}

impl From<ScheduleDistribution> for Vec<WeightedSchedule> {
    fn from(d: ScheduleDistribution) -> Self {
        d.entries
    }
}

impl ScheduleDistribution {
    pub fn new(entries: Vec<WeightedSchedule>) -> Result<Self> {
        let w: Vec<f64> = entries.iter().map(|e| e.w).collect();
        crate::channel::check_distribution("schedule distribution", &w)?;
        if let Some(first) = entries.first() {
            if entries.iter().any(|e| e.s.classes() != first.s.classes()) {
                return Err(Error::DimensionMismatch(
                    "schedules of different lengths in one distribution".into(),
                ));
            }
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = entries.iter().find(|e| !seen.insert(&e.s)) {
            return Err(Error::Config(format!("schedule {} listed twice", dup.s)));
        }
        Ok(Self { entries })
    }

    pub fn point(s: Schedule) -> Self {
        Self {
            entries: vec![WeightedSchedule { s, w: 1.0 }],
        }
    }

    /// Builds a distribution from `(schedule, weight)` pairs, dropping zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Schedule, f64)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .filter(|(_, w)| *w > 0.0)
                .map(|(s, w)| WeightedSchedule { s, w })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[WeightedSchedule] {
        &self.entries
    }

    pub fn weight_of(&self, s: &Schedule) -> f64 {
        self.entries.iter().find(|e| &e.s == s).map_or(0.0, |e| e.w)
    }

    pub fn check_space(&self, space: &ScheduleSpace) -> Result<()> {
        for e in &self.entries {
            if !space.contains(&e.s) {
                return Err(Error::Config(format!(
                    "schedule {} is not in S_K for J = {}, K = {}",
                    e.s,
                    space.classes(),
                    space.k()
                )));
            }
        }
        Ok(())
    }
}

/// Pushforward of `p^ω` through `t ↦ t*(t, α)` for queue lengths `n`.
pub fn induced_distribution(p: &ScheduleDistribution, n: &[usize]) -> BTreeMap<Schedule, f64> {
    let mut out = BTreeMap::new();
    for e in &p.entries {
        *out.entry(maximal_subschedule(&e.s, n)).or_insert(0.0) += e.w;
    }
    out
}

/// Per-subclass counts on a single schedule slice `s`.
///
/// Subclass actions always act on one slice, so the full `(j, s)` vector is
/// stored as the slice index plus one count per class; all other slices are
/// zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubclassSchedule {
    pub slice: usize,
    pub counts: Vec<usize>,
}

impl SubclassSchedule {
    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Control quantities of one slice: ongoing cohort, fresh counts and the
/// maximal subclass sub-schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubclassControls {
    pub eta: Vec<usize>,
    pub beta: Vec<usize>,
    pub z_star: Vec<usize>,
}

/// Computes `η(α, s)`, `β_{·s}(α)` and `z*(α, s)` from the per-class FIFO
/// residuals of slice `s` with codeword length `n_s`.
pub fn subclass_controls(residuals: &[Vec<u32>], s: &Schedule, n_s: u32) -> SubclassControls {
    let eta = residuals
        .iter()
        .map(|q| q.iter().filter(|&&x| x > 0 && x < n_s).count())
        .collect();
    let beta = residuals
        .iter()
        .map(|q| q.iter().filter(|&&x| x == n_s).count())
        .collect();
    let z_star = residuals
        .iter()
        .zip(s.counts())
        .map(|(q, &sj)| sj.min(q.len()))
        .collect();
    SubclassControls { eta, beta, z_star }
}

/// Policy family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    NonIdling,
    StateIndependent,
    SubclassStateIndependent,
}

/// Rule used by non-idling policies to pick among feasible full schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Restrict `p^ω` to the feasible full schedules and renormalize.
    #[default]
    Renormalize,
    /// Largest `Σ s_j φ_j(s)`, ties to the lexicographically first.
    Maxweight,
}

/// Policy as described in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// `p^ω`. Optional for non-idling policies, where it defaults to uniform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<ScheduleDistribution>,
    #[serde(default)]
    pub tie_break: TieBreak,
}

impl PolicySpec {
    pub fn non_idling(tie_break: TieBreak) -> Self {
        Self {
            kind: PolicyKind::NonIdling,
            p: None,
            tie_break,
        }
    }

    pub fn state_independent(p: ScheduleDistribution) -> Self {
        Self {
            kind: PolicyKind::StateIndependent,
            p: Some(p),
            tie_break: TieBreak::Renormalize,
        }
    }

    pub fn subclass(p: ScheduleDistribution) -> Self {
        Self {
            kind: PolicyKind::SubclassStateIndependent,
            p: Some(p),
            tie_break: TieBreak::Renormalize,
        }
    }

    pub fn validate(&self, space: &ScheduleSpace) -> Result<()> {
        match (&self.p, self.kind) {
            (None, PolicyKind::NonIdling) => Ok(()),
            (None, _) => Err(Error::Config(
                "policy needs a schedule distribution p".into(),
            )),
            (Some(p), _) => p.check_space(space),
        }
    }
}

/// A policy bound to a schedule space, ready to act.
#[derive(Debug, Clone)]
pub struct Policy {
    spec: PolicySpec,
    k: usize,
    support: Vec<Schedule>,
    sampler: Option<WeightedIndex<f64>>,
    full: Vec<(Schedule, f64, f64)>,
}

impl Policy {
    /// `weight` gives `Σ s_j φ_j(s)` for the maxweight tie-break and may
    /// return anything for other policies.
    pub fn new(
        spec: PolicySpec,
        space: &ScheduleSpace,
        mut weight: impl FnMut(&Schedule) -> f64,
    ) -> Result<Self> {
        spec.validate(space)?;
        let (support, sampler) = match &spec.p {
            Some(p) => {
                let support: Vec<Schedule> = p.entries().iter().map(|e| e.s.clone()).collect();
                let sampler = WeightedIndex::new(p.entries().iter().map(|e| e.w))
                    .map_err(|e| Error::Config(format!("policy weights: {e}")))?;
                (support, Some(sampler))
            }
            None => (Vec::new(), None),
        };
        let full = if spec.kind == PolicyKind::NonIdling {
            space
                .full()
                .map(|s| {
                    let p = spec.p.as_ref().map_or(1.0, |p| p.weight_of(s));
                    (s.clone(), p, weight(s))
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self {
            spec,
            k: space.k(),
            support,
            sampler,
            full,
        })
    }

    pub fn kind(&self) -> PolicyKind {
        self.spec.kind
    }

    pub fn spec(&self) -> &PolicySpec {
        &self.spec
    }

    /// Support of `p^ω`, in the order of its entries.
    pub fn support(&self) -> &[Schedule] {
        &self.support
    }

    /// Index into [`Policy::support`] sampled from `p^ω`.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        self.sampler.as_ref().map(|d| d.sample(rng))
    }

    /// Action for class-level policies given queue lengths `n`.
    pub fn choose_schedule<R: Rng + ?Sized>(&self, n: &[usize], rng: &mut R) -> Result<Schedule> {
        match self.spec.kind {
            PolicyKind::StateIndependent => {
                let i = self.sample_index(rng).expect("validated");
                Ok(maximal_subschedule(&self.support[i], n))
            }
            PolicyKind::NonIdling => Ok(self.non_idling(n, rng)),
            PolicyKind::SubclassStateIndependent => Err(Error::ModeMismatch(
                "subclass policy needs subclass state".into(),
            )),
        }
    }

    fn non_idling<R: Rng + ?Sized>(&self, n: &[usize], rng: &mut R) -> Schedule {
        if n.iter().sum::<usize>() < self.k {
            return Schedule(n.to_vec());
        }
        let feasible: Vec<&(Schedule, f64, f64)> = self
            .full
            .iter()
            .filter(|(s, _, _)| s.0.iter().zip(n).all(|(a, b)| a <= b))
            .collect();
        assert!(!feasible.is_empty(), "n >= K always admits a full schedule");
        match self.spec.tie_break {
            TieBreak::Maxweight => {
                let mut best = feasible[0];
                for c in &feasible[1..] {
                    if c.2 > best.2 {
                        best = c;
                    }
                }
                best.0.clone()
            }
            TieBreak::Renormalize => {
                let mass: f64 = feasible.iter().map(|c| c.1).sum();
                if mass > 0.0 {
                    let mut u = rng.random::<f64>() * mass;
                    for c in &feasible {
                        if c.1 > 0.0 {
                            if u < c.1 {
                                return c.0.clone();
                            }
                            u -= c.1;
                        }
                    }
                    feasible.iter().rev().find(|c| c.1 > 0.0).unwrap().0.clone()
                } else {
                    feasible[rng.random_range(0..feasible.len())].0.clone()
                }
            }
        }
    }

    /// Action for the subclass policy on the slices exposed by `view`; slice
    /// `i` belongs to support schedule `i`.
    pub fn choose_subclass<V: SubclassView + ?Sized, R: Rng + ?Sized>(
        &self,
        view: &V,
        rng: &mut R,
    ) -> Result<SubclassSchedule> {
        if self.spec.kind != PolicyKind::SubclassStateIndependent {
            return Err(Error::ModeMismatch(
                "class-level policy cannot act on subclass state".into(),
            ));
        }
        let i = self.sample_index(rng).expect("validated");
        let s = &self.support[i];
        let eta: Vec<usize> = (0..s.classes()).map(|j| view.ongoing(i, j)).collect();
        let counts = if eta.iter().any(|&e| e > 0) {
            eta
        } else {
            (0..s.classes())
                .map(|j| s.get(j).min(view.queued(i, j)))
                .collect()
        };
        Ok(SubclassSchedule { slice: i, counts })
    }
}

/// Read access to subclass queues, as needed by the subclass policy.
pub trait SubclassView {
    /// Number of class-`j` messages in slice `slice`.
    fn queued(&self, slice: usize, j: usize) -> usize;
    /// Number of class-`j` messages in slice `slice` whose transmission has
    /// started (`η`).
    fn ongoing(&self, slice: usize, j: usize) -> usize;
}

/// Plain residual lists: `slices[i][j]` is the FIFO of class `j` in slice
/// `i`, `lengths[i]` the codeword length of that slice.
#[derive(Debug, Clone, Copy)]
pub struct ResidualSlices<'a> {
    pub slices: &'a [Vec<Vec<u32>>],
    pub lengths: &'a [u32],
}

impl SubclassView for ResidualSlices<'_> {
    fn queued(&self, slice: usize, j: usize) -> usize {
        self.slices[slice][j].len()
    }

    fn ongoing(&self, slice: usize, j: usize) -> usize {
        let n = self.lengths[slice];
        self.slices[slice][j]
            .iter()
            .filter(|&&x| x > 0 && x < n)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn enumeration_sizes_and_order() {
        let s = enumerate_schedules(1, 1).unwrap();
        assert_eq!(
            s.schedules(),
            &[Schedule::new(vec![0]), Schedule::new(vec![1])]
        );
        let s = enumerate_schedules(2, 2).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.schedules().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(enumerate_schedules(2, 3).unwrap().full().count(), 4);
        for j in 1..5 {
            for k in 1..7 {
                assert_eq!(enumerate_schedules(j, k).unwrap().len(), binom(j + k, j));
            }
        }
        assert!(enumerate_schedules(0, 3).is_err());
    }

    #[test]
    fn maximal_subschedule_cases() {
        let s = Schedule::new(vec![2, 1]);
        assert_eq!(maximal_subschedule(&s, &[0, 0]), Schedule::zero(2));
        assert_eq!(maximal_subschedule(&s, &[5, 5]), s);
        assert_eq!(maximal_subschedule(&s, &[1, 3]), Schedule::new(vec![1, 1]));
    }

    #[test]
    fn induced_distribution_cases() {
        let p = ScheduleDistribution::from_pairs([
            (Schedule::new(vec![1]), 0.3),
            (Schedule::new(vec![2]), 0.7),
        ])
        .unwrap();
        let d = induced_distribution(&p, &[1]);
        assert_eq!(d.len(), 1);
        assert_eq!(d[&Schedule::new(vec![1])], 1.0);
        let d = induced_distribution(&p, &[0]);
        assert_eq!(d[&Schedule::new(vec![0])], 1.0);
        let d = induced_distribution(&p, &[2]);
        assert_eq!(d[&Schedule::new(vec![2])], 0.7);
    }

    #[test]
    fn subclass_control_counts() {
        let s = Schedule::new(vec![2]);
        let c = subclass_controls(&[vec![5, 5, 5]], &s, 5);
        assert_eq!((c.eta, c.beta, c.z_star), (vec![0], vec![3], vec![2]));
        let c = subclass_controls(&[vec![4, 5, 5]], &s, 5);
        assert_eq!((c.eta, c.beta, c.z_star), (vec![1], vec![2], vec![2]));
    }

    #[test]
    fn distribution_validation() {
        assert!(ScheduleDistribution::from_pairs([(Schedule::new(vec![1]), 0.5)]).is_err());
        let dup = vec![
            WeightedSchedule {
                s: Schedule::new(vec![1]),
                w: 0.5,
            },
            WeightedSchedule {
                s: Schedule::new(vec![1]),
                w: 0.5,
            },
        ];
        assert!(ScheduleDistribution::new(dup).is_err());
    }

    #[test]
    fn policy_json_shape() {
        let json =
            r#"{"kind":"state_independent","p":[{"s":[1,0],"w":0.25},{"s":[0,2],"w":0.75}]}"#;
        let p: PolicySpec = serde_json::from_str(json).unwrap();
        assert_eq!(p.kind, PolicyKind::StateIndependent);
        assert_eq!(p.tie_break, TieBreak::Renormalize);
        let ni: PolicySpec =
            serde_json::from_str(r#"{"kind":"non_idling","tie_break":"maxweight"}"#).unwrap();
        assert_eq!(ni.tie_break, TieBreak::Maxweight);
    }

    #[test]
    fn point_mass_saturated() {
        let space = enumerate_schedules(2, 3).unwrap();
        let s0 = Schedule::new(vec![1, 2]);
        let pol = Policy::new(
            PolicySpec::state_independent(ScheduleDistribution::point(s0.clone())),
            &space,
            |_| 0.0,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(pol.choose_schedule(&[9, 9], &mut rng).unwrap(), s0);
        }
        assert_eq!(
            pol.choose_schedule(&[0, 0], &mut rng).unwrap(),
            Schedule::zero(2)
        );
    }

    #[test]
    fn non_idling_behaviour() {
        let space = enumerate_schedules(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pol = Policy::new(
            PolicySpec::non_idling(TieBreak::Renormalize),
            &space,
            |_| 0.0,
        )
        .unwrap();
        assert_eq!(
            pol.choose_schedule(&[1, 1], &mut rng).unwrap(),
            Schedule::new(vec![1, 1])
        );
        assert_eq!(
            pol.choose_schedule(&[0, 0], &mut rng).unwrap(),
            Schedule::zero(2)
        );
        for _ in 0..50 {
            let s = pol.choose_schedule(&[1, 5], &mut rng).unwrap();
            assert_eq!(s.total(), 3);
            assert!(s.get(0) <= 1);
        }
        let mw = Policy::new(PolicySpec::non_idling(TieBreak::Maxweight), &space, |s| {
            s.get(1) as f64
        })
        .unwrap();
        assert_eq!(
            mw.choose_schedule(&[4, 4], &mut rng).unwrap(),
            Schedule::new(vec![0, 3])
        );
        assert_eq!(
            mw.choose_schedule(&[4, 2], &mut rng).unwrap(),
            Schedule::new(vec![1, 2])
        );
    }

    #[test]
    fn non_idling_zero_mass_falls_back() {
        let space = enumerate_schedules(2, 2).unwrap();
        let spec = PolicySpec {
            kind: PolicyKind::NonIdling,
            p: Some(ScheduleDistribution::point(Schedule::new(vec![2, 0]))),
            tie_break: TieBreak::Renormalize,
        };
        let pol = Policy::new(spec, &space, |_| 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            pol.choose_schedule(&[5, 0], &mut rng).unwrap(),
            Schedule::new(vec![2, 0])
        );
        let s = pol.choose_schedule(&[1, 5], &mut rng).unwrap();
        assert_eq!(s.total(), 2);
    }

    #[test]
    fn subclass_prefers_ongoing() {
        let space = enumerate_schedules(1, 2).unwrap();
        let pol = Policy::new(
            PolicySpec::subclass(ScheduleDistribution::point(Schedule::new(vec![2]))),
            &space,
            |_| 0.0,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let view = |q: Vec<u32>| vec![vec![q]];
        let mid = view(vec![3, 5, 5]);
        let a = pol
            .choose_subclass(
                &ResidualSlices {
                    slices: &mid,
                    lengths: &[5],
                },
                &mut rng,
            )
            .unwrap();
        assert_eq!(a.counts, vec![1]);
        let fresh = view(vec![5, 5, 5]);
        let a = pol
            .choose_subclass(
                &ResidualSlices {
                    slices: &fresh,
                    lengths: &[5],
                },
                &mut rng,
            )
            .unwrap();
        assert_eq!(a.counts, vec![2]);
        let empty = view(vec![]);
        let a = pol
            .choose_subclass(
                &ResidualSlices {
                    slices: &empty,
                    lengths: &[5],
                },
                &mut rng,
            )
            .unwrap();
        assert!(a.is_empty());
        assert!(pol.choose_schedule(&[1], &mut rng).is_err());
    }
}
