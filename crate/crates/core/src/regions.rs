//! Stability thresholds, rate regions and their capacity interpretations.
//!
//! Arrival rates `𝔼A` are messages per slot. In independent-decoding mode
//! the analysis uses the service requirements `S_j` and the quanta
//! `φ_j(s)`; in joint and broadcast mode it uses the codeword lengths
//! `N(s)`. Both lead to a finite generator set `{r(s)}` whose convex hull,
//! closed downwards, is the outer bound on what any stationary policy can
//! stabilize.

use serde::{Deserialize, Serialize};

use crate::channel::{GaussianMacSpec, RateConstraints};
use crate::codelen::MessageClass;
use crate::error::{Error, Result};
use crate::exponents::{e0_gaussian_quantum, RhoParam};
use crate::lp;
use crate::sched::{Schedule, ScheduleDistribution, ScheduleSpace};

/// Service quanta `φ_j(s)` for every schedule of a space.
#[derive(Debug, Clone)]
pub struct Quanta {
    space: ScheduleSpace,
    table: Vec<Vec<f64>>,
}

impl Quanta {
    /// Tabulates `f(s, j)` for every `s` and every `j` with `s_j > 0`.
    pub fn from_fn(
        space: ScheduleSpace,
        mut f: impl FnMut(&Schedule, usize) -> Result<f64>,
    ) -> Result<Self> {
        let j = space.classes();
        let table = space
            .schedules()
            .iter()
            .map(|s| {
                (0..j)
                    .map(|c| if s.get(c) > 0 { f(s, c) } else { Ok(0.0) })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, table })
    }

    /// Closed-form Gaussian quanta.
    pub fn gaussian(spec: &GaussianMacSpec, space: ScheduleSpace, rho: RhoParam) -> Result<Self> {
        if spec.classes() != space.classes() {
            return Err(Error::DimensionMismatch(format!(
                "{} SNRs for {} classes",
                spec.classes(),
                space.classes()
            )));
        }
        Self::from_fn(space, |s, j| e0_gaussian_quantum(spec, s, j, rho))
    }

    pub fn space(&self) -> &ScheduleSpace {
        &self.space
    }

    pub fn get(&self, s: &Schedule) -> &[f64] {
        &self.table[self.space.index_of(s).expect("schedule in space")]
    }

    /// `Σ_j s_j φ_j(s)`, optionally restricted to classes in `b`.
    pub fn offered(&self, s: &Schedule, b: Option<&[usize]>) -> f64 {
        let phi = self.get(s);
        (0..phi.len())
            .filter(|j| b.is_none_or(|b| b.contains(j)))
            .map(|j| s.get(j) as f64 * phi[j])
            .sum()
    }

    /// `φ̲_j`: smallest quantum over full schedules that serve class `j`.
    pub fn lower(&self) -> Vec<f64> {
        (0..self.space.classes())
            .map(|j| {
                self.space
                    .full()
                    .filter(|s| s.get(j) > 0)
                    .map(|s| self.get(s)[j])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// `φ̄_j`: largest quantum over all schedules that serve class `j`.
    pub fn upper(&self) -> Vec<f64> {
        (0..self.space.classes())
            .map(|j| {
                self.space
                    .schedules()
                    .iter()
                    .filter(|s| s.get(j) > 0)
                    .map(|s| self.get(s)[j])
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

fn check_len(what: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {} entries, expected {n}",
            v.len()
        )));
    }
    Ok(())
}

/// Largest `t` with `t · (a·d) < rhs`, i.e. `rhs / (a·d)`; infinite when
/// the direction loads nothing.
fn scale_limit(coeffs: &[f64], d: &[f64], rhs: f64) -> f64 {
    let load: f64 = coeffs.iter().zip(d).map(|(a, b)| a * b).sum();
    if load > 0.0 {
        rhs / load
    } else {
        f64::INFINITY
    }
}

/// The two sufficient conditions for stability of every non-idling policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonIdlingBounds {
    pub k: usize,
    /// `⌈S_j / φ̲_j⌉`.
    pub slot_counts: Vec<f64>,
    /// `S_j + φ̄_j`.
    pub padded_requirements: Vec<f64>,
    /// `min_{s ∈ 𝒮̄_K} Σ_j s_j φ_j(s)`.
    pub min_full_service: f64,
}

impl NonIdlingBounds {
    /// `Σ_j 𝔼A_j ⌈S_j/φ̲_j⌉ < K`.
    pub fn first_holds(&self, ea: &[f64]) -> bool {
        ea.iter()
            .zip(&self.slot_counts)
            .map(|(a, c)| a * c)
            .sum::<f64>()
            < self.k as f64
    }

    /// `Σ_j 𝔼A_j (S_j + φ̄_j) < min_{𝒮̄_K} Σ s_j φ_j(s)`.
    pub fn second_holds(&self, ea: &[f64]) -> bool {
        ea.iter()
            .zip(&self.padded_requirements)
            .map(|(a, c)| a * c)
            .sum::<f64>()
            < self.min_full_service
    }

    pub fn holds(&self, ea: &[f64]) -> bool {
        self.first_holds(ea) || self.second_holds(ea)
    }

    /// Supremum of `t` with `t·d` passing the first condition.
    pub fn first_threshold(&self, d: &[f64]) -> f64 {
        scale_limit(&self.slot_counts, d, self.k as f64)
    }

    /// Supremum of `t` with `t·d` passing the second condition.
    pub fn second_threshold(&self, d: &[f64]) -> f64 {
        scale_limit(&self.padded_requirements, d, self.min_full_service)
    }

    /// The better of the two.
    pub fn threshold(&self, d: &[f64]) -> f64 {
        self.first_threshold(d).max(self.second_threshold(d))
    }
}

/// Inner bounds valid for every non-idling policy.
pub fn nonidling_inner_bounds(requirements: &[f64], quanta: &Quanta) -> Result<NonIdlingBounds> {
    let space = quanta.space();
    check_len("requirements", requirements, space.classes())?;
    let lower = quanta.lower();
    let upper = quanta.upper();
    let min_full_service = space
        .full()
        .map(|s| quanta.offered(s, None))
        .fold(f64::INFINITY, f64::min);
    Ok(NonIdlingBounds {
        k: space.k(),
        slot_counts: requirements
            .iter()
            .zip(&lower)
            .map(|(s, l)| (s / l - 1e-12).ceil().max(1.0))
            .collect(),
        padded_requirements: requirements
            .iter()
            .zip(&upper)
            .map(|(s, u)| s + u)
            .collect(),
        min_full_service,
    })
}

/// Sufficient condition for transience of every non-idling policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransienceBound {
    pub subset: Vec<usize>,
    /// `S_j` for `j` in the subset, zero elsewhere.
    pub weights: Vec<f64>,
    /// `max_{s ∈ 𝒮̄_K} Σ_{j∈B} s_j φ_j(s)`.
    pub rhs: f64,
}

impl TransienceBound {
    /// `Σ_{j∈B} S_j 𝔼A_j ≥ rhs`.
    pub fn holds(&self, ea: &[f64]) -> bool {
        ea.iter()
            .zip(&self.weights)
            .map(|(a, w)| a * w)
            .sum::<f64>()
            >= self.rhs
    }

    /// Smallest `t` with `t·d` transient.
    pub fn threshold(&self, d: &[f64]) -> f64 {
        scale_limit(&self.weights, d, self.rhs)
    }
}

pub fn nonidling_transience_bound(
    requirements: &[f64],
    quanta: &Quanta,
    subset: &[usize],
) -> Result<TransienceBound> {
    let space = quanta.space();
    check_len("requirements", requirements, space.classes())?;
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(j) = subset.iter().find(|&&j| j >= space.classes()) {
        return Err(Error::InvalidIndex(format!("class {j}")));
    }
    let rhs = space
        .full()
        .map(|s| quanta.offered(s, Some(subset)))
        .fold(0.0, f64::max);
    let weights = (0..space.classes())
        .map(|j| {
            if subset.contains(&j) {
                requirements[j]
            } else {
                0.0
            }
        })
        .collect();
    Ok(TransienceBound {
        subset: subset.to_vec(),
        weights,
        rhs,
    })
}

/// Per-class thresholds `𝔼A_j < Σ_s p(s) s_j φ_j(s) / (S_j + φ̄_j)` for a
/// state-independent policy.
pub fn state_independent_region(
    requirements: &[f64],
    quanta: &Quanta,
    p: &ScheduleDistribution,
) -> Result<Vec<f64>> {
    let space = quanta.space();
    check_len("requirements", requirements, space.classes())?;
    p.check_space(space)?;
    let upper = quanta.upper();
    Ok((0..space.classes())
        .map(|j| {
            let served: f64 = p
                .entries()
                .iter()
                .map(|e| e.w * e.s.get(j) as f64 * quanta.get(&e.s)[j])
                .sum();
            served / (requirements[j] + upper[j])
        })
        .collect())
}

/// A schedule together with its rate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateVector {
    pub s: Schedule,
    pub r: Vec<f64>,
}

/// `r_j(s) = s_j φ_j(s) / S_j`.
pub fn rate_vectors_independent(requirements: &[f64], quanta: &Quanta) -> Result<Vec<RateVector>> {
    check_len("requirements", requirements, quanta.space().classes())?;
    Ok(quanta
        .space()
        .schedules()
        .iter()
        .map(|s| RateVector {
            s: s.clone(),
            r: quanta
                .get(s)
                .iter()
                .zip(requirements)
                .enumerate()
                .map(|(j, (phi, req))| s.get(j) as f64 * phi / req)
                .collect(),
        })
        .collect())
}

/// `r′_j(s) = s_j φ_j(s) / (S_j + φ̄_j)`: generators whose hull is reached
/// by state-independent policies.
pub fn padded_rate_vectors(requirements: &[f64], quanta: &Quanta) -> Result<Vec<RateVector>> {
    check_len("requirements", requirements, quanta.space().classes())?;
    let upper = quanta.upper();
    let padded: Vec<f64> = requirements
        .iter()
        .zip(&upper)
        .map(|(s, u)| s + u)
        .collect();
    rate_vectors_independent(&padded, quanta)
}

/// `r_j(s) = s_j / N(s)`; `lengths` is indexed like `space.schedules()`.
pub fn rate_vectors_joint(
    space: &ScheduleSpace,
    lengths: &[Option<u64>],
) -> Result<Vec<RateVector>> {
    if lengths.len() != space.len() {
        return Err(Error::DimensionMismatch("one length per schedule".into()));
    }
    space
        .schedules()
        .iter()
        .zip(lengths)
        .map(|(s, n)| {
            let r = match n {
                None if s.is_empty() => vec![0.0; s.classes()],
                None => return Err(Error::Config(format!("no codeword length for {s}"))),
                Some(n) => s.counts().iter().map(|&c| c as f64 / *n as f64).collect(),
            };
            Ok(RateVector { s: s.clone(), r })
        })
        .collect()
}

/// Joint-decoding thresholds of a state-independent subclass policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointRegion {
    /// `(s, p(s) s_j / N(s))` per support schedule: `𝔼A_{js} <` this.
    pub subclass: Vec<(Schedule, Vec<f64>)>,
    /// `Σ_s p(s) r_j(s)`: `𝔼A_j <` this.
    pub class: Vec<f64>,
}

pub fn joint_region(
    space: &ScheduleSpace,
    lengths: &[Option<u64>],
    p: &ScheduleDistribution,
) -> Result<JointRegion> {
    p.check_space(space)?;
    let gens = rate_vectors_joint(space, lengths)?;
    let mut class = vec![0.0; space.classes()];
    let subclass = p
        .entries()
        .iter()
        .map(|e| {
            let r = &gens[space.index_of(&e.s).expect("checked")].r;
            let t: Vec<f64> = r.iter().map(|v| e.w * v).collect();
            for (c, v) in class.iter_mut().zip(&t) {
                *c += v;
            }
            (e.s.clone(), t)
        })
        .collect();
    Ok(JointRegion { subclass, class })
}

/// Outcome of the hull-membership program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub inside: bool,
    /// Largest `λ` with `λ 𝔼A` covered by a sub-probability mix of generators.
    pub lambda: f64,
    /// Mixing weights `π_s` attaining `lambda`, one per generator.
    pub weights: Vec<f64>,
    /// When outside: `y ≥ 0` with `y·𝔼A ≥ 1 > max_s y·r(s)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<f64>>,
}

/// Solves `max λ  s.t.  λ 𝔼A ≤ Σ_s π_s r(s), Σ π_s ≤ 1, π, λ ≥ 0`.
///
/// `𝔼A` is inside the outer bound iff the optimum is at least one.
pub fn outer_membership(ea: &[f64], generators: &[Vec<f64>]) -> Result<Membership> {
    let j = ea.len();
    if generators.iter().any(|g| g.len() != j) {
        return Err(Error::DimensionMismatch(
            "generator length differs from EA".into(),
        ));
    }
    if ea.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
        return Err(Error::InvalidParameter(
            "arrival rates must be finite and >= 0".into(),
        ));
    }
    if ea.iter().all(|&a| a == 0.0) {
        return Ok(Membership {
            inside: true,
            lambda: f64::INFINITY,
            weights: vec![0.0; generators.len()],
            certificate: None,
        });
    }
    let n = generators.len();
    let mut c = vec![0.0; n + 1];
    c[0] = 1.0;
    let mut a = Vec::with_capacity(j + 1);
    for (row, &ea_row) in ea.iter().enumerate() {
        let mut r = Vec::with_capacity(n + 1);
        r.push(ea_row);
        r.extend(generators.iter().map(|g| -g[row]));
        a.push(r);
    }
    let mut total = vec![1.0; n + 1];
    total[0] = 0.0;
    a.push(total);
    let mut b = vec![0.0; j];
    b.push(1.0);
    let sol = lp::maximize(&c, &a, &b)?;
    let lambda = sol.objective;
    let inside = lambda >= 1.0 - 1e-12;
    let certificate = (!inside).then(|| {
        // Rescale so that y·EA = 1 exactly.
        let y: Vec<f64> = sol.dual[..j].to_vec();
        let dot: f64 = y.iter().zip(ea).map(|(a, b)| a * b).sum();
        y.iter().map(|v| v / dot).collect()
    });
    Ok(Membership {
        inside,
        lambda,
        weights: sol.x[1..].to_vec(),
        certificate,
    })
}

/// A state-independent policy that stabilizes a target rate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedPolicy {
    pub p: ScheduleDistribution,
    /// `μ[j][i]`: share of class-`j` arrivals sent to support schedule `i`.
    pub split: Vec<Vec<f64>>,
    /// `1 − 𝔼A_j / Σ_s p(s) r_j(s)` per class.
    pub slack: Vec<f64>,
    pub lambda: f64,
}

/// Builds `p^ω` from the hull weights of `𝔼A` and spreads the leftover
/// mass over every non-empty schedule in proportion to `π_s + 1/n`.
///
/// The generators must be those matching the target inequalities: `s_j/N(s)`
/// for joint and broadcast decoding, the padded `r′` for independent
/// decoding. Points on or outside the boundary are refused.
pub fn synthesize_policy(ea: &[f64], generators: &[RateVector]) -> Result<SynthesizedPolicy> {
    let rows: Vec<Vec<f64>> = generators.iter().map(|g| g.r.clone()).collect();
    let m = outer_membership(ea, &rows)?;
    if !(m.lambda > 1.0 + 1e-9) {
        return Err(Error::NotInterior { lambda: m.lambda });
    }
    let nonempty: Vec<usize> = (0..generators.len())
        .filter(|&i| !generators[i].s.is_empty())
        .collect();
    if nonempty.is_empty() {
        return Err(Error::Config(
            "no non-empty schedule to build a policy from".into(),
        ));
    }
    let floor = 1.0 / nonempty.len() as f64;
    let mut w: Vec<f64> = (0..generators.len())
        .map(|i| {
            if generators[i].s.is_empty() {
                0.0
            } else {
                m.weights[i]
            }
        })
        .collect();
    let idle = (1.0 - w.iter().sum::<f64>()).max(0.0);
    let denom: f64 = nonempty.iter().map(|&i| w[i] + floor).sum();
    for &i in &nonempty {
        w[i] += idle * (m.weights[i] + floor) / denom;
    }
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    let p =
        ScheduleDistribution::from_pairs(support.iter().map(|&i| (generators[i].s.clone(), w[i])))?;
    let classes = ea.len();
    let mut split = vec![vec![0.0; support.len()]; classes];
    let mut slack = vec![1.0; classes];
    for j in 0..classes {
        let served: Vec<f64> = support.iter().map(|&i| w[i] * generators[i].r[j]).collect();
        let tot: f64 = served.iter().sum();
        if tot > 0.0 {
            for (mu, v) in split[j].iter_mut().zip(&served) {
                *mu = v / tot;
            }
            slack[j] = 1.0 - ea[j] / tot;
        } else if ea[j] > 0.0 {
            return Err(Error::NotInterior { lambda: m.lambda });
        }
    }
    Ok(SynthesizedPolicy {
        p,
        split,
        slack,
        lambda: m.lambda,
    })
}

/// Information-theoretic limits of the Gaussian system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCaps {
    /// `K ln(1 + Γ/((K−1)Γ + 1))` per class, as if that class filled all `K` slots.
    pub single_user_limit: Vec<f64>,
    /// `ρ/(1+ρ)`: limit of the per-slot service `K φ((K))` as `K → ∞`.
    pub saturation: f64,
    /// The `K → ∞` limit of the single-user nat throughput.
    pub spectral_limit: f64,
}

/// Nats per channel use the whole MAC can carry as `K → ∞`.
pub const SPECTRAL_LIMIT: f64 = 1.0;

/// `𝒞_j(s) = s_j ln(1 + Γ_j / (Σ_i s_i Γ_i − Γ_j + 1))`.
pub fn interference_limited_capacity(spec: &GaussianMacSpec, s: &Schedule) -> Result<Vec<f64>> {
    let g = spec.snr();
    if s.classes() != g.len() {
        return Err(Error::DimensionMismatch(
            "schedule length differs from SNR count".into(),
        ));
    }
    let load: f64 = s.counts().iter().zip(g).map(|(&c, x)| c as f64 * x).sum();
    Ok((0..g.len())
        .map(|j| {
            if s.get(j) == 0 {
                0.0
            } else {
                s.get(j) as f64 * (g[j] / (load - g[j] + 1.0)).ln_1p()
            }
        })
        .collect())
}

/// `K ln(1 + Γ/((K−1)Γ + 1))`.
pub fn single_user_limit(k: usize, snr: f64) -> f64 {
    k as f64 * (snr / ((k as f64 - 1.0) * snr + 1.0)).ln_1p()
}

/// `ρ / (1 + ρ)`.
pub fn saturation_constant(rho: RhoParam) -> f64 {
    rho.value() / (1.0 + rho.value())
}

pub fn asymptotic_caps(spec: &GaussianMacSpec, k: usize, rho: RhoParam) -> AsymptoticCaps {
    AsymptoticCaps {
        single_user_limit: spec
            .snr()
            .iter()
            .map(|&g| single_user_limit(k, g))
            .collect(),
        saturation: saturation_constant(rho),
        spectral_limit: SPECTRAL_LIMIT,
    }
}

/// `𝔼Ã_j = (ln M_j) 𝔼A_j`.
pub fn nat_rates(classes: &[MessageClass], ea: &[f64]) -> Vec<f64> {
    classes
        .iter()
        .zip(ea)
        .map(|(c, a)| c.ln_alphabet() * a)
        .collect()
}

/// Code-rate vector `R_j(s) = s_j ln M_j / N(s)`.
pub fn code_rates(classes: &[MessageClass], s: &Schedule, n: u64) -> Vec<f64> {
    classes
        .iter()
        .zip(s.counts())
        .map(|(c, &k)| k as f64 * c.ln_alphabet() / n as f64)
        .collect()
}

/// Strict-interior membership of a code-rate vector.
pub fn capacity_membership(rates: &[f64], region: &RateConstraints) -> bool {
    region.contains_strict(rates)
}

/// `s_j = ⌈𝖠 (r_j + ε) / ln M_j⌉`: a schedule whose code rates exceed `r`
/// once `𝖠` is large enough.
pub fn target_schedule(classes: &[MessageClass], r: &[f64], scale: f64, eps: f64) -> Schedule {
    Schedule::new(
        classes
            .iter()
            .zip(r)
            .map(|(c, &rj)| (scale * (rj + eps) / c.ln_alphabet()).ceil() as usize)
            .collect(),
    )
}
