//! Discrete channels, input distributions and the rate-constraint sets they
//! induce.
//!
//! Every probability table is validated on construction: rows must be
//! non-negative and sum to one within [`PROB_TOL`]. Tables are never
//! silently re-normalized. All information quantities are in nats and use
//! the `0 ln 0 = 0` convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization tolerance applied to every probability vector.
pub const PROB_TOL: f64 = 1e-12;

pub(crate) fn check_distribution(what: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::DimensionMismatch(format!("{what} is empty")));
    }
    for &v in p {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidProbability {
                what: what.to_string(),
                value: v,
            });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::NotNormalized {
            what: what.to_string(),
            sum,
        });
    }
    Ok(())
}

fn xlogx_ratio(p: f64, num: f64, den: f64) -> f64 {
    if p == 0.0 || num == 0.0 {
        0.0
    } else {
        p * (num / den).ln()
    }
}

/// A single-user discrete memoryless channel `p(y|x)`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDmc", into = "RawDmc")]
pub struct Dmc {
    inputs: usize,
    outputs: usize,
    transition: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDmc {
    inputs: usize,
    outputs: usize,
    transition: Vec<f64>,
}

impl TryFrom<RawDmc> for Dmc {
    type Error = Error;
    fn try_from(r: RawDmc) -> Result<Self> {
        Dmc::new(r.inputs, r.outputs, r.transition)
    }
}

impl From<Dmc> for RawDmc {
    fn from(d: Dmc) -> Self {
        RawDmc {
            inputs: d.inputs,
            outputs: d.outputs,
            transition: d.transition,
        }
    }
}

impl Dmc {
    pub fn new(inputs: usize, outputs: usize, transition: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::DimensionMismatch(
                "channel alphabets must be non-empty".into(),
            ));
        }
        if transition.len() != inputs * outputs {
            return Err(Error::DimensionMismatch(format!(
                "transition has {} entries, expected {}x{}",
                transition.len(),
                inputs,
                outputs
            )));
        }
        for x in 0..inputs {
            check_distribution(
                &format!("row {x} of channel"),
                &transition[x * outputs..(x + 1) * outputs],
            )?;
        }
        Ok(Self {
            inputs,
            outputs,
            transition,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        let outputs = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != outputs) {
            return Err(Error::DimensionMismatch("ragged transition rows".into()));
        }
        Self::new(inputs, outputs, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            t[i * n + i] = 1.0;
        }
        Self {
            inputs: n,
            outputs: n,
            transition: t,
        }
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(2, 2, vec![1.0 - p, p, p, 1.0 - p])
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.transition[x * self.outputs + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.transition[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn transition(&self) -> &[f64] {
        &self.transition
    }

    /// Cascade `self` followed by `next`: `(x -> y -> z)`.
    pub fn then(&self, next: &Dmc) -> Result<Dmc> {
        if self.outputs != next.inputs {
            return Err(Error::DimensionMismatch(format!(
                "cannot cascade {} outputs into {} inputs",
                self.outputs, next.inputs
            )));
        }
        let mut t = vec![0.0; self.inputs * next.outputs];
        for x in 0..self.inputs {
            for y in 0..self.outputs {
                let p = self.prob(x, y);
                if p == 0.0 {
                    continue;
                }
                for z in 0..next.outputs {
                    t[x * next.outputs + z] += p * next.prob(y, z);
                }
            }
        }
        Ok(Dmc {
            inputs: self.inputs,
            outputs: next.outputs,
            transition: t,
        })
    }

    /// Output distribution induced by input distribution `q`.
    pub fn output_distribution(&self, q: &[f64]) -> Vec<f64> {
        let mut py = vec![0.0; self.outputs];
        for (x, &qx) in q.iter().enumerate() {
            for (y, p) in py.iter_mut().enumerate() {
                *p += qx * self.prob(x, y);
            }
        }
        py
    }
}

/// Per-source input probability vectors `Q_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct InputDistribution {
    per_source: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for InputDistribution {
    type Error = Error;
    fn try_from(v: Vec<Vec<f64>>) -> Result<Self> {
        InputDistribution::new(v)
    }
}

impl From<InputDistribution> for Vec<Vec<f64>> {
    fn from(q: InputDistribution) -> Self {
        q.per_source
    }
}

impl InputDistribution {
    pub fn new(per_source: Vec<Vec<f64>>) -> Result<Self> {
        if per_source.is_empty() {
            return Err(Error::DimensionMismatch("no sources".into()));
        }
        for (j, q) in per_source.iter().enumerate() {
            check_distribution(&format!("Q_{}", j + 1), q)?;
        }
        Ok(Self { per_source })
    }

    pub fn single(q: Vec<f64>) -> Result<Self> {
        Self::new(vec![q])
    }

    /// Uniform distribution on each alphabet.
    pub fn uniform(sizes: &[usize]) -> Self {
        Self {
            per_source: sizes.iter().map(|&n| vec![1.0 / n as f64; n]).collect(),
        }
    }

    pub fn sources(&self) -> usize {
        self.per_source.len()
    }

    pub fn source(&self, j: usize) -> &[f64] {
        &self.per_source[j]
    }
}

/// A discrete memoryless multiaccess channel `p(y | x_1 ... x_J)`.
///
/// The joint input tuple is flattened in mixed radix with source 0 as the
/// most significant digit; `transition` is row-major over (tuple, y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMac", into = "RawMac")]
pub struct DiscreteMac {
    input_sizes: Vec<usize>,
    output_size: usize,
    transition: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMac {
    input_sizes: Vec<usize>,
    output_size: usize,
    transition: Vec<f64>,
}

impl TryFrom<RawMac> for DiscreteMac {
    type Error = Error;
    fn try_from(r: RawMac) -> Result<Self> {
        DiscreteMac::new(r.input_sizes, r.output_size, r.transition)
    }
}

impl From<DiscreteMac> for RawMac {
    fn from(m: DiscreteMac) -> Self {
        RawMac {
            input_sizes: m.input_sizes,
            output_size: m.output_size,
            transition: m.transition,
        }
    }
}

impl DiscreteMac {
    pub fn new(input_sizes: Vec<usize>, output_size: usize, transition: Vec<f64>) -> Result<Self> {
        if input_sizes.is_empty() || input_sizes.contains(&0) || output_size == 0 {
            return Err(Error::DimensionMismatch(
                "every alphabet must have at least one symbol".into(),
            ));
        }
        if input_sizes.len() > 16 {
            return Err(Error::DimensionMismatch(
                "at most 16 sources supported".into(),
            ));
        }
        let tuples: usize = input_sizes.iter().product();
        if transition.len() != tuples * output_size {
            return Err(Error::DimensionMismatch(format!(
                "transition has {} entries, expected {}x{}",
                transition.len(),
                tuples,
                output_size
            )));
        }
        for t in 0..tuples {
            check_distribution(
                &format!("MAC row {t}"),
                &transition[t * output_size..(t + 1) * output_size],
            )?;
        }
        Ok(Self {
            input_sizes,
            output_size,
            transition,
        })
    }

    /// Builds a channel from a closure giving `p(y | x)` for each tuple.
    pub fn from_fn(
        input_sizes: Vec<usize>,
        output_size: usize,
        mut f: impl FnMut(&[usize], usize) -> f64,
    ) -> Result<Self> {
        let tuples: usize = input_sizes.iter().product();
        let mut t = Vec::with_capacity(tuples * output_size);
        let mut x = vec![0usize; input_sizes.len()];
        for idx in 0..tuples {
            decode_tuple(&input_sizes, idx, &mut x);
            for y in 0..output_size {
                t.push(f(&x, y));
            }
        }
        Self::new(input_sizes, output_size, t)
    }

    /// Binary adder channel `y = x_1 + ... + x_n`.
    pub fn binary_adder(n: usize) -> Self {
        Self::from_fn(vec![2; n], n + 1, |x, y| {
            if x.iter().sum::<usize>() == y {
                1.0
            } else {
                0.0
            }
        })
        .expect("adder channel is well formed")
    }

    /// Noiseless parallel channels: `y` is the whole input tuple.
    pub fn parallel_noiseless(input_sizes: Vec<usize>) -> Self {
        let tuples: usize = input_sizes.iter().product();
        let mut t = vec![0.0; tuples * tuples];
        for i in 0..tuples {
            t[i * tuples + i] = 1.0;
        }
        Self::new(input_sizes, tuples, t).expect("noiseless channel is well formed")
    }

    /// A single-source MAC wrapping a single-user channel.
    pub fn from_single(ch: &Dmc) -> Self {
        Self {
            input_sizes: vec![ch.inputs],
            output_size: ch.outputs,
            transition: ch.transition.clone(),
        }
    }

    pub fn sources(&self) -> usize {
        self.input_sizes.len()
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn tuple_count(&self) -> usize {
        self.input_sizes.iter().product()
    }

    pub fn tuple_index(&self, x: &[usize]) -> usize {
        x.iter()
            .zip(&self.input_sizes)
            .fold(0, |acc, (&xi, &n)| acc * n + xi)
    }

    pub fn prob(&self, x: &[usize], y: usize) -> f64 {
        self.transition[self.tuple_index(x) * self.output_size + y]
    }

    pub(crate) fn prob_idx(&self, tuple: usize, y: usize) -> f64 {
        self.transition[tuple * self.output_size + y]
    }

    pub fn transition(&self) -> &[f64] {
        &self.transition
    }

    pub(crate) fn check_input(&self, q: &InputDistribution) -> Result<()> {
        if q.sources() != self.sources() {
            return Err(Error::DimensionMismatch(format!(
                "input distribution has {} sources, channel has {}",
                q.sources(),
                self.sources()
            )));
        }
        for (j, (&n, qj)) in self.input_sizes.iter().zip(&q.per_source).enumerate() {
            if qj.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "Q_{} has {} entries, alphabet has {}",
                    j + 1,
                    qj.len(),
                    n
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn decode_tuple(sizes: &[usize], mut idx: usize, out: &mut [usize]) {
    for (slot, &n) in out.iter_mut().zip(sizes).rev() {
        *slot = idx % n;
        idx /= n;
    }
}

/// Degraded broadcast channel with a superposition-coding ladder.
///
/// Receivers and ladder levels are 0-based: level 0 is the innermost input
/// `X_1` that enters the channel, level `J-1` is the cloud centre `X_J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDbc", into = "RawDbc")]
pub struct DegradedBroadcastSpec {
    first_hop: Dmc,
    degradations: Vec<Dmc>,
    superposition: Vec<Dmc>,
    top: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDbc {
    /// `p(y_1 | x_1)`.
    first_hop: Dmc,
    /// `p_l(y_l | y_{l-1})` for `l = 2..J`.
    degradations: Vec<Dmc>,
    /// `Q_j(x_j | x_{j+1})` for `j = 1..J-1`.
    superposition: Vec<Dmc>,
    /// Marginal `Q_J(x_J)`.
    top: Vec<f64>,
}

impl TryFrom<RawDbc> for DegradedBroadcastSpec {
    type Error = Error;
    fn try_from(r: RawDbc) -> Result<Self> {
        DegradedBroadcastSpec::new(r.first_hop, r.degradations, r.superposition, r.top)
    }
}

impl From<DegradedBroadcastSpec> for RawDbc {
    fn from(d: DegradedBroadcastSpec) -> Self {
        RawDbc {
            first_hop: d.first_hop,
            degradations: d.degradations,
            superposition: d.superposition,
            top: d.top,
        }
    }
}

impl DegradedBroadcastSpec {
    pub fn new(
        first_hop: Dmc,
        degradations: Vec<Dmc>,
        superposition: Vec<Dmc>,
        top: Vec<f64>,
    ) -> Result<Self> {
        if degradations.len() != superposition.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} degradations but {} superposition kernels; both must equal J-1",
                degradations.len(),
                superposition.len()
            )));
        }
        let mut out = first_hop.outputs();
        for (l, d) in degradations.iter().enumerate() {
            if d.inputs() != out {
                return Err(Error::DimensionMismatch(format!(
                    "degradation {} expects {} inputs, previous output has {}",
                    l + 2,
                    d.inputs(),
                    out
                )));
            }
            out = d.outputs();
        }
        let mut below = first_hop.inputs();
        for (j, q) in superposition.iter().enumerate() {
            if q.outputs() != below {
                return Err(Error::DimensionMismatch(format!(
                    "Q_{} produces {} symbols, level below has {}",
                    j + 1,
                    q.outputs(),
                    below
                )));
            }
            below = q.inputs();
        }
        if top.len() != below {
            return Err(Error::DimensionMismatch(format!(
                "Q_J has {} entries, X_J alphabet has {}",
                top.len(),
                below
            )));
        }
        check_distribution("Q_J", &top)?;
        Ok(Self {
            first_hop,
            degradations,
            superposition,
            top,
        })
    }

    /// Single-receiver broadcast channel (a plain DMC).
    pub fn single(first_hop: Dmc, q: Vec<f64>) -> Result<Self> {
        Self::new(first_hop, vec![], vec![], q)
    }

    pub fn receivers(&self) -> usize {
        self.degradations.len() + 1
    }

    pub fn first_hop(&self) -> &Dmc {
        &self.first_hop
    }

    pub fn degradations(&self) -> &[Dmc] {
        &self.degradations
    }

    pub fn superposition(&self) -> &[Dmc] {
        &self.superposition
    }

    pub fn top(&self) -> &[f64] {
        &self.top
    }

    /// Alphabet size of ladder level `k`.
    pub fn input_size(&self, k: usize) -> usize {
        if k == 0 {
            self.first_hop.inputs()
        } else {
            self.superposition[k - 1].inputs()
        }
    }

    /// Marginal distribution of ladder level `k`.
    pub fn marginal(&self, k: usize) -> Vec<f64> {
        let mut q = self.top.clone();
        for level in (k..self.receivers() - 1).rev() {
            q = self.superposition[level].output_distribution(&q);
        }
        q
    }

    /// `p(y_j | x_1)`: the first hop followed by degradations up to receiver `j`.
    pub fn receiver_channel(&self, j: usize) -> Result<Dmc> {
        if j >= self.receivers() {
            return Err(Error::InvalidIndex(format!("receiver {j}")));
        }
        let mut ch = self.first_hop.clone();
        for d in &self.degradations[..j] {
            ch = ch.then(d)?;
        }
        Ok(ch)
    }

    fn check_pair(&self, k: usize, j: usize) -> Result<()> {
        let n = self.receivers();
        if k >= n || j >= n {
            return Err(Error::InvalidIndex(format!(
                "level {k} / receiver {j} with J = {n}"
            )));
        }
        if k < j {
            return Err(Error::InvalidIndex(format!(
                "successive decoding never needs level {k} at receiver {j} (k < j)"
            )));
        }
        Ok(())
    }
}

/// Effective single-user channel `p'(y_j | x_k)` seen by ladder level `k`
/// at receiver `j` (0-based, `k >= j`).
pub fn dbc_effective_channel(spec: &DegradedBroadcastSpec, k: usize, j: usize) -> Result<Dmc> {
    spec.check_pair(k, j)?;
    // x_k -> x_{k-1} -> ... -> x_1
    let mut ch = Dmc::identity(spec.input_size(k));
    for level in (0..k).rev() {
        ch = ch.then(&spec.superposition[level])?;
    }
    ch.then(&spec.receiver_channel(j)?)
}

/// Gaussian multiaccess channel described by received SNRs `Γ_j = P_j / (N_0 W)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGaussian", into = "RawGaussian")]
pub struct GaussianMacSpec {
    snr: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawGaussian {
    snr: Vec<f64>,
}

impl TryFrom<RawGaussian> for GaussianMacSpec {
    type Error = Error;
    fn try_from(r: RawGaussian) -> Result<Self> {
        GaussianMacSpec::new(r.snr)
    }
}

impl From<GaussianMacSpec> for RawGaussian {
    fn from(g: GaussianMacSpec) -> Self {
        RawGaussian { snr: g.snr }
    }
}

impl GaussianMacSpec {
    pub fn new(snr: Vec<f64>) -> Result<Self> {
        if snr.is_empty() {
            return Err(Error::DimensionMismatch("no classes".into()));
        }
        if let Some(&bad) = snr.iter().find(|g| !g.is_finite() || **g <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "SNR must be finite and > 0, got {bad}"
            )));
        }
        Ok(Self { snr })
    }

    pub fn equal(classes: usize, snr: f64) -> Result<Self> {
        Self::new(vec![snr; classes])
    }

    pub fn classes(&self) -> usize {
        self.snr.len()
    }

    pub fn snr(&self) -> &[f64] {
        &self.snr
    }
}

/// Channel specification as read from a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    DiscreteMac(DiscreteMac),
    Dbc(DegradedBroadcastSpec),
    GaussianMac(GaussianMacSpec),
}

/// A conditionally-mixed single-user channel: with probability `weight`
/// the side variable `Z` takes a value under which the input law is
/// `input` and the channel is `channel`.
///
/// Every exponent family in the crate reduces to this form, as does every
/// conditional mutual information `I(X; Y | Z)` they are compared against.
#[derive(Debug, Clone)]
pub struct MixtureChannel {
    pub(crate) components: Vec<MixtureComponent>,
}

#[derive(Debug, Clone)]
pub(crate) struct MixtureComponent {
    pub weight: f64,
    pub input: Vec<f64>,
    pub channel: Dmc,
}

impl MixtureChannel {
    pub fn single(ch: &Dmc, q: &[f64]) -> Result<Self> {
        if q.len() != ch.inputs() {
            return Err(Error::DimensionMismatch(format!(
                "input distribution has {} entries, channel has {} inputs",
                q.len(),
                ch.inputs()
            )));
        }
        check_distribution("Q", q)?;
        Ok(Self {
            components: vec![MixtureComponent {
                weight: 1.0,
                input: q.to_vec(),
                channel: ch.clone(),
            }],
        })
    }

    /// `X = x(S)`, `Z = x(S^c)` for a MAC under a product input law.
    pub fn mac_subset(ch: &DiscreteMac, q: &InputDistribution, subset: &[usize]) -> Result<Self> {
        ch.check_input(q)?;
        let n = ch.sources();
        let mask = subset_mask(subset, n)?;
        let inside: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let outside: Vec<usize> = (0..n).filter(|j| mask & (1 << j) == 0).collect();
        let in_sizes: Vec<usize> = inside.iter().map(|&j| ch.input_sizes()[j]).collect();
        let out_sizes: Vec<usize> = outside.iter().map(|&j| ch.input_sizes()[j]).collect();
        let in_count: usize = in_sizes.iter().product();
        let out_count: usize = out_sizes.iter().product();
        let ny = ch.output_size();

        let mut x = vec![0usize; n];
        let mut xi = vec![0usize; inside.len()];
        let mut xo = vec![0usize; outside.len()];
        let mut components = Vec::with_capacity(out_count);
        for zo in 0..out_count {
            decode_tuple(&out_sizes, zo, &mut xo);
            let weight: f64 = outside
                .iter()
                .zip(&xo)
                .map(|(&j, &v)| q.source(j)[v])
                .product();
            let mut input = Vec::with_capacity(in_count);
            let mut t = Vec::with_capacity(in_count * ny);
            for zi in 0..in_count {
                decode_tuple(&in_sizes, zi, &mut xi);
                input.push(
                    inside
                        .iter()
                        .zip(&xi)
                        .map(|(&j, &v)| q.source(j)[v])
                        .product(),
                );
                for (&j, &v) in inside.iter().zip(&xi) {
                    x[j] = v;
                }
                for (&j, &v) in outside.iter().zip(&xo) {
                    x[j] = v;
                }
                let row = ch.tuple_index(&x);
                for y in 0..ny {
                    t.push(ch.prob_idx(row, y));
                }
            }
            components.push(MixtureComponent {
                weight,
                input,
                channel: Dmc {
                    inputs: in_count,
                    outputs: ny,
                    transition: t,
                },
            });
        }
        Ok(Self { components })
    }

    /// `X = X_k`, `Z = X_{k+1}`, channel `p'(y_j | x_k)` (0-based, `k >= j`).
    pub fn dbc(spec: &DegradedBroadcastSpec, k: usize, j: usize) -> Result<Self> {
        let eff = dbc_effective_channel(spec, k, j)?;
        if k + 1 == spec.receivers() {
            return Self::single(&eff, spec.top());
        }
        let above = spec.marginal(k + 1);
        let kernel = &spec.superposition()[k];
        Ok(Self {
            components: above
                .iter()
                .enumerate()
                .map(|(z, &w)| MixtureComponent {
                    weight: w,
                    input: kernel.row(z).to_vec(),
                    channel: eff.clone(),
                })
                .collect(),
        })
    }

    /// `I(X; Y | Z)` in nats.
    pub fn conditional_mi(&self) -> f64 {
        self.components
            .iter()
            .filter(|c| c.weight > 0.0)
            .map(|c| c.weight * mi_unchecked(&c.channel, &c.input))
            .sum()
    }
}

pub(crate) fn subset_mask(subset: &[usize], n: usize) -> Result<u32> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut mask = 0u32;
    for &j in subset {
        if j >= n {
            return Err(Error::InvalidIndex(format!("source {j} with J = {n}")));
        }
        mask |= 1 << j;
    }
    Ok(mask)
}

/// All non-empty subsets of `{0..n}` in increasing bitmask order.
pub fn nonempty_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1u32 << n)).map(move |m| (0..n).filter(|j| m & (1 << j) != 0).collect())
}

fn mi_unchecked(ch: &Dmc, q: &[f64]) -> f64 {
    let py = ch.output_distribution(q);
    let mut total = 0.0;
    for (x, &qx) in q.iter().enumerate() {
        if qx == 0.0 {
            continue;
        }
        for (y, &pyv) in py.iter().enumerate() {
            let p = ch.prob(x, y);
            total += qx * xlogx_ratio(p, p, pyv);
        }
    }
    total.max(0.0)
}

/// `I(X;Y)` of a single-user channel under input law `q`, in nats.
pub fn mutual_information(ch: &Dmc, q: &[f64]) -> Result<f64> {
    if q.len() != ch.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "input distribution has {} entries, channel has {} inputs",
            q.len(),
            ch.inputs()
        )));
    }
    check_distribution("Q", q)?;
    Ok(mi_unchecked(ch, q))
}

/// `I(X(S); Y | X(S^c))` under the product law `Q`.
pub fn mac_conditional_mi(
    ch: &DiscreteMac,
    q: &InputDistribution,
    subset: &[usize],
) -> Result<f64> {
    Ok(MixtureChannel::mac_subset(ch, q, subset)?.conditional_mi())
}

/// One linear constraint `sum_{j in members} r_j <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateConstraint {
    pub members: Vec<usize>,
    pub bound: f64,
}

/// A polytope of rate vectors described by sum-rate constraints (plus `r >= 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateConstraints {
    pub dims: usize,
    pub constraints: Vec<RateConstraint>,
}

impl RateConstraints {
    fn sums(&self, r: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
        let r = r.to_vec();
        self.constraints
            .iter()
            .map(move |c| (c.members.iter().map(|&j| r[j]).sum::<f64>(), c.bound))
    }

    /// Closed membership.
    pub fn contains(&self, r: &[f64]) -> bool {
        r.len() == self.dims
            && r.iter().all(|&v| v >= 0.0)
            && self.sums(r).all(|(lhs, rhs)| lhs <= rhs)
    }

    /// Membership in the interior relative to the sum-rate constraints.
    pub fn contains_strict(&self, r: &[f64]) -> bool {
        r.len() == self.dims
            && r.iter().all(|&v| v >= 0.0)
            && self.sums(r).all(|(lhs, rhs)| lhs < rhs)
    }

    /// Smallest `bound - lhs` over all constraints.
    pub fn min_slack(&self, r: &[f64]) -> f64 {
        self.sums(r)
            .map(|(lhs, rhs)| rhs - lhs)
            .fold(f64::INFINITY, f64::min)
    }
}

/// The MAC pentagon `I(Q)`: one constraint per non-empty source subset.
pub fn mac_pentagon(ch: &DiscreteMac, q: &InputDistribution) -> Result<RateConstraints> {
    ch.check_input(q)?;
    let n = ch.sources();
    let constraints = nonempty_subsets(n)
        .map(|s| {
            let bound = mac_conditional_mi(ch, q, &s)?;
            Ok(RateConstraint { members: s, bound })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateConstraints {
        dims: n,
        constraints,
    })
}

/// Superposition-coding region: `r_j <= I(X_j; Y_j | X_{j+1})`, `r_J <= I(X_J; Y_J)`.
pub fn dbc_rate_constraints(spec: &DegradedBroadcastSpec) -> Result<RateConstraints> {
    let n = spec.receivers();
    let constraints = (0..n)
        .map(|j| {
            Ok(RateConstraint {
                members: vec![j],
                bound: MixtureChannel::dbc(spec, j, j)?.conditional_mi(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateConstraints {
        dims: n,
        constraints,
    })
}
