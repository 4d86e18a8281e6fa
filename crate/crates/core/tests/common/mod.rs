#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schedcomm::channel::{DegradedBroadcastSpec, DiscreteMac, Dmc, InputDistribution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A probability vector bounded away from zero.
pub fn simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

pub fn random_dmc(rng: &mut impl Rng, inputs: usize, outputs: usize) -> Dmc {
    Dmc::from_rows((0..inputs).map(|_| simplex(rng, outputs)).collect()).unwrap()
}

pub fn random_mac(rng: &mut impl Rng, sizes: Vec<usize>, outputs: usize) -> DiscreteMac {
    let tuples: usize = sizes.iter().product();
    let t: Vec<f64> = (0..tuples).flat_map(|_| simplex(rng, outputs)).collect();
    DiscreteMac::new(sizes, outputs, t).unwrap()
}

pub fn random_input(rng: &mut impl Rng, sizes: &[usize]) -> InputDistribution {
    InputDistribution::new(sizes.iter().map(|&n| simplex(rng, n)).collect()).unwrap()
}

pub fn bsc(p: f64) -> Dmc {
    Dmc::bsc(p).unwrap()
}

/// A `j`-receiver binary degraded broadcast channel built from BSCs.
pub fn random_dbc(rng: &mut impl Rng, j: usize) -> DegradedBroadcastSpec {
    let hop = bsc(rng.random_range(0.01..0.1));
    let deg = (1..j).map(|_| bsc(rng.random_range(0.02..0.12))).collect();
    let sup = (1..j).map(|_| bsc(rng.random_range(0.1..0.3))).collect();
    DegradedBroadcastSpec::new(hop, deg, sup, vec![0.5, 0.5]).unwrap()
}
