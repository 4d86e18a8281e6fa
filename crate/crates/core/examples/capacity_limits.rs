//! Large-K behaviour of the Gaussian system and large-alphabet code rates
//! on the binary adder MAC.

use schedcomm::channel::{mac_pentagon, DiscreteMac, GaussianMacSpec, InputDistribution};
use schedcomm::codelen::{MacExponents, MessageClass};
use schedcomm::exponents::{e0_gaussian_quantum, RhoParam};
use schedcomm::regions::{asymptotic_caps, capacity_membership, code_rates, target_schedule};
use schedcomm::sched::Schedule;
use schedcomm::Result;

fn main() -> Result<()> {
    let rho = RhoParam::new(1.0)?;
    let spec = GaussianMacSpec::new(vec![10.0])?;
    for k in [1, 4, 16, 64, 256] {
        let caps = asymptotic_caps(&spec, k, rho);
        let per_slot = k as f64 * e0_gaussian_quantum(&spec, &Schedule::new(vec![k]), 0, rho)?;
        println!(
            "K = {k:>3}: K phi = {per_slot:.4} (limit {:.4}), capacity {:.4} (limit {})",
            caps.saturation, caps.single_user_limit[0], caps.spectral_limit
        );
    }

    let adder = DiscreteMac::binary_adder(2);
    let q = InputDistribution::uniform(&[2, 2]);
    let region = mac_pentagon(&adder, &q)?;
    let classes = vec![MessageClass::new(1000, 1e-3)?; 2];
    let r = [0.3, 0.3];
    let s = target_schedule(&classes, &r, 1e3, 0.05);
    let e = MacExponents::new(&adder, &q, RhoParam::new(0.05)?)?;
    let n = e.min_length(&classes, &s, RhoParam::new(0.05)?)?.n;
    let rates = code_rates(&classes, &s, n);
    println!(
        "target {r:?}: schedule {s}, N = {n}, code rates {rates:.4?}, inside capacity = {}",
        capacity_membership(&rates, &region)
    );
    Ok(())
}
