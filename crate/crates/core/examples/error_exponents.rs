//! Random-coding exponents of a binary symmetric channel and of the
//! two-user binary adder MAC, with the small-ρ limit against mutual
//! information.

use schedcomm::channel::{
    mac_conditional_mi, mutual_information, DiscreteMac, Dmc, InputDistribution,
};
use schedcomm::exponents::{e0_mac_subset, e0_over_rho_limit, e0_single, RhoParam};
use schedcomm::Result;

fn main() -> Result<()> {
    let bsc = Dmc::bsc(0.1)?;
    let q = [0.5, 0.5];
    println!("BSC(0.1), uniform input");
    for r in [0.25, 0.5, 1.0] {
        println!("  E0({r}) = {:.6}", e0_single(&bsc, &q, RhoParam::new(r)?)?);
    }
    let lim = e0_over_rho_limit(|r| e0_single(&bsc, &q, r))?;
    println!(
        "  E0/rho -> {:.8} (+/- {:.1e}), I(X;Y) = {:.8}",
        lim.value,
        lim.tolerance,
        mutual_information(&bsc, &q)?
    );

    let adder = DiscreteMac::binary_adder(2);
    let qm = InputDistribution::uniform(&[2, 2]);
    println!("binary adder MAC, uniform inputs, rho = 1");
    for subset in [vec![0], vec![1], vec![0, 1]] {
        let e = e0_mac_subset(&adder, &qm, &subset, RhoParam::new(1.0)?)?;
        let mi = mac_conditional_mi(&adder, &qm, &subset)?;
        println!("  subset {subset:?}: E0 = {e:.6}, I = {mi:.6}");
    }
    Ok(())
}
