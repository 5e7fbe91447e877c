//! Sterile and prolific individuals: joint laws at generation n, cumulated
//! counts, and sterile counts given the current size.

use bgwlf::sterile::{
    conditional_sterile_given_current, cumulated_joint, gen_n_joint, ratio_transform, rho_sterile_ratio, sterile_alpha,
};
use bgwlf::LfParams;

fn main() {
    let p = LfParams::new(0.3, 0.4).unwrap();
    println!("E(z0^N0_5) at z0 = 0.5:           {:.6}", gen_n_joint(&p, 5, 1.0, 0.5, 1.0));
    println!("cumulated sterile, n = 5, 0.5:    {:.6}", cumulated_joint(&p, 5, 0.5, 1.0).unwrap());
    println!("E(0.5^Nb0_4 | N_5 = 3):           {:.6}", conditional_sterile_given_current(&p, 5, 3, 0.5).unwrap());
    println!("per-individual rate alpha(0.5):   {:.6}", sterile_alpha(&p, 0.5).unwrap());
    println!("E(0.5^(N0/N) | N_5 > 0):          {:.6}", ratio_transform(&p, 5, 0.5, 1e-14));
    for (pi0, pib) in [(0.4, 0.405), (0.5, 0.2), (0.4, 0.7)] {
        let r = rho_sterile_ratio(&LfParams::from_pib(pi0, pib).unwrap()).unwrap();
        println!("rho({pi0}, pib = {pib}) = {:.4}, exceeds: {}", r.rho, r.exceeds);
    }
}
