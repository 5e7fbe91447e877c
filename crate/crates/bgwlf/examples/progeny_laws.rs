//! Total progeny: exact law, tail asymptotics, leaves and the leaf large
//! deviations.

use bgwlf::progeny::{leaves_ldp, leaves_moments, leaves_pmf, ProgenyLaw};
use bgwlf::Mechanism;

fn main() {
    let mech = Mechanism::lf(0.3, 0.4).unwrap();
    let law = ProgenyLaw::new(mech).unwrap();
    let pmf = law.pmf(200);
    for k in [1, 2, 5, 50, 200] {
        println!("P(N = {k:>3}) = {:.6e}   asymptotic {:.6e}", pmf[k], law.tail(k as u64));
    }
    println!("P(N = 6, leaves = l): {:?}", leaves_pmf(&mech, 6).iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>());

    for m in [Mechanism::Geo0 { pi0: 0.5 }, Mechanism::Poisson { mu: 1.0 }, Mechanism::binary(0.25, 0.5, 0.25).unwrap()] {
        let (m0, s2) = leaves_moments(&m).unwrap();
        let ldp = leaves_ldp(&m).unwrap();
        println!("{m:?}: leaf fraction {m0:.6} (variance {s2:.6}), rate at 0.1: {:.5}", ldp.rate(0.1));
    }
}
