//! Generation-size laws: survival, moments, n-step transitions and the
//! conditional limits.

use bgwlf::population::{mean, pmf_current, survival, transition_power, variance, yaglom_limits};
use bgwlf::LfParams;

fn main() {
    let crit = LfParams::new(0.4, 0.6).unwrap();
    for n in [1, 3, 10, 100] {
        let s = survival(&crit, n);
        println!("n = {n:>3}: P(N_n > 0) = {:.10}  asymptotic {:.10}", s.value, s.asymptotic);
    }
    println!("E N_3 = {}, Var N_3 = {}", mean(&crit, 3), variance(&crit, 3));
    let pmf: Vec<String> = (0..6).map(|k| format!("{:.5}", pmf_current(&crit, 3, k))).collect();
    println!("P(N_3 = k), k < 6: {}", pmf.join(" "));
    println!("P(N_2(3) = 4) = {:.6}", transition_power(&crit, 2, 3, 4));

    for p in [LfParams::new(0.6, 0.5).unwrap(), LfParams::new(0.3, 0.4).unwrap()] {
        println!("LF({}, {}) limit: {:?}", p.pi0, p.pi, yaglom_limits(&p).unwrap());
    }
}
