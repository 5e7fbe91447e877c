//! Conditioned processes of a supercritical LF law: on extinction, on
//! immortality, the Q-process, the critical tilt and Harris' spectrum.

use bgwlf::conditioning::{condition_immortal, force_critical, frequency_spectrum, harris_sevastyanov, q_process};
use bgwlf::LfParams;

fn main() {
    let p = LfParams::new(0.3, 0.4).unwrap();
    let hs = harris_sevastyanov(&p).unwrap();
    println!("given extinction: LF({:.4}, {:.4}), mean {:.4}", hs.pi0, hs.pi, hs.mu());
    let im = condition_immortal(&p).unwrap();
    println!("immortal skeleton: geometric on {{1, 2, ..}}, success {:.4}", im.success);
    let q = q_process(&p).unwrap();
    let inv: Vec<String> = (1..6).map(|i| format!("{:.4}", q.invariant_pmf(i))).collect();
    println!("Q-process: gamma = {:.4}, invariant law {}", q.gamma, inv.join(" "));
    let fc = force_critical(&p).unwrap();
    println!("critical tilt: tau = {:.6}, LF({:.6}, {:.6}), sigma^2 = {:.4}", fc.tau, fc.params.pi0, fc.params.pi, fc.sigma2);
    let spec: Vec<String> = (1..6).map(|i| format!("{:.4}", frequency_spectrum(&p, i))).collect();
    println!("frequency spectrum {}", spec.join(" "));
}
