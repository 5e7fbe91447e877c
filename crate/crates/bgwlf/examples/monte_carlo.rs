//! Monte-Carlo trees and walks against the exact laws.

use bgwlf::population::survival;
use bgwlf::sim::{lamperti_check, simulate_skipfree, simulate_trees};
use bgwlf::{LfParams, Mechanism};

fn main() {
    let seed = bgwlf::sim::default_seed();
    let crit = LfParams::new(0.4, 0.6).unwrap();
    let trees = simulate_trees(&crit.into(), 1, 10, 100_000, seed, None);
    let alive = trees.iter().filter(|t| t.size_at(3) > 0).count() as f64 / trees.len() as f64;
    println!("P(N_3 > 0): simulated {alive:.5}, exact {:.5}", survival(&crit, 3).value);

    let sup = Mechanism::lf(0.3, 0.4).unwrap();
    let walk = simulate_skipfree(&sup, 1, 50, 100_000, seed ^ 1, 0.5, 2);
    println!("P(theta_10 = 1): simulated {:.5}, exact 0.3", walk.theta.prob(1) * walk.theta.n as f64 / 100_000.0);

    let lam = lamperti_check(&Mechanism::lf(0.6, 0.5).unwrap(), 2, 3, 100_000, seed ^ 2);
    println!("Lamperti: KS {:.2e} (critical {:.2e}), pass = {}", lam.ks, lam.critical, lam.pass);
}
