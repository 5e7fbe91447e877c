//! The linear-fractional family: regimes, iterates, fixed points and the
//! tilting parameter `tau`.

use bgwlf::LfParams;

fn main() {
    for (pi0, pi) in [(0.6, 0.5), (0.4, 0.6), (0.3, 0.4)] {
        let p = LfParams::new(pi0, pi).unwrap();
        let tau = p.tau_robust().map(|t| t.tau).unwrap_or(f64::NAN);
        println!(
            "LF({pi0}, {pi}): mu = {:.4}, {:?}, extinction = {:.6}, tau = {:.6}",
            p.mu(),
            p.class(),
            p.extinction(),
            tau
        );
        let (an, bn) = p.iterate(10);
        println!("  phi_10(0) = {:.6}  (a_10 = {an:.4}, b_10 = {bn:.4})", p.phi_n(10, 0.0));
        println!("  homography {:?}", p.homography());
    }
    let census = LfParams::from_pib(0.481, 0.559).unwrap();
    println!("census example: extinction {:.4}", census.extinction());
}
