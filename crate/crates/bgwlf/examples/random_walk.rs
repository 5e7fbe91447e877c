//! The Lukasiewicz walk: scale function, running maximum against the width,
//! first passage and the resolvent.

use bgwlf::rw::{first_passage_pmf, resolvent, resolvent_stated, scale_value, width_cdf, width_markov_cdf};
use bgwlf::Mechanism;

fn main() {
    let m = Mechanism::binary(0.25, 0.5, 0.25).unwrap();
    let w: Vec<f64> = (0..5).map(|j| scale_value(&m, j).unwrap()).collect();
    println!("w(0..5) = {w:?}");
    for v in 1..=4 {
        println!(
            "v = {v}: P(walk max <= v) = {:.6}   P(width <= v) = {:.6}",
            width_cdf(&m, 1, v - 1).unwrap(),
            width_markov_cdf(&m, 1, v).unwrap()
        );
    }
    let lf = Mechanism::lf(0.3, 0.4).unwrap();
    let fp: Vec<String> = (2..7).map(|n| format!("{:.5}", first_passage_pmf(&lf, 2, n))).collect();
    println!("P(theta_20 = n), n = 2..6: {}", fp.join(" "));
    let g = resolvent(&lf, 1.0, 1, 1, 100_000).unwrap();
    println!("g_11(1) = {g:.6}, return probability {:.6}", 1.0 - 1.0 / g);
    println!("printed formula gives {:.6}", resolvent_stated(&lf, 1.0, 1, 1).unwrap());
}
