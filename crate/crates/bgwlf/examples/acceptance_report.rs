//! Runs acceptance criteria and prints one PASS/FAIL line each.
//!
//! `cargo run --release --example acceptance_report -- [ids...]`

use bgwlf::verify::{criterion, CRITERIA};

fn main() {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids = if ids.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { ids };
    let seed = bgwlf::sim::default_seed();
    for id in ids {
        let c = criterion(id, seed);
        println!("criterion {:>2} {} ({:.1}s): {}", c.id, if c.check.pass { "PASS" } else { "FAIL" }, c.seconds, c.title);
        println!("    {}", c.check.note);
    }
}
