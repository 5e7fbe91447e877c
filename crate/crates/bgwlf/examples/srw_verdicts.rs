//! Monte-Carlo verdicts for the nested-tree correspondences of an excursion.
//!
//! cargo run --release --example srw_verdicts -- 0.3 0.3 0.4 100000

use bgwlf::sim::default_seed;
use bgwlf::srw::{verify_correspondences, SrwParams};

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (p, q, r) = match args.as_slice() {
        [p, q, r, ..] => (*p, *q, *r),
        _ => (0.5, 0.5, 0.0),
    };
    let samples = args.get(3).map_or(100_000, |&n| n as usize);
    let params = SrwParams::new(p, q, r).expect("p + q + r = 1");
    let report = verify_correspondences(&params, samples, default_seed());
    println!("p = {p}, q = {q}, r = {r}: {} excursions, {} unfinished", report.samples, report.unfinished);
    for c in &report.checks {
        let ks = c.ks_stat.map(|d| format!(" D = {d:.5} (crit {:.5})", c.critical.unwrap())).unwrap_or_default();
        let cmp = c.value.map(|v| format!(" value {v:.6} vs {:.6}", c.reference.unwrap())).unwrap_or_default();
        println!("{:<7} {:<30}{ks}{cmp}  {}", format!("{:?}", c.status), c.identity, c.note);
    }
    println!("exit code {}", report.exit_code());
}
