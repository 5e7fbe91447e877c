//! Runs one verification suite and prints a line per check.
//!
//! `cargo run --release --example verify_suite -- exact|mc|srw|claims`

use bgwlf::verdict::exit_code;
use bgwlf::verify::{run_suite, Suite};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "exact".into());
    let suite: Suite = name.parse().expect("suite name");
    let checks = run_suite(suite, bgwlf::sim::default_seed());
    for c in &checks {
        println!("{:<8} {}", format!("{:?}", c.status).to_lowercase(), c.identity);
    }
    println!("exit code {}", exit_code(&checks));
}
