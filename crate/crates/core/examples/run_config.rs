//! Run a config through the library harness without the binary.

use gibbs_sos::cli;

fn main() {
    let text = "experiment = \"observables\"\nseed = 4\n[hamiltonian]\nn = 2\n[sampler]\nbetas = [0.5, 2.0]\n";
    let cfg = cli::load_str(text).expect("valid config");
    let outcome = cli::run_experiment(&cfg).expect("experiment runs");
    println!("{}", outcome.table.columns.join(","));
    for c in &outcome.checks {
        println!("{} {}: {:.2e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured);
    }
}
