//! Purified Gibbs state from a warm start by singular-value filtering, with
//! the oracle query ledger.

use gibbs_sos::lindblad::{make_dll, Weighting};
use gibbs_sos::spectral::{build_tfim, estimate_observable, gibbs_state, DoubledState, PauliString};
use gibbs_sos::stateprep::{beta_sweep, filter_prepare, fidelity, prepare_operator, FilterMethod, FilterSpec};

fn main() -> gibbs_sos::Result<()> {
    let h = build_tfim(2, 1.0, 0.1)?;
    let couplings: Vec<_> = ["X1", "Z1", "X2", "Z2"].iter().map(|s| Ok((s.to_string(), PauliString::parse(s, 2)?.matrix()))).collect::<gibbs_sos::Result<_>>()?;
    let beta = 1.0;
    let spec = make_dll(&h, &couplings, beta, Weighting::gaussian())?;
    let g = gibbs_state(&h, beta)?;

    let prep = prepare_operator(&spec, &h, &g, 1e-3, None)?;
    let filter = FilterSpec::design(FilterMethod::Polynomial, prep.eps_quad, prep.delta, prep.alpha, 1e-8)?;
    let (state, ledger) = filter_prepare(&prep.b, &DoubledState::maximally_entangled(4), &filter)?;
    println!("gap {:.4}, quadrature error {:.2e}, alpha {:.3}, degree {}", prep.delta, prep.eps_quad, prep.alpha, filter.degree());
    println!("fidelity {:.12}", fidelity(&state, &g));
    println!("ledger {}", serde_json::to_string(&ledger).unwrap_or_default());

    let zz = PauliString::parse("Z1Z2", 2)?.matrix();
    println!("<Z1 Z2>: prepared {:+.10}, exact {:+.10}", estimate_observable(&state, &zz)?, g.expectation(&zz).re);

    println!("\n{:>5} {:>8} {:>7} {:>8}", "beta", "gap", "degree", "queries");
    for r in beta_sweep(&h, |b| make_dll(&h, &couplings, b, Weighting::gaussian()), &[0.5, 1.0, 2.0, 4.0], 1e-6)? {
        println!("{:>5} {:>8.4} {:>7} {:>8}", r.parameter, r.delta, r.degree, r.queries);
    }
    Ok(())
}
