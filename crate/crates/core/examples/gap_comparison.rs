//! Sampler gap against the gaps of the undressed and dressed auxiliary
//! generators.

use gibbs_sos::auxdyn::{gap_comparison, xyz_couplings};
use gibbs_sos::lindblad::{make_dll, Weighting};
use gibbs_sos::spectral::build_tfim;

fn main() -> gibbs_sos::Result<()> {
    let h = build_tfim(2, 1.0, 0.1)?;
    let couplings = xyz_couplings(2);
    let betas = [0.05, 0.1, 0.3, 1.0, 3.0, 8.0];
    println!("{:>6} {:>10} {:>12} {:>10} {:>7}", "beta", "sampler", "undressed", "dressed", "ratio");
    for r in gap_comparison(&h, |b| make_dll(&h, &couplings, b, Weighting::figure()), &betas)? {
        println!("{:>6} {:>10.5} {:>12.3e} {:>10.5} {:>7.4}", r.beta, r.gap_dll, r.gap_aux_undressed, r.gap_aux_dressed, r.dressed_ratio());
    }
    Ok(())
}
