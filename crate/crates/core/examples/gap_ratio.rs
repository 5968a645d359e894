//! Gap of the delta-kernel parent over the gap of the exact parent
//! Hamiltonian, across temperatures.

use gibbs_sos::auxdyn::xyz_couplings;
use gibbs_sos::factorization::{default_betas, gap_ratio_scan};
use gibbs_sos::lindblad::{make_dll, Weighting};
use gibbs_sos::spectral::build_tfim;

fn main() -> gibbs_sos::Result<()> {
    let h = build_tfim(2, 1.0, 0.1)?;
    let couplings = xyz_couplings(2);
    let rows = gap_ratio_scan(&h, |b| make_dll(&h, &couplings, b, Weighting::figure()), &default_betas())?;
    for r in rows.iter().step_by(4) {
        println!("beta {:>8.4}  ratio {:.4}", r.beta, r.ratio);
    }
    let min = rows.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio)).expect("non-empty scan");
    println!("minimum {:.4} at beta {:.3}", min.ratio, min.beta);
    Ok(())
}
