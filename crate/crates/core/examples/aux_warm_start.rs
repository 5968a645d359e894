//! Overlap with the purified Gibbs state under the dressed auxiliary
//! dynamics on the doubled space.

use gibbs_sos::auxdyn::{fig2, xyz_couplings, EvolveOptions, InitialState};
use gibbs_sos::lindblad::{make_dll, Weighting};
use gibbs_sos::spectral::build_tfim;

fn main() -> gibbs_sos::Result<()> {
    let h = build_tfim(2, 1.0, 0.1)?;
    let couplings = xyz_couplings(2);
    let times = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let opts = EvolveOptions { rtol: 1e-8, atol: 1e-10, ..Default::default() };
    let runs = fig2(&h, |b| make_dll(&h, &couplings, b, Weighting::figure()), &[0.5, 1.0, 2.0, 5.0, 10.0], &times, InitialState::Zero, opts)?;
    print!("{:>6}", "t");
    for r in &runs {
        print!(" {:>9}", format!("b={}", r.beta));
    }
    println!();
    for (k, t) in times.iter().enumerate() {
        print!("{t:>6}");
        for r in &runs {
            print!(" {:>9.5}", r.trajectory.overlaps[k]);
        }
        println!();
    }
    Ok(())
}
