//! Grid selection for a requested quadrature error and the measured
//! `||H - B^dag B||`.

use gibbs_sos::lindblad::make_davies;
use gibbs_sos::quadrature::error_scaling_scan;
use gibbs_sos::spectral::{gibbs_state, Pauli, SpectralHamiltonian};

fn main() -> gibbs_sos::Result<()> {
    let h = SpectralHamiltonian::new(1, Pauli::Z.matrix())?;
    let couplings = [("X1".to_string(), Pauli::X.matrix())];
    println!("{:>5} {:>6} {:>8} {:>6} {:>10}", "beta", "eps", "T", "N", "measured");
    for beta in [0.5, 1.0, 2.0, 4.0] {
        let spec = make_davies(&h, &couplings, beta)?;
        let g = gibbs_state(&h, beta)?;
        for r in error_scaling_scan(&spec, &h, &g, &[0.3, 0.1, 0.03, 0.01, 0.001])? {
            println!("{beta:>5} {:>6} {:>8.4} {:>6} {:>10.2e}", r.eps_requested, r.t_max, r.n, r.error_measured);
        }
    }
    Ok(())
}
