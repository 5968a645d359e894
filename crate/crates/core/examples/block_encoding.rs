//! Composite block encoding of the stacked factor from its oracles.

use gibbs_sos::blockenc::{assemble_ub, build_oracles};
use gibbs_sos::factorization::build_factors;
use gibbs_sos::linalg::c;
use gibbs_sos::lindblad::{make_dll, Weighting};
use gibbs_sos::quadrature::{assemble_b, QuadratureGrid};
use gibbs_sos::spectral::{gibbs_state, Pauli, SpectralHamiltonian};

fn main() -> gibbs_sos::Result<()> {
    let h = SpectralHamiltonian::new(1, Pauli::Z.matrix() + Pauli::X.matrix() * c(0.3))?;
    let beta = 1.0;
    let couplings = [("X1".to_string(), Pauli::X.matrix()), ("Z1".to_string(), Pauli::Z.matrix())];
    let pairs = build_factors(&make_dll(&h, &couplings, beta, Weighting::gaussian())?, &gibbs_state(&h, beta)?)?;
    let grid = QuadratureGrid::uniform(beta, 1.0, 4)?;

    let oracles = build_oracles(&pairs, &h, &grid, true)?;
    let enc = assemble_ub(&oracles)?;
    let residual = enc.verify_against(&assemble_b(&pairs, &grid)?, oracles.j_pad, oracles.n_pad)?;
    println!("J = {}, N = {}, alpha = {:.6}, {} qubits, max block residual {residual:.1e}", pairs.len(), grid.points().len(), enc.alpha, oracles.registers.total());
    println!("{}", serde_json::to_string_pretty(&enc.manifest()).unwrap_or_default());
    Ok(())
}
