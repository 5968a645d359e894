//! Exact spectrum, Bohr frequencies and Gibbs state of a small TFIM chain.

use gibbs_sos::spectral::{bohr_decompose, build_tfim, gibbs_state, Pauli, PauliString};

fn main() -> gibbs_sos::Result<()> {
    let h = build_tfim(3, 1.0, 0.5)?;
    println!("levels of the 3-site chain (||H|| = {:.4}):", h.norm());
    for level in h.levels() {
        println!("  E = {:+.6}  degeneracy {}", level.energy, level.indices.len());
    }

    let x1 = PauliString::single(3, 0, Pauli::X).matrix();
    let bohr = bohr_decompose(&h, &x1)?;
    println!("X1 has {} Bohr components, completeness residual {:.1e}", bohr.len(), bohr.completeness_residual());

    for beta in [0.5, 2.0, 8.0] {
        let g = gibbs_state(&h, beta)?;
        let zz = PauliString::parse("Z1Z2", 3)?.matrix();
        println!("beta = {beta:>4}: <Z1 Z2> = {:+.6}, log Z = {:.6}", g.expectation(&zz).re, g.log_z());
    }
    Ok(())
}
