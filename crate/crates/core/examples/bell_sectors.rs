//! Exact Bell-sector spectra of the infinite-temperature auxiliary dynamics,
//! with and without the Pauli-cycle dressing.

use gibbs_sos::auxdyn::{bell_sector_analysis, dressed_bell_spectrum, one_site_matrix, pauli_aux};

fn main() -> gibbs_sos::Result<()> {
    let gen = pauli_aux(2, false)?;
    for support in [vec![0], vec![0, 1]] {
        let (_, rep) = bell_sector_analysis(&gen, &support)?;
        let re: Vec<String> = rep.eigenvalues.iter().map(|(r, _)| format!("{r:.3}")).collect();
        println!("undressed sector {support:?}: [{}], stationary residual {:.1e}", re.join(", "), rep.stationary_residual);
    }

    let m = one_site_matrix(&pauli_aux(1, true)?)?;
    println!("dressed one-site matrix:\n{:.3}", m.map(|z| z.re));
    for n in [1, 2] {
        let s = dressed_bell_spectrum(n)?;
        println!("dressed n = {n}: gap {:.10}, kernel dimension {}, deviation from one-site sums {:.1e}", s.gap, s.kernel_dimension, s.max_deviation);
    }
    Ok(())
}
