use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, Mat};
use crate::quadrature::RectFactor;

use super::circuit::{apply_on, Oracle, Registers, Step, Wire};
use super::oracles::{unitarity_residual, OracleSet, ORACLE_TOL};

/// `U` with `(⟨0^m| ⊗ I) U (|0^m⟩ ⊗ I) ≈ target / alpha`, where the input
/// side additionally fixes the channel and grid registers to zero.
#[derive(Debug, Clone, Serialize)]
pub struct BlockEncoding {
    #[serde(skip)]
    pub unitary: Mat,
    pub alpha: f64,
    pub ancilla_count: usize,
    pub registers: Registers,
    pub circuit: Vec<Step>,
    #[serde(skip)]
    pub target: Mat,
}

fn hadamard() -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Mat::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)])
}

fn hx() -> Mat {
    let x = Mat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
    hadamard() * x
}

/// Circuit of the composite encoding, in application order.
pub fn circuit() -> Vec<Step> {
    use Oracle::*;
    use Wire::*;
    let step = |oracle, dagger, wires: &[Wire], branch| Step { oracle, dagger, wires: wires.to_vec(), branch };
    vec![
        step(Prep, false, &[Grid], None),
        step(Hx, false, &[Branch], None),
        step(Sel, true, &[Grid, Sys2], Some(0)),
        step(BSharp, false, &[Ancilla, Channel, Sys2], Some(0)),
        step(Sel, false, &[Grid, Sys2], Some(0)),
        step(SelT, false, &[Grid, Sys1], Some(1)),
        step(BFlatT, false, &[Ancilla, Channel, Sys1], Some(1)),
        step(SelT, true, &[Grid, Sys1], Some(1)),
        step(Hadamard, false, &[Branch], None),
    ]
}

/// Oracle uses per name, inverses counted with their oracle.
pub fn query_counts(steps: &[Step]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for s in steps.iter().filter(|s| s.oracle.is_query()) {
        let name = serde_json::to_value(s.oracle).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        *out.entry(name).or_insert(0) += 1;
    }
    out
}

fn oracle_matrix(o: &OracleSet, oracle: Oracle) -> Mat {
    match oracle {
        Oracle::BSharp => o.u_bsharp.clone(),
        Oracle::BFlatT => o.u_bflat_t.clone(),
        Oracle::Sel => o.u_sel.clone(),
        Oracle::SelT => o.u_sel_t.clone(),
        Oracle::Prep => o.u_prep.clone(),
        Oracle::Hx => hx(),
        Oracle::Hadamard => hadamard(),
    }
}

fn run(o: &OracleSet, steps: &[Step], state: &mut Mat) {
    let regs = o.registers;
    let total = regs.total();
    for s in steps {
        let m = oracle_matrix(o, s.oracle);
        let m = if s.dagger { m.adjoint() } else { m };
        let control = s.branch.map(|b| (0usize, b == 1));
        apply_on(&m, &regs.wires(&s.wires), total, control, state);
    }
}

/// Composite `U_𝔹`.
pub fn assemble_ub(o: &OracleSet) -> Result<BlockEncoding> {
    let regs = o.registers;
    let steps = circuit();
    let dim = 1usize << regs.total();
    let mut u = Mat::identity(dim, dim);
    run(o, &steps, &mut u);
    let residual = unitarity_residual(&u);
    if residual > ORACLE_TOL {
        return Err(Error::Assembly { block: "U_B".into(), residual });
    }
    let enc = BlockEncoding { unitary: u, alpha: o.alpha(), ancilla_count: 1 + regs.p, registers: regs, circuit: steps, target: Mat::zeros(0, 0) };
    let target = enc.extract() * c(enc.alpha);
    Ok(BlockEncoding { target, ..enc })
}

impl BlockEncoding {
    fn out_rows(&self) -> usize {
        1usize << (self.registers.r + self.registers.q + 2 * self.registers.n)
    }

    fn in_cols(&self) -> usize {
        1usize << (2 * self.registers.n)
    }

    /// Rows with branch and ancilla zero, columns with every ancilla,
    /// channel and grid qubit zero.
    pub fn extract(&self) -> Mat {
        self.unitary.view((0, 0), (self.out_rows(), self.in_cols())).into_owned()
    }

    /// Compare `α·extract()` with `𝔹` (zero rows for padded channels and
    /// grid points) entrywise; reports the worst `(j, k)` block on failure.
    pub fn verify_against(&self, b: &RectFactor, j_pad: usize, n_pad: usize) -> Result<f64> {
        let dd = self.in_cols();
        let block = self.extract() * c(self.alpha);
        let n_points = b.grid().nodes().len();
        let mut worst = (0.0f64, (0usize, 0usize));
        for j in 0..j_pad {
            for k in 0..n_pad {
                let got = block.view(((j * n_pad + k) * dd, 0), (dd, dd));
                let row = j * n_points + k;
                let expect = if k < n_points && row * dd < b.stacked().nrows() {
                    b.stacked().view((row * dd, 0), (dd, dd)).into_owned()
                } else {
                    Mat::zeros(dd, dd)
                };
                let r = (got - expect).iter().fold(0.0f64, |m, z| m.max(z.norm()));
                if r > worst.0 {
                    worst = (r, (j, k));
                }
            }
        }
        if worst.0 > ORACLE_TOL {
            return Err(Error::Assembly { block: format!("(j, k) = {:?}", worst.1), residual: worst.0 });
        }
        Ok(worst.0)
    }

    pub fn queries(&self) -> BTreeMap<String, usize> {
        query_counts(&self.circuit)
    }

    /// JSON description of the circuit with register wiring.
    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "alpha": self.alpha,
            "ancilla_count": self.ancilla_count,
            "registers": self.registers,
            "steps": self.circuit,
            "queries": self.queries(),
        })
    }
}

/// Block of one LCU branch alone: `0` gives `(I ⊗ B♯_{j,t_k})`, `1` gives
/// `(B♭_{j,t_k})ᵀ ⊗ I`, each weighted by `√(g_k/C)/(√J·scale)`.
pub fn branch_block(o: &OracleSet, branch: u8) -> Mat {
    let regs = o.registers;
    let steps: Vec<Step> = circuit().into_iter().filter(|s| s.oracle == Oracle::Prep || s.branch == Some(branch)).collect();
    let dim = 1usize << regs.total();
    let offset = (branch as usize) << (regs.total() - 1);
    let cols = 1usize << (2 * regs.n);
    let mut state = Mat::zeros(dim, cols);
    for i in 0..cols {
        state[(offset + i, i)] = c(1.0);
    }
    run(o, &steps, &mut state);
    let rows = 1usize << (regs.r + regs.q + 2 * regs.n);
    state.view((offset, 0), (rows, cols)).into_owned()
}
