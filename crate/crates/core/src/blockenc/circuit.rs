use serde::Serialize;

use crate::linalg::{Mat, C64};

/// Qubit layout `[branch][p][r][q][sys1][sys2]`, most significant first.
/// `sys2` is the row index of a vectorized operator (left multiplication acts
/// there), `sys1` the column index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Registers {
    pub p: usize,
    pub r: usize,
    pub q: usize,
    pub n: usize,
}

impl Registers {
    pub fn total(&self) -> usize {
        1 + self.p + self.r + self.q + 2 * self.n
    }

    fn range(start: usize, len: usize) -> Vec<usize> {
        (start..start + len).collect()
    }

    pub fn branch(&self) -> Vec<usize> {
        vec![0]
    }

    pub fn ancilla(&self) -> Vec<usize> {
        Self::range(1, self.p)
    }

    pub fn channel(&self) -> Vec<usize> {
        Self::range(1 + self.p, self.r)
    }

    pub fn grid(&self) -> Vec<usize> {
        Self::range(1 + self.p + self.r, self.q)
    }

    pub fn sys1(&self) -> Vec<usize> {
        Self::range(1 + self.p + self.r + self.q, self.n)
    }

    pub fn sys2(&self) -> Vec<usize> {
        Self::range(1 + self.p + self.r + self.q + self.n, self.n)
    }

    pub fn wires(&self, names: &[Wire]) -> Vec<usize> {
        names.iter().flat_map(|w| match w {
            Wire::Branch => self.branch(),
            Wire::Ancilla => self.ancilla(),
            Wire::Channel => self.channel(),
            Wire::Grid => self.grid(),
            Wire::Sys1 => self.sys1(),
            Wire::Sys2 => self.sys2(),
        }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Wire {
    Branch,
    Ancilla,
    Channel,
    Grid,
    Sys1,
    Sys2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Oracle {
    #[serde(rename = "U_Bsharp")]
    BSharp,
    #[serde(rename = "U_BflatT")]
    BFlatT,
    #[serde(rename = "U_sel")]
    Sel,
    #[serde(rename = "U_selT")]
    SelT,
    #[serde(rename = "U_prep")]
    Prep,
    #[serde(rename = "HX")]
    Hx,
    #[serde(rename = "H")]
    Hadamard,
}

impl Oracle {
    pub fn is_query(self) -> bool {
        !matches!(self, Oracle::Hx | Oracle::Hadamard)
    }
}

/// One oracle application, optionally controlled on the branch qubit.
#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub oracle: Oracle,
    pub dagger: bool,
    pub wires: Vec<Wire>,
    pub branch: Option<u8>,
}

/// Apply `op` on qubits `targets` of a `total`-qubit register to every column
/// of `state`; with `control = Some((qubit, value))` the op only acts where
/// that qubit equals `value`.
pub fn apply_on(op: &Mat, targets: &[usize], total: usize, control: Option<(usize, bool)>, state: &mut Mat) {
    let k = targets.len();
    let sub = 1usize << k;
    assert_eq!(op.nrows(), sub, "operator size does not match target count");
    let bit = |q: usize| total - 1 - q;
    let mask: usize = targets.iter().map(|&q| 1usize << bit(q)).sum();
    let offsets: Vec<usize> = (0..sub)
        .map(|s| targets.iter().enumerate().filter(|(pos, _)| s >> (k - 1 - pos) & 1 == 1).map(|(_, &q)| 1usize << bit(q)).sum())
        .collect();
    let dim = 1usize << total;
    let mut buf = vec![C64::new(0.0, 0.0); sub];
    for col in 0..state.ncols() {
        for base in (0..dim).filter(|b| b & mask == 0) {
            if let Some((cq, v)) = control {
                if (base >> bit(cq) & 1 == 1) != v {
                    continue;
                }
            }
            for (s, off) in offsets.iter().enumerate() {
                buf[s] = state[(base | off, col)];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (s, b) in buf.iter().enumerate() {
                    acc += op[(r, s)] * b;
                }
                state[(base | off, col)] = acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{embed, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(4, &mut rng);
        let targets = [3, 1];
        let mut m = Mat::identity(16, 16);
        apply_on(&u, &targets, 4, None, &mut m);
        assert!((m - embed(&u, &targets, 4)).norm() < 1e-12);
    }

    #[test]
    fn control_selects_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_unitary(2, &mut rng);
        let mut m = Mat::identity(4, 4);
        apply_on(&u, &[1], 2, Some((0, true)), &mut m);
        assert!((m.view((0, 0), (2, 2)).into_owned() - Mat::identity(2, 2)).norm() < 1e-15);
        assert!((m.view((2, 2), (2, 2)).into_owned() - &u).norm() < 1e-15);
    }
}
