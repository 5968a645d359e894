//! Pauli strings on `n` qubits. Site 1 is the most significant tensor factor.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c, kron, Mat, C64, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Mat {
        match self {
            Pauli::I => Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
            Pauli::X => Mat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            Pauli::Y => Mat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            Pauli::Z => Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }

    /// Single-site product `self * other = phase * letter`.
    pub fn mul(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (Phase::One, p),
            (a, b) if a == b => (Phase::One, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MinusI, Z),
            (Z, Y) => (Phase::MinusI, X),
            (X, Z) => (Phase::MinusI, Y),
            _ => unreachable!(),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Unit phase in `{+1, +i, -1, -i}`, stored as a power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    fn power(self) -> u8 {
        match self {
            Phase::One => 0,
            Phase::I => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    fn from_power(p: u8) -> Self {
        match p % 4 {
            0 => Phase::One,
            1 => Phase::I,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase::from_power(self.power() + other.power())
    }

    pub fn value(self) -> C64 {
        match self {
            Phase::One => ONE,
            Phase::I => I,
            Phase::MinusOne => -ONE,
            Phase::MinusI => -I,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: Phase,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters, phase: Phase::One }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n])
    }

    /// Single non-identity letter at `site` (0-based).
    pub fn single(n: usize, site: usize, p: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[site] = p;
        Self::new(letters)
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Sites carrying a non-identity letter (0-based).
    pub fn support(&self) -> Vec<usize> {
        self.letters.iter().enumerate().filter(|(_, p)| **p != Pauli::I).map(|(k, _)| k).collect()
    }

    pub fn weight(&self) -> usize {
        self.support().len()
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n(), other.n(), "Pauli strings on different qubit counts");
        let mut phase = self.phase.mul(other.phase);
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(a, b)| {
                let (ph, p) = a.mul(*b);
                phase = phase.mul(ph);
                p
            })
            .collect();
        PauliString { letters, phase }
    }

    pub fn matrix(&self) -> Mat {
        let mut m = Mat::from_element(1, 1, self.phase.value());
        for p in &self.letters {
            m = kron(&m, &p.matrix());
        }
        m
    }

    /// Parse the compact site-indexed form used in configuration files:
    /// `"X1"`, `"Z1Z2"`, `"-Y3"`, `"I"`. Sites are 1-based.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut rest = text.trim();
        let mut phase = Phase::One;
        if let Some(r) = rest.strip_prefix('-') {
            phase = Phase::MinusOne;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            phase = phase.mul(Phase::I);
            rest = r;
        }
        let mut letters = vec![Pauli::I; n];
        if rest == "I" || rest.is_empty() {
            return Ok(Self { letters, phase });
        }
        let chars: Vec<char> = rest.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            let p = match chars[k] {
                'X' | 'x' => Pauli::X,
                'Y' | 'y' => Pauli::Y,
                'Z' | 'z' => Pauli::Z,
                other => return Err(Error::Parse(format!("unexpected '{other}' in Pauli string {text:?}"))),
            };
            k += 1;
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let site: usize = chars[start..k]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::Parse(format!("missing site index in Pauli string {text:?}")))?;
            if site == 0 || site > n {
                return Err(Error::Parse(format!("site {site} out of range 1..={n} in {text:?}")));
            }
            if letters[site - 1] != Pauli::I {
                return Err(Error::Parse(format!("site {site} repeated in {text:?}")));
            }
            letters[site - 1] = p;
        }
        Ok(Self { letters, phase })
    }

    /// Compact label, e.g. `Z1Z2`; identity prints as `I`.
    pub fn label(&self) -> String {
        let body: String = self
            .letters
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(k, p)| format!("{}{}", p.symbol(), k + 1))
            .collect();
        let body = if body.is_empty() { "I".to_string() } else { body };
        let prefix = match self.phase {
            Phase::One => "",
            Phase::I => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        format!("{prefix}{body}")
    }

    /// All `4^n` unsigned Pauli strings, lexicographic in (I, X, Y, Z) with
    /// site 1 most significant.
    pub fn all(n: usize) -> Vec<PauliString> {
        let mut out = Vec::with_capacity(1 << (2 * n));
        for code in 0..(1usize << (2 * n)) {
            let letters = (0..n).map(|site| Pauli::ALL[(code >> (2 * (n - 1 - site))) & 3]).collect();
            out.push(PauliString::new(letters));
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Pauli::I),
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            _ => Err(Error::Parse(format!("unknown Pauli letter {s:?}"))),
        }
    }
}

/// Scaled sum of Pauli strings as a dense matrix.
pub fn pauli_sum(n: usize, terms: &[(f64, PauliString)]) -> Mat {
    let d = 1usize << n;
    terms.iter().fold(Mat::zeros(d, d), |acc, (w, p)| acc + p.matrix() * c(*w))
}
