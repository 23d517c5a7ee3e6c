use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::NormalOrderedOperator;
use crate::error::{Error, Result};

/// Largest mode count accepted by [`jordan_wigner`].
pub const JW_MODE_LIMIT: usize = 14;

/// Largest qubit count for dense Pauli matrices.
pub const DENSE_QUBIT_LIMIT: usize = 12;

/// Pauli string stored as bitmasks: bit j of `x`/`z` set gives X, Z or
/// (both) Y on qubit j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    pub x: u32,
    pub z: u32,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Letter on qubit `j`.
    pub fn letter(&self, j: usize) -> char {
        match (self.x >> j & 1, self.z >> j & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn label(&self, n: usize) -> String {
        (0..n).map(|j| self.letter(j)).collect()
    }

    /// Product `self · other` as (phase, string).
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        let mut phase = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let bits = (self.x | self.z | other.x | other.z) as u64;
        for j in 0..32 {
            if bits >> j & 1 == 0 {
                continue;
            }
            let p = (self.x >> j & 1, self.z >> j & 1);
            let q = (other.x >> j & 1, other.z >> j & 1);
            // X=(1,0) Y=(1,1) Z=(0,1); XY=iZ, YZ=iX, ZX=iY
            let f = match (p, q) {
                ((1, 0), (1, 1)) | ((1, 1), (0, 1)) | ((0, 1), (1, 0)) => i,
                ((1, 1), (1, 0)) | ((0, 1), (1, 1)) | ((1, 0), (0, 1)) => -i,
                _ => Complex64::new(1.0, 0.0),
            };
            phase *= f;
        }
        (
            phase,
            PauliString {
                x: self.x ^ other.x,
                z: self.z ^ other.z,
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliOperator {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(n_qubits: usize, s: PauliString, c: Complex64) -> Self {
        let mut op = Self::zero(n_qubits);
        op.terms.insert(s, c);
        op
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &BTreeMap<PauliString, Complex64> {
        &self.terms
    }

    pub fn coefficient_of(&self, label: &str) -> Complex64 {
        let mut s = PauliString::IDENTITY;
        for (j, ch) in label.chars().enumerate() {
            match ch {
                'X' => s.x |= 1 << j,
                'Y' => {
                    s.x |= 1 << j;
                    s.z |= 1 << j
                }
                'Z' => s.z |= 1 << j,
                _ => {}
            }
        }
        self.terms.get(&s).copied().unwrap_or_default()
    }

    pub fn add_term(&mut self, s: PauliString, c: Complex64) {
        *self.terms.entry(s).or_default() += c;
    }

    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    pub fn product(&self, other: &PauliOperator) -> PauliOperator {
        let mut out = PauliOperator::zero(self.n_qubits.max(other.n_qubits));
        for (s1, c1) in &self.terms {
            for (s2, c2) in &other.terms {
                let (ph, s) = s1.mul(s2);
                out.add_term(s, ph * c1 * c2);
            }
        }
        out
    }

    /// `Σ |c|` over non-identity strings.
    pub fn one_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(s, _)| !s.is_identity())
            .map(|(_, c)| c.norm())
            .sum()
    }

    /// `Σ |c|` including the identity string.
    pub fn one_norm_with_identity(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Largest imaginary part among coefficients (zero for a hermitian sum).
    pub fn max_imaginary(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.im.abs()))
    }

    /// Dense `2^n × 2^n` matrix, qubit j ↔ bit j of the basis index.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        let n = self.n_qubits;
        if n > DENSE_QUBIT_LIMIT {
            return Err(Error::TooLarge {
                modes: n,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        let i = Complex64::new(0.0, 1.0);
        for (s, c) in &self.terms {
            let y = s.x & s.z;
            for col in 0..dim {
                let mut phase = *c;
                let zeros_under_y = (y & !(col as u32)).count_ones();
                let ones_under_y = (y & col as u32).count_ones();
                let z_only = s.z & !s.x;
                if (z_only & col as u32).count_ones() % 2 == 1 {
                    phase = -phase;
                }
                // Y|0> = i|1>, Y|1> = −i|0>
                phase *= i.powu(zeros_under_y) * (-i).powu(ones_under_y);
                let row = col ^ s.x as usize;
                m[(row, col)] += phase;
            }
        }
        Ok(m)
    }
}

/// Jordan–Wigner image with `a_j = Z_0…Z_{j−1}(X_j + iY_j)/2`.
pub fn jordan_wigner(op: &NormalOrderedOperator) -> Result<PauliOperator> {
    let n = op.n_modes();
    if n > JW_MODE_LIMIT {
        return Err(Error::TooLarge {
            modes: n,
            limit: JW_MODE_LIMIT,
        });
    }
    let mut out = PauliOperator::zero(n);
    for ((creation, annihilation), c) in op.terms() {
        let mut acc = PauliOperator::single(n, PauliString::IDENTITY, *c);
        for &p in creation {
            acc = acc.product(&ladder(n, p, true));
        }
        for &p in annihilation {
            acc = acc.product(&ladder(n, p, false));
        }
        for (s, v) in acc.terms {
            out.add_term(s, v);
        }
    }
    let scale = out.terms.values().fold(0.0f64, |m, c| m.max(c.norm()));
    out.prune(1e-14 * scale);
    Ok(out)
}

fn ladder(n: usize, j: usize, creation: bool) -> PauliOperator {
    let string = (1u32 << j) - 1;
    let half = Complex64::new(0.5, 0.0);
    let ihalf = Complex64::new(0.0, if creation { -0.5 } else { 0.5 });
    let mut op = PauliOperator::zero(n);
    op.add_term(PauliString { x: 1 << j, z: string }, half);
    op.add_term(
        PauliString {
            x: 1 << j,
            z: string | 1 << j,
        },
        ihalf,
    );
    op
}
