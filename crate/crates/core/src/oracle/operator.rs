use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest mode count accepted when building operators from matrices.
pub const MODE_LIMIT: usize = 16;

/// Upper limit on the number of terms any product may produce.
pub const TERM_LIMIT: usize = 4_000_000;

const PRUNE_RELATIVE: f64 = 1e-14;

/// Key of a normal-ordered monomial `a†_{c1}…a†_{ck} a_{a1}…a_{al}`, both
/// index lists strictly ascending.
pub type TermKey = (Vec<usize>, Vec<usize>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Fermionic operator in canonical normal order.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalOrderedOperator {
    n_modes: usize,
    terms: BTreeMap<TermKey, Complex64>,
}

impl NormalOrderedOperator {
    pub fn zero(n_modes: usize) -> Self {
        Self {
            n_modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::term(n_modes, &[], &[], Complex64::new(1.0, 0.0))
    }

    /// A single product `c·a†_{creation…} a_{annihilation…}` in the given
    /// (not necessarily canonical) order.
    pub fn term(n_modes: usize, creation: &[usize], annihilation: &[usize], c: Complex64) -> Self {
        let word: Vec<Ladder> = creation
            .iter()
            .map(|&i| Ladder::Create(i))
            .chain(annihilation.iter().map(|&i| Ladder::Annihilate(i)))
            .collect();
        let mut out = BTreeMap::new();
        normal_order(&word, c, &mut out);
        let mut op = Self {
            n_modes,
            terms: out,
        };
        op.prune();
        op
    }

    pub fn number(n_modes: usize, p: usize) -> Self {
        Self::term(n_modes, &[p], &[p], Complex64::new(1.0, 0.0))
    }

    /// `H(A) = Σ A_pq a†_p a_q`.
    pub fn from_quadratic(a: &DMatrix<Complex64>) -> Result<Self> {
        let n = a.nrows();
        guard_modes(n)?;
        let mut terms = BTreeMap::new();
        for p in 0..n {
            for q in 0..n {
                let c = a[(p, q)];
                if c != Complex64::new(0.0, 0.0) {
                    terms.insert((vec![p], vec![q]), c);
                }
            }
        }
        let mut op = Self { n_modes: n, terms };
        op.prune();
        Ok(op)
    }

    pub fn from_real_quadratic(a: &DMatrix<f64>) -> Result<Self> {
        Self::from_quadratic(&a.map(|x| Complex64::new(x, 0.0)))
    }

    /// `Σ_p U_p n_p + Σ_{p≠q} V_pq n_p n_q`.
    pub fn from_density_density(v: &DMatrix<f64>, u: &DVector<f64>) -> Result<Self> {
        let n = v.nrows();
        guard_modes(n)?;
        let mut terms = BTreeMap::new();
        for p in 0..n {
            if u[p] != 0.0 {
                terms.insert((vec![p], vec![p]), Complex64::new(u[p], 0.0));
            }
        }
        for p in 0..n {
            for q in p + 1..n {
                // n_p n_q = −a†_p a†_q a_p a_q
                let c = -(v[(p, q)] + v[(q, p)]);
                if c != 0.0 {
                    terms.insert((vec![p, q], vec![p, q]), Complex64::new(c, 0.0));
                }
            }
        }
        let mut op = Self { n_modes: n, terms };
        op.prune();
        Ok(op)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &BTreeMap<TermKey, Complex64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, creation: &[usize], annihilation: &[usize]) -> Complex64 {
        self.terms
            .get(&(creation.to_vec(), annihilation.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    /// True when every term has as many creation as annihilation operators.
    pub fn is_number_preserving(&self) -> bool {
        self.terms.keys().all(|(c, a)| c.len() == a.len())
    }

    /// Drops coefficients below `1e-14·max|c|`.
    pub fn prune(&mut self) {
        let max = self.terms.values().fold(0.0f64, |m, c| m.max(c.norm()));
        let tol = PRUNE_RELATIVE * max;
        self.terms.retain(|_, c| c.norm() > tol);
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for ((c, a), v) in &self.terms {
            // (a†_C a_A)† = a†_{rev A} a_{rev C}; reversing k indices costs k(k−1)/2 swaps
            let sign = reversal_sign(c.len()) * reversal_sign(a.len());
            *out.terms.entry((a.clone(), c.clone())).or_default() += v.conj() * sign;
        }
        out.prune();
        out
    }

    /// Product in canonical normal order.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let n = self.n_modes.max(other.n_modes);
        let estimate = self.terms.len().saturating_mul(other.terms.len());
        if estimate > TERM_LIMIT {
            return Err(Error::GuardExceeded {
                what: "operator product terms",
                size: estimate,
                limit: TERM_LIMIT,
            });
        }
        let mut out = BTreeMap::new();
        let mut word = Vec::new();
        for ((c1, a1), v1) in &self.terms {
            for ((c2, a2), v2) in &other.terms {
                word.clear();
                word.extend(c1.iter().map(|&i| Ladder::Create(i)));
                word.extend(a1.iter().map(|&i| Ladder::Annihilate(i)));
                word.extend(c2.iter().map(|&i| Ladder::Create(i)));
                word.extend(a2.iter().map(|&i| Ladder::Annihilate(i)));
                normal_order(&word, v1 * v2, &mut out);
            }
        }
        let mut op = Self {
            n_modes: n,
            terms: out,
        };
        op.prune();
        Ok(op)
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.product(other)? - &other.product(self)?)
    }

    /// `Σ_j |α_j|` over the normal-ordered coefficients.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Largest coefficient magnitude.
    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Rebuilds every term through the normal-ordering routine.
    pub fn renormal_order(&self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for ((c, a), v) in &self.terms {
            let t = Self::term(self.n_modes, c, a, *v);
            out = &out + &t;
        }
        out
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            *terms.entry(k.clone()).or_default() += v * sign;
        }
        let mut op = Self {
            n_modes: self.n_modes.max(other.n_modes),
            terms,
        };
        op.prune();
        op
    }
}

impl Add for &NormalOrderedOperator {
    type Output = NormalOrderedOperator;
    fn add(self, rhs: Self) -> NormalOrderedOperator {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &NormalOrderedOperator {
    type Output = NormalOrderedOperator;
    fn sub(self, rhs: Self) -> NormalOrderedOperator {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &NormalOrderedOperator {
    type Output = NormalOrderedOperator;
    fn neg(self) -> NormalOrderedOperator {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &NormalOrderedOperator {
    type Output = NormalOrderedOperator;
    fn mul(self, rhs: Complex64) -> NormalOrderedOperator {
        self.scale(rhs)
    }
}

fn guard_modes(n: usize) -> Result<()> {
    if n > MODE_LIMIT {
        Err(Error::TooLarge {
            modes: n,
            limit: MODE_LIMIT,
        })
    } else {
        Ok(())
    }
}

fn reversal_sign(k: usize) -> f64 {
    if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Moves every creation operator left of every annihilation operator using
/// `a_i a†_j = δ_ij − a†_j a_i`, then sorts each group with parity.
fn normal_order(word: &[Ladder], coeff: Complex64, out: &mut BTreeMap<TermKey, Complex64>) {
    let split = word
        .windows(2)
        .position(|w| matches!((w[0], w[1]), (Ladder::Annihilate(_), Ladder::Create(_))));
    match split {
        Some(i) => {
            let (Ladder::Annihilate(a), Ladder::Create(c)) = (word[i], word[i + 1]) else {
                unreachable!()
            };
            let mut swapped = word.to_vec();
            swapped.swap(i, i + 1);
            normal_order(&swapped, -coeff, out);
            if a == c {
                let mut contracted = word.to_vec();
                contracted.drain(i..i + 2);
                normal_order(&contracted, coeff, out);
            }
        }
        None => {
            let mut creation = Vec::new();
            let mut annihilation = Vec::new();
            for op in word {
                match *op {
                    Ladder::Create(i) => creation.push(i),
                    Ladder::Annihilate(i) => annihilation.push(i),
                }
            }
            let (Some(s1), Some(s2)) = (sort_with_sign(&mut creation), sort_with_sign(&mut annihilation))
            else {
                return;
            };
            *out.entry((creation, annihilation)).or_default() += coeff * (s1 * s2);
        }
    }
}

/// Sorts ascending, returning the permutation sign, or `None` when an index
/// repeats (the product vanishes).
fn sort_with_sign(v: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// One term of an operator dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpTerm {
    pub creation: Vec<usize>,
    pub annihilation: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

impl NormalOrderedOperator {
    pub fn dump(&self) -> Vec<DumpTerm> {
        self.terms
            .iter()
            .map(|((c, a), v)| DumpTerm {
                creation: c.clone(),
                annihilation: a.clone(),
                re: v.re,
                im: v.im,
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.dump())?)
    }

    pub fn from_dump(n_modes: usize, terms: &[DumpTerm]) -> Self {
        let mut op = Self::zero(n_modes);
        for t in terms {
            let next = Self::term(n_modes, &t.creation, &t.annihilation, Complex64::new(t.re, t.im));
            op = &op + &next;
        }
        op
    }
}
