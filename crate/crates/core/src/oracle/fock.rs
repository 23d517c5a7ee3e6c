use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::NormalOrderedOperator;
use crate::error::{Error, Result};
use crate::hamiltonian::{CoefficientMatrices, SystemSpec};

/// Largest η-sector dimension C(N, η) accepted by [`fock_matrix`].
pub const SECTOR_LIMIT: usize = 4096;

/// Largest mode count for full Fock-space matrices.
pub const FULL_FOCK_LIMIT: usize = 12;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r.min(usize::MAX as u128) as usize
}

/// Occupation bitstrings of Hamming weight η in ascending order.
pub fn sector_basis(n: usize, eta: usize) -> Result<Vec<u32>> {
    let dim = binomial(n, eta);
    if dim > SECTOR_LIMIT {
        return Err(Error::GuardExceeded {
            what: "η-sector dimension",
            size: dim,
            limit: SECTOR_LIMIT,
        });
    }
    if n > 31 {
        return Err(Error::TooLarge { modes: n, limit: 31 });
    }
    Ok((0u32..1 << n).filter(|s| s.count_ones() as usize == eta).collect())
}

/// Applies `a†_{c…} a_{a…}` (rightmost first) to an occupation bitstring.
fn apply_term(creation: &[usize], annihilation: &[usize], state: u32) -> Option<(f64, u32)> {
    let mut s = state;
    let mut sign = 1.0;
    for &j in annihilation.iter().rev() {
        if s >> j & 1 == 0 {
            return None;
        }
        if (s & ((1u32 << j) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        s ^= 1 << j;
    }
    for &j in creation.iter().rev() {
        if s >> j & 1 == 1 {
            return None;
        }
        if (s & ((1u32 << j) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        s ^= 1 << j;
    }
    Some((sign, s))
}

/// Matrix of a number-preserving operator on the η-particle sector.
pub fn fock_matrix(op: &NormalOrderedOperator, eta: usize) -> Result<DMatrix<Complex64>> {
    if !op.is_number_preserving() {
        return Err(Error::NotNumberPreserving);
    }
    let n = op.n_modes();
    if eta > n {
        return Err(Error::EtaOutOfRange { eta, modes: n });
    }
    let basis = sector_basis(n, eta)?;
    let index: HashMap<u32, usize> = basis.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut m = DMatrix::zeros(basis.len(), basis.len());
    for ((c, a), v) in op.terms() {
        for (col, &s) in basis.iter().enumerate() {
            if let Some((sign, t)) = apply_term(c, a, s) {
                m[(index[&t], col)] += v * sign;
            }
        }
    }
    Ok(m)
}

/// Real part of [`fock_matrix`], rejecting operators with complex coefficients.
pub fn fock_matrix_real(op: &NormalOrderedOperator, eta: usize) -> Result<DMatrix<f64>> {
    if op.terms().values().any(|c| c.im != 0.0) {
        return Err(Error::Format("operator has complex coefficients".into()));
    }
    Ok(fock_matrix(op, eta)?.map(|z| z.re))
}

/// Matrix on the full `2^N` Fock space, mode j ↔ bit j.
pub fn dense_matrix(op: &NormalOrderedOperator) -> Result<DMatrix<Complex64>> {
    let n = op.n_modes();
    if n > FULL_FOCK_LIMIT {
        return Err(Error::TooLarge {
            modes: n,
            limit: FULL_FOCK_LIMIT,
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for ((c, a), v) in op.terms() {
        for s in 0..dim as u32 {
            if let Some((sign, t)) = apply_term(c, a, s) {
                m[(t as usize, s as usize)] += v * sign;
            }
        }
    }
    Ok(m)
}

/// Rows/columns of a full Fock matrix belonging to the η sector.
pub fn sector_block(full: &DMatrix<Complex64>, n: usize, eta: usize) -> Result<DMatrix<Complex64>> {
    let basis = sector_basis(n, eta)?;
    Ok(DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        full[(basis[i] as usize, basis[j] as usize)]
    }))
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Spectral norm of a real symmetric or antisymmetric matrix through `MᵀM`.
pub fn spectral_norm_real(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let g = m.transpose() * m;
    let g = (&g + g.transpose()) * 0.5;
    g.symmetric_eigenvalues().max().max(0.0).sqrt()
}

/// Dense complex matrix kept as separate real and imaginary parts so that
/// products go through the real matrix kernels.
#[derive(Debug, Clone)]
struct SplitComplex {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl SplitComplex {
    fn mul(&self, o: &SplitComplex) -> SplitComplex {
        SplitComplex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &SplitComplex) -> SplitComplex {
        SplitComplex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    /// Largest singular value from the real embedding of `D†D`.
    fn spectral_norm(&self) -> f64 {
        let n = self.re.nrows();
        if n == 0 {
            return 0.0;
        }
        let rt = self.re.transpose();
        let it = self.im.transpose();
        let a = &rt * &self.re + &it * &self.im;
        let b = &rt * &self.im - &it * &self.re;
        let mut e = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for i in 0..n {
                let aij = 0.5 * (a[(i, j)] + a[(j, i)]);
                let bij = 0.5 * (b[(i, j)] - b[(j, i)]);
                e[(i, j)] = aij;
                e[(i + n, j + n)] = aij;
                e[(i + n, j)] = bij;
                e[(i, j + n)] = -bij;
            }
        }
        e.symmetric_eigenvalues().max().max(0.0).sqrt()
    }
}

/// `exp(i·s·H)` for real symmetric `H` from its eigendecomposition.
fn evolution(eig: &SymmetricEigen<f64, nalgebra::Dyn>, s: f64) -> SplitComplex {
    let q = &eig.eigenvectors;
    let cos = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|l| (s * l).cos()));
    let sin = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|l| (s * l).sin()));
    let qt = q.transpose();
    SplitComplex {
        re: q * DMatrix::from_diagonal(&cos) * &qt,
        im: q * DMatrix::from_diagonal(&sin) * &qt,
    }
}

/// Order of the exponentials in a symmetric second-order step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrotterOrdering {
    /// `e^{itH_v/2} e^{itH_t} e^{itH_v/2}`
    Vtv,
    /// `e^{itH_t/2} e^{itH_v} e^{itH_t/2}`
    Tvt,
}

/// `H_t` and `H_v` on one η sector, with the exact quantities bounds are
/// compared against.
#[derive(Debug, Clone)]
pub struct SectorSystem {
    pub eta: usize,
    pub ht: DMatrix<f64>,
    pub hv: DMatrix<f64>,
    eig_t: SymmetricEigen<f64, nalgebra::Dyn>,
    eig_v: SymmetricEigen<f64, nalgebra::Dyn>,
    eig_h: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl SectorSystem {
    pub fn new(t: &DMatrix<f64>, u: &DVector<f64>, v: &DMatrix<f64>, eta: usize) -> Result<Self> {
        let ht_op = NormalOrderedOperator::from_real_quadratic(t)?;
        let hv_op = NormalOrderedOperator::from_density_density(v, u)?;
        let ht = fock_matrix_real(&ht_op, eta)?;
        let hv = fock_matrix_real(&hv_op, eta)?;
        let ht = (&ht + ht.transpose()) * 0.5;
        let hv = (&hv + hv.transpose()) * 0.5;
        let h = &ht + &hv;
        Ok(Self {
            eta,
            eig_t: ht.clone().symmetric_eigen(),
            eig_v: hv.clone().symmetric_eigen(),
            eig_h: h.symmetric_eigen(),
            ht,
            hv,
        })
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        let m = CoefficientMatrices::build(spec)?;
        Self::new(&m.t, &m.u, &m.v, spec.eta)
    }

    pub fn dim(&self) -> usize {
        self.ht.nrows()
    }

    fn first_commutator(&self) -> DMatrix<f64> {
        &self.ht * &self.hv - &self.hv * &self.ht
    }

    /// `‖[H_t, H_v]‖_η`.
    pub fn first_order(&self) -> f64 {
        spectral_norm_real(&self.first_commutator())
    }

    /// `‖[[H_t, H_v], H_t]‖_η`.
    pub fn tvt(&self) -> f64 {
        let k = self.first_commutator();
        spectral_norm_real(&(&k * &self.ht - &self.ht * &k))
    }

    /// `‖[[H_t, H_v], H_v]‖_η`.
    pub fn tvv(&self) -> f64 {
        let k = self.first_commutator();
        spectral_norm_real(&(&k * &self.hv - &self.hv * &k))
    }

    /// `‖e^{itH} − U₂(t)‖_η` for the given ordering.
    pub fn trotter_error(&self, t: f64, ordering: TrotterOrdering) -> f64 {
        if t == 0.0 || self.dim() == 0 {
            return 0.0;
        }
        let exact = evolution(&self.eig_h, t);
        let (outer, inner) = match ordering {
            TrotterOrdering::Vtv => (&self.eig_v, &self.eig_t),
            TrotterOrdering::Tvt => (&self.eig_t, &self.eig_v),
        };
        let half = evolution(outer, 0.5 * t);
        let step = half.mul(&evolution(inner, t)).mul(&half);
        exact.sub(&step).spectral_norm()
    }
}

/// Exact second-order Trotter error on the η sector of a spec.
pub fn exact_trotter_error(spec: &SystemSpec, t: f64, ordering: TrotterOrdering) -> Result<f64> {
    Ok(SectorSystem::from_spec(spec)?.trotter_error(t, ordering))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn number_operator_sector() {
        let op = NormalOrderedOperator::from_real_quadratic(&DMatrix::identity(5, 5)).unwrap();
        let m = fock_matrix(&op, 2).unwrap();
        assert_eq!(m, DMatrix::identity(10, 10).map(|x: f64| Complex64::new(2.0 * x, 0.0)));
    }

    #[test]
    fn single_particle_sector_is_the_matrix() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, 2.0, -1.0, 0.0, 0.5, 0.0, 3.0]);
        let op = NormalOrderedOperator::from_real_quadratic(&a).unwrap();
        let m = fock_matrix_real(&op, 1).unwrap();
        assert_eq!(m, a);
    }

    #[test]
    fn rejects_non_number_preserving() {
        let op = NormalOrderedOperator::term(2, &[0], &[], Complex64::new(1.0, 0.0));
        assert!(matches!(fock_matrix(&op, 1), Err(Error::NotNumberPreserving)));
    }

    #[test]
    fn pair_density_vanishes_for_one_particle() {
        let n0 = NormalOrderedOperator::number(3, 0);
        let n1 = NormalOrderedOperator::number(3, 1);
        let op = n0.product(&n1).unwrap();
        assert_eq!(spectral_norm(&fock_matrix(&op, 1).unwrap()), 0.0);
        assert!((spectral_norm(&fock_matrix(&op, 2).unwrap()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sector_guard() {
        assert!(matches!(sector_basis(16, 8), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn zero_time_and_commuting_split() {
        let t = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -0.5]);
        let sys = SectorSystem::new(&t, &DVector::zeros(2), &DMatrix::zeros(2, 2), 1).unwrap();
        assert_eq!(sys.trotter_error(0.0, TrotterOrdering::Vtv), 0.0);
        assert!(sys.trotter_error(0.7, TrotterOrdering::Tvt) < 1e-13);
    }
}
