//! Reduced fermionic seminorm of free-fermionic coefficient matrices.
//!
//! For a coefficient matrix `A` with eigenvalues λ(A), the seminorm of
//! `H(A) = Σ A_ij a†_i a_j` on the η-particle sector is the largest
//! `|Σ_{λ∈S} λ|` over η-element subsets `S`. For hermitian `A` only the η
//! largest and η smallest eigenvalues need to be compared.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used when classifying a matrix as (anti-)hermitian.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Largest N accepted by [`brute_force_seminorm`].
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Hermitian,
    AntiHermitian,
    General,
}

/// A square coefficient matrix together with its symmetry class.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    entries: DMatrix<Complex64>,
    symmetry: Symmetry,
    diagonal: bool,
}

impl CoefficientMatrix {
    /// Wraps `entries`, detecting the symmetry class.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let symmetry = classify(&entries);
        let diagonal = is_diagonal(&entries);
        Ok(Self {
            entries,
            symmetry,
            diagonal,
        })
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    /// Real diagonal (hence hermitian) matrix.
    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let entries = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self {
            entries,
            symmetry: Symmetry::Hermitian,
            diagonal: true,
        }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        Self::new(self.entries.map(|z| z * c))
    }

    /// Hermitian representative: `A` itself, or `−iA` for anti-hermitian `A`.
    pub fn hermitian_part(&self) -> Result<DMatrix<Complex64>> {
        match self.symmetry {
            Symmetry::Hermitian => Ok(self.entries.clone()),
            Symmetry::AntiHermitian => Ok(self.entries.map(|z| z * Complex64::new(0.0, -1.0))),
            Symmetry::General => Err(Error::UnsupportedSymmetry {
                asymmetry: asymmetry(&self.entries),
            }),
        }
    }
}

fn is_diagonal(m: &DMatrix<Complex64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)))
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn asymmetry(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut herm = 0.0f64;
    let mut anti = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let a = m[(i, j)];
            let b = m[(j, i)].conj();
            herm = herm.max((a - b).norm());
            anti = anti.max((a + b).norm());
        }
    }
    herm.min(anti)
}

/// Classifies `m` as hermitian, anti-hermitian or general, with tolerance
/// `SYMMETRY_TOLERANCE · max|m_ij|`. The zero matrix counts as hermitian.
pub fn classify(m: &DMatrix<Complex64>) -> Symmetry {
    let n = m.nrows();
    let tol = SYMMETRY_TOLERANCE * max_abs(m);
    let mut herm = true;
    let mut anti = true;
    for i in 0..n {
        for j in i..n {
            let a = m[(i, j)];
            let b = m[(j, i)].conj();
            if (a - b).norm() > tol {
                herm = false;
            }
            if (a + b).norm() > tol {
                anti = false;
            }
            if !herm && !anti {
                return Symmetry::General;
            }
        }
    }
    if herm {
        Symmetry::Hermitian
    } else {
        Symmetry::AntiHermitian
    }
}

/// Same classification for a real matrix (symmetric / antisymmetric).
pub fn classify_real(m: &DMatrix<f64>) -> Symmetry {
    let n = m.nrows();
    let tol = SYMMETRY_TOLERANCE * m.amax();
    let mut sym = true;
    let mut anti = true;
    for i in 0..n {
        for j in i..n {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            if (a - b).abs() > tol {
                sym = false;
            }
            if (a + b).abs() > tol {
                anti = false;
            }
            if !sym && !anti {
                return Symmetry::General;
            }
        }
    }
    if sym {
        Symmetry::Hermitian
    } else {
        Symmetry::AntiHermitian
    }
}

fn check_eta(n: usize, eta: usize) -> Result<()> {
    if eta > n {
        Err(Error::EtaOutOfRange { eta, modes: n })
    } else {
        Ok(())
    }
}

/// Seminorm from a list of real eigenvalues (any order).
pub fn seminorm_from_eigenvalues(eigenvalues: &[f64], eta: usize) -> Result<f64> {
    check_eta(eigenvalues.len(), eta)?;
    if eta == 0 {
        return Ok(0.0);
    }
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let low: f64 = sorted[..eta].iter().sum();
    let high: f64 = sorted[sorted.len() - eta..].iter().sum();
    Ok(low.abs().max(high.abs()))
}

/// Seminorm of a real diagonal matrix given by its diagonal.
pub fn seminorm_diagonal(diag: &[f64], eta: usize) -> Result<f64> {
    seminorm_from_eigenvalues(diag, eta)
}

/// If `m` (even order) has vanishing off-diagonal half blocks, returns
/// whether the two diagonal blocks are identical.
fn half_block_split<T: PartialEq + Copy + nalgebra::Scalar>(m: &DMatrix<T>, zero: T) -> Option<bool> {
    let n = m.nrows();
    if n < 4 || !n.is_multiple_of(2) {
        return None;
    }
    let h = n / 2;
    for j in 0..h {
        for i in 0..h {
            if m[(i + h, j)] != zero || m[(i, j + h)] != zero {
                return None;
            }
        }
    }
    let same = (0..h).all(|j| (0..h).all(|i| m[(i, j)] == m[(i + h, j + h)]));
    Some(same)
}

fn real_symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if let Some(same) = half_block_split(m, 0.0) {
        let h = m.nrows() / 2;
        let top = real_symmetric_eigenvalues(&m.view((0, 0), (h, h)).into_owned());
        let bottom = if same {
            top.clone()
        } else {
            real_symmetric_eigenvalues(&m.view((h, h), (h, h)).into_owned())
        };
        return top.into_iter().chain(bottom).collect();
    }
    #[cfg(debug_assertions)]
    debug_check_residual(m);
    m.symmetric_eigenvalues().iter().copied().collect()
}

#[cfg(debug_assertions)]
fn debug_check_residual(m: &DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 || n > 32 {
        return;
    }
    let eig = m.clone().symmetric_eigen();
    let norm = m.amax() * n as f64;
    let k = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(k);
    let r = (m * v - v * eig.eigenvalues[k]).norm();
    debug_assert!(r <= 1e-8 * norm.max(f64::MIN_POSITIVE), "eigenpair residual {r:e}");
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let zero = Complex64::new(0.0, 0.0);
    if let Some(same) = half_block_split(m, zero) {
        let h = m.nrows() / 2;
        let top = hermitian_eigenvalues(&m.view((0, 0), (h, h)).into_owned());
        let bottom = if same {
            top.clone()
        } else {
            hermitian_eigenvalues(&m.view((h, h), (h, h)).into_owned())
        };
        return top.into_iter().chain(bottom).collect();
    }
    if m.iter().all(|z| z.im == 0.0) {
        return real_symmetric_eigenvalues(&m.map(|z| z.re));
    }
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// Seminorm of a real symmetric matrix.
pub fn seminorm_real_symmetric(m: &DMatrix<f64>, eta: usize) -> Result<f64> {
    check_eta(m.nrows(), eta)?;
    if eta == 0 {
        return Ok(0.0);
    }
    seminorm_from_eigenvalues(&real_symmetric_eigenvalues(m), eta)
}

/// Seminorm of a real antisymmetric matrix `K`, through the hermitian `−iK`.
pub fn seminorm_real_antisymmetric(m: &DMatrix<f64>, eta: usize) -> Result<f64> {
    check_eta(m.nrows(), eta)?;
    if eta == 0 {
        return Ok(0.0);
    }
    let h = m.map(|x| Complex64::new(0.0, -x));
    seminorm_from_eigenvalues(&hermitian_eigenvalues(&h), eta)
}

/// Seminorm of a real matrix of either symmetry, classified with tolerance.
pub fn seminorm_real(m: &DMatrix<f64>, eta: usize) -> Result<f64> {
    match classify_real(m) {
        Symmetry::Hermitian => seminorm_real_symmetric(m, eta),
        Symmetry::AntiHermitian => seminorm_real_antisymmetric(m, eta),
        Symmetry::General => Err(Error::UnsupportedSymmetry {
            asymmetry: asymmetry(&m.map(|x| Complex64::new(x, 0.0))),
        }),
    }
}

/// Reduced fermionic seminorm 𝒮_η(A).
pub fn reduced_seminorm(a: &CoefficientMatrix, eta: usize) -> Result<f64> {
    check_eta(a.dim(), eta)?;
    if eta == 0 {
        return Ok(0.0);
    }
    if a.diagonal {
        let diag: Vec<f64> = match a.symmetry {
            Symmetry::Hermitian => a.entries.diagonal().iter().map(|z| z.re).collect(),
            Symmetry::AntiHermitian => a.entries.diagonal().iter().map(|z| z.im).collect(),
            Symmetry::General => {
                return Err(Error::UnsupportedSymmetry {
                    asymmetry: asymmetry(&a.entries),
                })
            }
        };
        return seminorm_diagonal(&diag, eta);
    }
    let h = a.hermitian_part()?;
    seminorm_from_eigenvalues(&hermitian_eigenvalues(&h), eta)
}

/// Exhaustive maximum of `|Σ_{λ∈S} λ|` over all η-subsets of the spectrum.
pub fn brute_force_seminorm(a: &CoefficientMatrix, eta: usize) -> Result<f64> {
    let n = a.dim();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            modes: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    check_eta(n, eta)?;
    let h = a.hermitian_part()?;
    let eig: DVector<f64> = h.symmetric_eigenvalues();
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != eta {
            continue;
        }
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| eig[i]).sum();
        best = best.max(s.abs());
    }
    Ok(best)
}

/// Seminorm of a normal-ordered operator, computed from its dense matrix on
/// the η-particle sector.
pub fn fock_seminorm(op: &crate::oracle::NormalOrderedOperator, eta: usize) -> Result<f64> {
    let m = crate::oracle::fock_matrix(op, eta)?;
    Ok(crate::oracle::spectral_norm(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let m = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        (&m + m.adjoint()) * c(0.5)
    }

    #[test]
    fn diagonal_example() {
        let a = CoefficientMatrix::from_diagonal(&[3.0, -1.0, 2.0]);
        assert_eq!(reduced_seminorm(&a, 2).unwrap(), 5.0);
        assert_eq!(brute_force_seminorm(&a, 2).unwrap(), 5.0);
    }

    #[test]
    fn zero_cases() {
        let z = CoefficientMatrix::from_real(&DMatrix::zeros(4, 4)).unwrap();
        for eta in 0..=4 {
            assert_eq!(reduced_seminorm(&z, eta).unwrap(), 0.0);
        }
        let a = CoefficientMatrix::from_diagonal(&[1.0, 2.0]);
        assert_eq!(reduced_seminorm(&a, 0).unwrap(), 0.0);
    }

    #[test]
    fn identity_gives_eta() {
        let a = CoefficientMatrix::from_real(&DMatrix::identity(6, 6)).unwrap();
        for eta in 0..=6 {
            assert!((reduced_seminorm(&a, eta).unwrap() - eta as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn seminorm_can_vanish() {
        let a = CoefficientMatrix::from_diagonal(&[5.0, -5.0]);
        assert_eq!(reduced_seminorm(&a, 2).unwrap(), 0.0);
    }

    #[test]
    fn eta_above_n_is_rejected() {
        let a = CoefficientMatrix::from_diagonal(&[1.0, 2.0]);
        assert!(matches!(
            reduced_seminorm(&a, 3),
            Err(Error::EtaOutOfRange { eta: 3, modes: 2 })
        ));
    }

    #[test]
    fn general_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.3), c(0.0)]);
        let a = CoefficientMatrix::new(m).unwrap();
        assert_eq!(a.symmetry(), Symmetry::General);
        assert!(matches!(
            reduced_seminorm(&a, 1),
            Err(Error::UnsupportedSymmetry { .. })
        ));
    }

    #[test]
    fn classification_absorbs_rounding() {
        let mut m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(-1.0), c(0.0)]);
        m[(1, 0)] += c(1e-13);
        assert_eq!(classify(&m), Symmetry::AntiHermitian);
    }

    #[test]
    fn brute_force_guard() {
        let a = CoefficientMatrix::from_diagonal(&[1.0; 21]);
        assert!(matches!(
            brute_force_seminorm(&a, 2),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn matches_brute_force_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let a = CoefficientMatrix::new(random_hermitian(n, &mut rng)).unwrap();
            for eta in 0..=n {
                let x = reduced_seminorm(&a, eta).unwrap();
                let y = brute_force_seminorm(&a, eta).unwrap();
                assert!((x - y).abs() <= 1e-10 * (1.0 + y), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn anti_hermitian_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let h = random_hermitian(4, &mut rng);
            let a = CoefficientMatrix::new(h.map(|z| z * Complex64::new(0.0, 1.0))).unwrap();
            assert_eq!(a.symmetry(), Symmetry::AntiHermitian);
            let x = reduced_seminorm(&a, 2).unwrap();
            let y = brute_force_seminorm(&a, 2).unwrap();
            assert!((x - y).abs() <= 1e-10 * (1.0 + y));
        }
    }

    #[test]
    fn block_split_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut m = DMatrix::<f64>::zeros(8, 8);
        for i in 0..4 {
            for j in 0..=i {
                let x = rng.gen_range(-1.0..1.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
                let y = rng.gen_range(-1.0..1.0);
                m[(i + 4, j + 4)] = y;
                m[(j + 4, i + 4)] = y;
            }
        }
        let full: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        for eta in 0..=8 {
            let a = seminorm_real_symmetric(&m, eta).unwrap();
            let b = seminorm_from_eigenvalues(&full, eta).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        // antisymmetric with repeated blocks
        let mut k = DMatrix::<f64>::zeros(8, 8);
        for i in 0..4 {
            for j in 0..i {
                let x = rng.gen_range(-1.0..1.0);
                k[(i, j)] = x;
                k[(j, i)] = -x;
                k[(i + 4, j + 4)] = x;
                k[(j + 4, i + 4)] = -x;
            }
        }
        let a = CoefficientMatrix::from_real(&k).unwrap();
        let bf = brute_force_seminorm(&a, 3).unwrap();
        assert!((seminorm_real_antisymmetric(&k, 3).unwrap() - bf).abs() < 1e-12);
    }
}
