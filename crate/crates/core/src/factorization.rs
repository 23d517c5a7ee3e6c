//! Factorized forms of the two-body term,
//! `H_v = H(U) + Σ_l λ_l H(X_l) H(Y_l)`.
//!
//! The spectral and Cholesky forms factor the (shifted) Coulomb matrix; the
//! cosine form uses the double-angle expansion of the plane-wave sum, and
//! [`general_spectral_from_tensor`] handles a dense four-index tensor.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{cell_volume, momentum_vectors, orbital_grid, SystemSpec};

/// A real symmetric coefficient matrix, stored by its diagonal when possible.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorMatrix {
    Diagonal(DVector<f64>),
    Dense(DMatrix<f64>),
}

impl FactorMatrix {
    pub fn dim(&self) -> usize {
        match self {
            FactorMatrix::Diagonal(d) => d.len(),
            FactorMatrix::Dense(m) => m.nrows(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            FactorMatrix::Diagonal(d) => DMatrix::from_diagonal(d),
            FactorMatrix::Dense(m) => m.clone(),
        }
    }

    pub fn as_diagonal(&self) -> Option<&DVector<f64>> {
        match self {
            FactorMatrix::Diagonal(d) => Some(d),
            FactorMatrix::Dense(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FactorMatrix::Diagonal(d) => d.iter().all(|&x| x == 0.0),
            FactorMatrix::Dense(m) => m.iter().all(|&x| x == 0.0),
        }
    }
}

/// One product term λ·H(X)·H(Y). `y == None` means `Y = X`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub weight: f64,
    pub x: FactorMatrix,
    pub y: Option<FactorMatrix>,
}

impl Factor {
    pub fn symmetric(weight: f64, x: FactorMatrix) -> Self {
        Self { weight, x, y: None }
    }

    pub fn y(&self) -> &FactorMatrix {
        self.y.as_ref().unwrap_or(&self.x)
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.x, FactorMatrix::Diagonal(_))
            && matches!(self.y(), FactorMatrix::Diagonal(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Cholesky,
    Cosine,
    Generic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Cholesky => "cholesky",
            Method::Cosine => "cosine",
            Method::Generic => "generic",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedPotential {
    /// One-body part (the external potential U for plane-wave methods).
    pub one_body: FactorMatrix,
    pub factors: Vec<Factor>,
    pub method: Method,
    /// Chemical-potential shift C added to the diagonal of V.
    pub shift: f64,
    /// Coefficient of Σ_p n_p dropped from the cosine form (a constant
    /// energy offset η·c in the fixed-η sector); zero for other methods.
    pub dropped_constant: f64,
}

impl FactorizedPotential {
    pub fn n(&self) -> usize {
        self.one_body.dim()
    }

    pub fn diagonal_factors(&self) -> bool {
        self.factors.iter().all(Factor::is_diagonal)
    }

    pub fn with_one_body(mut self, u: &DVector<f64>) -> Self {
        self.one_body = FactorMatrix::Diagonal(u.clone());
        self
    }

    /// `Σ_l λ_l X_l,pp Y_l,qq` for diagonal factorizations.
    pub fn reconstruct_pair_matrix(&self) -> Option<DMatrix<f64>> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for f in &self.factors {
            let x = f.x.as_diagonal()?;
            let y = f.y().as_diagonal()?;
            m += x * y.transpose() * f.weight;
        }
        Some(m)
    }

    /// Max deviation of the reconstruction from `V + C·I`; for the cosine
    /// form only off-diagonal entries are compared.
    pub fn reconstruction_residual(&self, v: &DMatrix<f64>) -> Option<f64> {
        let r = self.reconstruct_pair_matrix()?;
        let n = v.nrows();
        let mut worst = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                if p == q && self.method == Method::Cosine {
                    continue;
                }
                let target = v[(p, q)] + if p == q { self.shift } else { 0.0 };
                worst = worst.max((r[(p, q)] - target).abs());
            }
        }
        Some(worst)
    }
}

/// `V + C·I`.
pub fn shift_chemical_potential(v: &DMatrix<f64>, c: f64) -> DMatrix<f64> {
    let mut out = v.clone();
    for i in 0..out.nrows() {
        out[(i, i)] += c;
    }
    out
}

/// Smallest shift making `V + C·I` positive definite, padded by
/// `ε = max(1e-12, 1e-8·max|V|)`.
pub fn min_pd_shift(v: &DMatrix<f64>) -> f64 {
    if v.nrows() == 0 {
        return 1e-12;
    }
    let lmin = v.symmetric_eigenvalues().min();
    let eps = f64::max(1e-12, 1e-8 * v.amax());
    f64::max(0.0, -lmin) + eps
}

fn check_square(v: &DMatrix<f64>) -> Result<()> {
    if v.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: v.nrows(),
            cols: v.ncols(),
        })
    }
}

/// Eigen-factorization of `V + C·I`: one factor per eigenpair with the
/// eigenvalue as weight and `X = Y = diag(v)`.
///
/// Eigenpairs are sorted by descending eigenvalue and each eigenvector is
/// signed so that its first non-negligible component is positive.
pub fn spectral_decompose(v: &DMatrix<f64>, c: f64) -> Result<FactorizedPotential> {
    check_square(v)?;
    let n = v.nrows();
    let eig = shift_chemical_potential(v, c).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let factors = order
        .into_iter()
        .map(|i| {
            let mut vec: DVector<f64> = eig.eigenvectors.column(i).into_owned();
            let tol = 1e-12 * vec.amax();
            if let Some(first) = vec.iter().find(|x| x.abs() > tol) {
                if *first < 0.0 {
                    vec.neg_mut();
                }
            }
            Factor::symmetric(eig.eigenvalues[i], FactorMatrix::Diagonal(vec))
        })
        .collect();
    Ok(FactorizedPotential {
        one_body: FactorMatrix::Diagonal(DVector::zeros(n)),
        factors,
        method: Method::Spectral,
        shift: c,
        dropped_constant: 0.0,
    })
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky_lower(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(a)?;
    let n = a.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Cholesky factorization of `V + C·I`; factor i is `diag(L[:, i])`, weight 1.
pub fn cholesky_decompose(v: &DMatrix<f64>, c: f64) -> Result<FactorizedPotential> {
    let l = cholesky_lower(&shift_chemical_potential(v, c))?;
    let n = l.nrows();
    let factors = (0..n)
        .map(|i| Factor::symmetric(1.0, FactorMatrix::Diagonal(l.column(i).into_owned())))
        .collect();
    Ok(FactorizedPotential {
        one_body: FactorMatrix::Diagonal(DVector::zeros(n)),
        factors,
        method: Method::Cholesky,
        shift: c,
        dropped_constant: 0.0,
    })
}

/// Double-angle (cosine/sine) factorization. Each ν ≠ 0 yields two diagonal
/// factors `C_ν`, `S_ν` with entries `√(2π/Ω)·cos(ω_ν^p)/|k_ν|` and the sine
/// analogue, repeated across both spin blocks.
pub fn cosine_decompose(spec: &SystemSpec) -> Result<FactorizedPotential> {
    spec.validate()?;
    let omega = cell_volume(spec)?;
    let momenta = momentum_vectors(spec)?;
    let grid = orbital_grid(spec);
    let n = spec.n_modes();
    let ns = spec.n_spatial();
    let pref = (2.0 * PI / omega).sqrt();

    let mut factors = Vec::with_capacity(2 * (ns - 1));
    let mut constant = 0.0;
    for m in momenta.iter().filter(|m| !m.is_zero()) {
        let k2 = m.k_squared();
        let amp = pref / k2.sqrt();
        constant += 2.0 * PI / (omega * k2);
        let omegas: Vec<f64> = grid
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&m.nu)
                    .zip(&spec.sides)
                    .map(|((a, b), &l)| 2.0 * PI * (a * b) as f64 / l as f64)
                    .sum::<f64>()
            })
            .collect();
        let cos = DVector::from_fn(n, |i, _| amp * omegas[i % ns].cos());
        let sin = DVector::from_fn(n, |i, _| amp * omegas[i % ns].sin());
        factors.push(Factor::symmetric(1.0, FactorMatrix::Diagonal(cos)));
        factors.push(Factor::symmetric(1.0, FactorMatrix::Diagonal(sin)));
    }
    Ok(FactorizedPotential {
        one_body: FactorMatrix::Diagonal(DVector::zeros(n)),
        factors,
        method: Method::Cosine,
        shift: 0.0,
        dropped_constant: constant,
    })
}

/// Dense real four-index tensor `h_pqrs` of `H = Σ h_pqrs a†_p a†_q a_r a_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourIndexTensor {
    n: usize,
    data: Vec<f64>,
}

impl FourIndexTensor {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let i = t.idx(p, q, r, s);
                        t.data[i] = f(p, q, r, s);
                    }
                }
            }
        }
        t
    }

    /// Tensor whose chemist-ordered form is `V_ps δ_pq δ_rs`, i.e. the
    /// density-density interaction `Σ_{p≠s} V_ps n_p n_s`.
    pub fn from_density_density(v: &DMatrix<f64>) -> Self {
        let n = v.nrows();
        // h_abcd = V_{(ad),(cb)} = V_ac δ_ad δ_bc
        Self::from_fn(n, |a, b, c, d| {
            if a == d && b == c {
                v[(a, b)]
            } else {
                0.0
            }
        })
    }

    fn idx(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n + q) * self.n + r) * self.n + s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.data[self.idx(p, q, r, s)]
    }

    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        let i = self.idx(p, q, r, s);
        self.data[i] = value;
    }

    /// Chemist-ordered tensor `V_pqrs = h_prsq`.
    pub fn chemist(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.get(p, r, s, q)
    }

    /// Largest violation of the 8-fold symmetry of the chemist tensor.
    pub fn symmetry_violation(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.chemist(p, q, r, s);
                        for w in [
                            self.chemist(s, r, q, p),
                            self.chemist(p, q, s, r),
                            self.chemist(q, p, r, s),
                            self.chemist(q, p, s, r),
                            self.chemist(r, s, q, p),
                            self.chemist(r, s, p, q),
                            self.chemist(s, r, p, q),
                        ] {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }
}

/// Output of [`general_spectral_from_tensor`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralFactorization {
    /// `H_0` with `(H_0)_pr = Σ_q h_pqrq`; the Hamiltonian is
    /// `−H(H_0) + Σ λ_ℓ H(X_ℓ) H(X_ℓ)`.
    pub h0: DMatrix<f64>,
    pub potential: FactorizedPotential,
}

impl GeneralFactorization {
    /// One-body coefficient matrix `h̃ = −H_0`.
    pub fn one_body(&self) -> DMatrix<f64> {
        -&self.h0
    }
}

/// Spectral factorization of a general real two-body tensor.
///
/// Rewrites to chemist order, diagonalizes the `N²×N²` supermatrix
/// `V_(pq),(sr)` and hermitizes each eigen-matrix `X → (X + Xᵀ)/2`.
/// Eigenvalues below `1e-12·max|λ|` are dropped.
pub fn general_spectral_from_tensor(h: &FourIndexTensor) -> Result<GeneralFactorization> {
    let n = h.n();
    let scale = h.data.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let deviation = h.symmetry_violation();
    if deviation > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::TensorSymmetry { deviation });
    }
    let mut h0 = DMatrix::zeros(n, n);
    for p in 0..n {
        for r in 0..n {
            h0[(p, r)] = (0..n).map(|q| h.get(p, q, r, q)).sum();
        }
    }
    let nn = n * n;
    let mut sup = DMatrix::zeros(nn, nn);
    for p in 0..n {
        for q in 0..n {
            for s in 0..n {
                for r in 0..n {
                    sup[(p * n + q, s * n + r)] = h.chemist(p, q, r, s);
                }
            }
        }
    }
    let sup = (&sup + sup.transpose()) * 0.5;
    let eig = sup.symmetric_eigen();
    let lmax = eig.eigenvalues.amax();
    let mut order: Vec<usize> = (0..nn).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut factors = Vec::new();
    for l in order {
        let lambda = eig.eigenvalues[l];
        if lmax == 0.0 || lambda.abs() <= 1e-12 * lmax {
            continue;
        }
        let col = eig.eigenvectors.column(l);
        let x = DMatrix::from_fn(n, n, |p, q| 0.5 * (col[p * n + q] + col[q * n + p]));
        factors.push(Factor::symmetric(lambda, FactorMatrix::Dense(x)));
    }
    Ok(GeneralFactorization {
        h0,
        potential: FactorizedPotential {
            one_body: FactorMatrix::Dense(DMatrix::zeros(n, n)),
            factors,
            method: Method::Generic,
            shift: 0.0,
            dropped_constant: 0.0,
        },
    })
}

/// `Σ_ℓ λ_ℓ X_ℓ,pq X_ℓ,sr` as a chemist tensor, for checking a factorization.
pub fn reconstruct_chemist(fac: &FactorizedPotential, p: usize, q: usize, r: usize, s: usize) -> f64 {
    fac.factors
        .iter()
        .map(|f| {
            let x = f.x.to_dense();
            let y = f.y().to_dense();
            f.weight * x[(p, q)] * y[(s, r)]
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_coulomb, SystemSpec};

    #[test]
    fn shift_examples() {
        let v = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(shift_chemical_potential(&v, 0.0), v);
        assert_eq!(
            shift_chemical_potential(&DMatrix::zeros(3, 3), 1.0),
            DMatrix::identity(3, 3)
        );
        let e0 = v.symmetric_eigenvalues();
        let e1 = shift_chemical_potential(&v, 2.5).symmetric_eigenvalues();
        let mut a: Vec<f64> = e0.iter().map(|x| x + 2.5).collect();
        let mut b: Vec<f64> = e1.iter().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn min_shift_examples() {
        let pd = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
        let eps = 1e-8 * 2.0;
        assert!((min_pd_shift(&pd) - eps).abs() < 1e-20);
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![-3.0, 1.0]));
        assert!((min_pd_shift(&neg) - (3.0 + 3e-8)).abs() < 1e-14);
    }

    #[test]
    fn cholesky_two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let fac = cholesky_decompose(&a, 0.0).unwrap();
        let c0 = fac.factors[0].x.as_diagonal().unwrap();
        let c1 = fac.factors[1].x.as_diagonal().unwrap();
        assert!((c0[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((c0[1] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(c1[0], 0.0);
        assert!((c1[1] - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cholesky_identity() {
        let fac = cholesky_decompose(&DMatrix::zeros(4, 4), 1.0).unwrap();
        assert_eq!(fac.factors.len(), 4);
        for (i, f) in fac.factors.iter().enumerate() {
            let d = f.x.as_diagonal().unwrap();
            for j in 0..4 {
                assert_eq!(d[j], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn cholesky_names_pivot() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match cholesky_decompose(&a, 0.0) {
            Err(Error::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spectral_zero_and_identity() {
        let fac = spectral_decompose(&DMatrix::zeros(3, 3), 0.0).unwrap();
        assert!(fac.factors.iter().all(|f| f.weight == 0.0));
        let fac = spectral_decompose(&DMatrix::zeros(3, 3), 1.0).unwrap();
        assert!(fac.factors.iter().all(|f| (f.weight - 1.0).abs() < 1e-14));
        let v = DMatrix::zeros(3, 3);
        assert!(fac.reconstruction_residual(&v).unwrap() < 1e-14);
    }

    #[test]
    fn spectral_ordering_and_signs() {
        let spec = SystemSpec::jellium(&[2, 2], 2, 5.0);
        let v = build_coulomb(&spec).unwrap();
        let fac = spectral_decompose(&v, 0.0).unwrap();
        for w in fac.factors.windows(2) {
            assert!(w[0].weight >= w[1].weight);
        }
        for f in &fac.factors {
            let d = f.x.as_diagonal().unwrap();
            let first = d.iter().find(|x| x.abs() > 1e-12 * d.amax()).unwrap();
            assert!(*first > 0.0);
        }
        assert!(fac.reconstruction_residual(&v).unwrap() <= 1e-8 * v.amax());
    }

    #[test]
    fn cosine_counts_and_constant() {
        let spec = SystemSpec::jellium(&[4, 4], 3, 5.0);
        let fac = cosine_decompose(&spec).unwrap();
        assert_eq!(fac.factors.len(), 2 * (16 - 1));
        assert!(fac.diagonal_factors());
        let r = fac.reconstruct_pair_matrix().unwrap();
        for p in 0..spec.n_modes() {
            assert!((r[(p, p)] - fac.dropped_constant).abs() < 1e-12 * fac.dropped_constant);
        }
        let v = build_coulomb(&spec).unwrap();
        assert!(fac.reconstruction_residual(&v).unwrap() <= 1e-10);
    }

    #[test]
    fn zero_tensor_has_no_factors() {
        let g = general_spectral_from_tensor(&FourIndexTensor::zeros(3)).unwrap();
        assert!(g.potential.factors.is_empty());
        assert_eq!(g.h0, DMatrix::zeros(3, 3));
    }

    #[test]
    fn asymmetric_tensor_rejected() {
        let mut t = FourIndexTensor::zeros(2);
        t.set(0, 1, 0, 1, 1.0);
        assert!(matches!(
            general_spectral_from_tensor(&t),
            Err(Error::TensorSymmetry { .. })
        ));
    }

    #[test]
    fn density_tensor_matches_spectral_path() {
        let spec = SystemSpec::jellium(&[1, 2], 1, 5.0);
        let v = build_coulomb(&spec).unwrap();
        let tensor = FourIndexTensor::from_density_density(&v);
        let g = general_spectral_from_tensor(&tensor).unwrap();
        let s = spectral_decompose(&v, 0.0).unwrap();
        let mut a: Vec<f64> = g.potential.factors.iter().map(|f| f.weight).collect();
        let mut b: Vec<f64> = s
            .factors
            .iter()
            .map(|f| f.weight)
            .filter(|w| w.abs() > 1e-12 * v.amax())
            .collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        // each dense factor is diagonal, matching diag(v_i) up to sign
        for f in &g.potential.factors {
            let x = f.x.to_dense();
            for p in 0..4 {
                for q in 0..4 {
                    if p != q {
                        assert!(x[(p, q)].abs() < 1e-12);
                    }
                }
            }
        }
        let n = v.nrows();
        let mut worst = 0.0f64;
        for p in 0..n {
            for s_ in 0..n {
                let target = if p == s_ { 0.0 } else { v[(p, s_)] };
                worst = worst.max((reconstruct_chemist(&g.potential, p, p, s_, s_) - target).abs());
            }
        }
        assert!(worst <= 1e-8 * v.amax());
        // H_0 of a density-density tensor is the V diagonal, which is zero
        assert!(g.h0.amax() < 1e-15);
    }
}
