//! Bounds and factorizations against references built independently of the
//! library's operator algebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pwdual::bounds::{commutator_bounds, general_factor_first_order};
use pwdual::factorization::{
    cholesky_decompose, cosine_decompose, general_spectral_from_tensor, min_pd_shift,
    reconstruct_chemist, spectral_decompose, FourIndexTensor,
};
use pwdual::hamiltonian::{orbital_grid, split_spin_orbital};
use pwdual::oracle::{fermionic_commutator_norms, NormalOrderedOperator, SectorSystem};
use pwdual::seminorm::{fock_seminorm, reduced_seminorm, CoefficientMatrix};
use pwdual::{CoefficientMatrices, SystemSpec};

/// Annihilation operator on the full Fock space, bit j ↔ mode j.
fn ladder(n: usize, j: usize) -> DMatrix<f64> {
    let dim = 1 << n;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        if x & (1 << j) != 0 {
            let sign = if (x & ((1 << j) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            m[(x ^ (1 << j), x)] = sign;
        }
    }
    m
}

struct Fock {
    n: usize,
    a: Vec<DMatrix<f64>>,
}

impl Fock {
    fn new(n: usize) -> Self {
        Self {
            n,
            a: (0..n).map(|j| ladder(n, j)).collect(),
        }
    }

    fn number(&self, p: usize) -> DMatrix<f64> {
        self.a[p].transpose() * &self.a[p]
    }

    fn quadratic(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        let dim = 1 << self.n;
        let mut h = DMatrix::zeros(dim, dim);
        for p in 0..self.n {
            for q in 0..self.n {
                if t[(p, q)] != 0.0 {
                    h += self.a[p].transpose() * &self.a[q] * t[(p, q)];
                }
            }
        }
        h
    }

    fn density(&self, v: &DMatrix<f64>, u: &DVector<f64>) -> DMatrix<f64> {
        let dim = 1 << self.n;
        let mut h = DMatrix::zeros(dim, dim);
        for p in 0..self.n {
            h += self.number(p) * u[p];
            for q in 0..self.n {
                if p != q {
                    h += self.number(p) * self.number(q) * v[(p, q)];
                }
            }
        }
        h
    }

    /// `a†_{s_1}⋯a†_{s_k} a_{r_1}⋯a_{r_l}` for subsets given as bit masks.
    fn monomial(&self, create: usize, annihilate: usize) -> DMatrix<f64> {
        let dim = 1 << self.n;
        let mut m = DMatrix::identity(dim, dim);
        for j in 0..self.n {
            if create & (1 << j) != 0 {
                m *= self.a[j].transpose();
            }
        }
        for j in 0..self.n {
            if annihilate & (1 << j) != 0 {
                m *= &self.a[j];
            }
        }
        m
    }

    /// Coefficients of `op` in the basis of all 4ⁿ monomials.
    fn decompose(&self, op: &DMatrix<f64>) -> Vec<f64> {
        let dim = 1 << self.n;
        let count = dim * dim;
        let mut basis = DMatrix::zeros(count, count);
        for s in 0..dim {
            for r in 0..dim {
                let col = s * dim + r;
                let m = self.monomial(s, r);
                for (k, x) in m.iter().enumerate() {
                    basis[(k, col)] = *x;
                }
            }
        }
        let rhs = DVector::from_iterator(count, op.iter().copied());
        basis.lu().solve(&rhs).expect("monomials span the operator space").iter().copied().collect()
    }

    fn sector_norm(&self, op: &DMatrix<f64>, eta: usize) -> f64 {
        let states: Vec<usize> = (0..1usize << self.n).filter(|x| x.count_ones() as usize == eta).collect();
        let block = DMatrix::from_fn(states.len(), states.len(), |i, j| op[(states[i], states[j])]);
        block.singular_values().max()
    }
}

fn comm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

fn one_norm(c: &[f64]) -> f64 {
    c.iter().map(|x| x.abs()).sum()
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let t = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let t = (&t + t.transpose()) * 0.5;
    let u = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let v = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let mut v = (&v + v.transpose()) * 0.5;
    v.fill_diagonal(0.0);
    (t, u, v)
}

#[test]
fn commutator_norms_match_monomial_decomposition() {
    let n = 4;
    let fock = Fock::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let (t, u, v) = random_instance(&mut rng, n);
        let ht = fock.quadratic(&t);
        let hv = fock.density(&v, &u);
        let k = comm(&ht, &hv);
        let coeffs_first = fock.decompose(&k);
        let coeffs_tvt = fock.decompose(&comm(&k, &ht));
        let coeffs_tvv = fock.decompose(&comm(&k, &hv));
        assert_eq!(coeffs_first.len(), 256);

        let lib = fermionic_commutator_norms(&t, &u, &v).unwrap();
        assert!((lib.first - one_norm(&coeffs_first)).abs() < 1e-10 * lib.first);
        assert!((lib.tvt - one_norm(&coeffs_tvt)).abs() < 1e-10 * lib.tvt);
        assert!((lib.tvv - one_norm(&coeffs_tvv)).abs() < 1e-10 * lib.tvv);
    }
}

#[test]
fn seminorm_bounds_dominate_exact_norms() {
    let n = 4;
    let fock = Fock::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        let (t, u, v) = random_instance(&mut rng, n);
        let ht = fock.quadratic(&t);
        let hv = fock.density(&v, &u);
        let k = comm(&ht, &hv);
        let kt = comm(&k, &ht);
        let kv = comm(&k, &hv);
        let shift = min_pd_shift(&v);
        let facs = [
            spectral_decompose(&v, 0.0).unwrap().with_one_body(&u),
            cholesky_decompose(&v, shift).unwrap().with_one_body(&u),
        ];
        for eta in 0..=n {
            let exact = (fock.sector_norm(&k, eta), fock.sector_norm(&kt, eta), fock.sector_norm(&kv, eta));
            let sector = SectorSystem::new(&t, &u, &v, eta).unwrap();
            assert!((sector.first_order() - exact.0).abs() < 1e-10 * (1.0 + exact.0));
            assert!((sector.tvt() - exact.1).abs() < 1e-10 * (1.0 + exact.1));
            assert!((sector.tvv() - exact.2).abs() < 1e-10 * (1.0 + exact.2));
            for fac in &facs {
                let b = commutator_bounds(&t, &u, fac, eta).unwrap();
                let slack = 1e-9;
                assert!(exact.0 <= b.first * (1.0 + slack) + slack, "{eta} first {} > {}", exact.0, b.first);
                assert!(exact.1 <= b.tvt * (1.0 + slack) + slack, "{eta} tvt {} > {}", exact.1, b.tvt);
                assert!(exact.2 <= b.tvv * (1.0 + slack) + slack, "{eta} tvv {} > {}", exact.2, b.tvv);
            }
        }
    }
}

#[test]
fn fock_seminorm_matches_reduced() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 6;
    for _ in 0..10 {
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let op = NormalOrderedOperator::from_quadratic(&h).unwrap();
        let cm = CoefficientMatrix::new(h).unwrap();
        for eta in 0..=n {
            let r = reduced_seminorm(&cm, eta).unwrap();
            let f = fock_seminorm(&op, eta).unwrap();
            assert!((r - f).abs() < 1e-9, "η = {eta}: {r} vs {f}");
        }
        let k = DMatrix::from_fn(n, n, |i, j| if i < j { rng.gen_range(-1.0..1.0) } else { 0.0 });
        let k = &k - k.transpose();
        let op = NormalOrderedOperator::from_real_quadratic(&k).unwrap();
        let cm = CoefficientMatrix::from_real(&k).unwrap();
        for eta in 0..=n {
            let r = reduced_seminorm(&cm, eta).unwrap();
            let f = fock_seminorm(&op, eta).unwrap();
            assert!((r - f).abs() < 1e-9, "antisymmetric η = {eta}: {r} vs {f}");
        }
    }
}

fn random_symmetric_tensor(rng: &mut ChaCha8Rng, n: usize) -> FourIndexTensor {
    // chemist V_pqrs = Σ_k c_k A^k_pq A^k_rs with symmetric A^k has the full
    // 8-fold symmetry; stored as h_prsq
    let mats: Vec<DMatrix<f64>> = (0..3)
        .map(|_| {
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            (&a + a.transpose()) * 0.5
        })
        .collect();
    let weights: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let chem = |p: usize, q: usize, r: usize, s: usize| -> f64 {
        mats.iter().zip(&weights).map(|(a, w)| w * a[(p, q)] * a[(r, s)]).sum()
    };
    FourIndexTensor::from_fn(n, |p, r, s, q| chem(p, q, r, s))
}

#[test]
fn general_tensor_rebuild() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in [2, 3] {
        let h = random_symmetric_tensor(&mut rng, n);
        assert!(h.symmetry_violation() < 1e-14);
        let g = general_spectral_from_tensor(&h).unwrap();
        let scale = (0..n.pow(4)).fold(0.0f64, |m, i| {
            let (p, q, r, s) = (i / n.pow(3), i / n.pow(2) % n, i / n % n, i % n);
            m.max(h.chemist(p, q, r, s).abs())
        });
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let rebuilt = reconstruct_chemist(&g.potential, p, q, r, s);
                        assert!((rebuilt - h.chemist(p, q, r, s)).abs() < 1e-10 * scale);
                    }
                }
            }
        }
    }
}

#[test]
fn general_factorization_reproduces_two_body_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let n = 3;
    let h = random_symmetric_tensor(&mut rng, n);
    let g = general_spectral_from_tensor(&h).unwrap();
    let fock = Fock::new(n);
    let dim = 1 << n;

    let mut direct = DMatrix::zeros(dim, dim);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let x = h.get(p, q, r, s);
                    direct += fock.a[p].transpose() * fock.a[q].transpose() * &fock.a[r] * &fock.a[s] * x;
                }
            }
        }
    }
    let mut squares = DMatrix::zeros(dim, dim);
    for f in &g.potential.factors {
        let hx = fock.quadratic(&f.x.to_dense());
        squares += &hx * &hx * f.weight;
    }
    let factored = &squares - fock.quadratic(&g.h0);
    assert!((&direct - &factored).amax() < 1e-10 * direct.amax());

    // first-order bound on a sector dominates the exact value
    let t = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 0.3 });
    let ht = fock.quadratic(&t);
    for eta in 1..n {
        let exact = fock.sector_norm(&comm(&ht, &squares), eta);
        let bound = general_factor_first_order(&t, &g.potential.factors, eta).unwrap();
        assert!(exact <= 2.0 * bound * (1.0 + 1e-9) + 1e-12, "η = {eta}: {exact} > 2·{bound}");
    }
}

#[test]
fn coefficients_are_translation_invariant() {
    let spec = SystemSpec::jellium(&[3, 4], 4, 5.0);
    let m = CoefficientMatrices::build(&spec).unwrap();
    let grid = orbital_grid(&spec);
    let ns = spec.n_spatial();
    let index = |g: &[i64]| -> usize {
        grid.iter()
            .position(|x| x.iter().zip(g).zip(&spec.sides).all(|((a, b), &l)| (a - b).rem_euclid(l as i64) == 0))
            .unwrap()
    };
    for shift in [[1i64, 0], [0, 1], [2, 3]] {
        let perm: Vec<usize> = (0..m.n)
            .map(|p| {
                let (site, spin) = split_spin_orbital(&spec, p);
                let g: Vec<i64> = grid[site]
                    .iter()
                    .zip(&shift)
                    .zip(&spec.sides)
                    .map(|((x, s), &l)| (x + s).rem_euclid(l as i64))
                    .collect();
                spin * ns + index(&g)
            })
            .collect();
        for p in 0..m.n {
            for q in 0..m.n {
                assert!((m.t[(p, q)] - m.t[(perm[p], perm[q])]).abs() < 1e-13);
                assert!((m.v[(p, q)] - m.v[(perm[p], perm[q])]).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn factorizations_reconstruct_on_odd_lattice() {
    let spec = SystemSpec::jellium(&[3, 3], 5, 2.0);
    let m = CoefficientMatrices::build(&spec).unwrap();
    let vmax = m.v.amax();
    for fac in [
        spectral_decompose(&m.v, 0.0).unwrap(),
        cholesky_decompose(&m.v, min_pd_shift(&m.v)).unwrap(),
        cosine_decompose(&spec).unwrap(),
    ] {
        let r = fac.reconstruction_residual(&m.v).unwrap();
        assert!(r <= 1e-8 * vmax, "{}: {r}", fac.method);
    }
}
