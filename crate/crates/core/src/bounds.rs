//! First- and second-order Trotter commutator bounds for `H = H_t + H_v`
//! with `H_v = H(U) + Σ_l λ_l H(X_l) H(Y_l)`, plus the closed-form bound that
//! only uses the spectral norm of T and the max entry of V.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::{
    cholesky_decompose, cosine_decompose, min_pd_shift, spectral_decompose, Factor,
    FactorMatrix, FactorizedPotential,
};
use crate::hamiltonian::{CoefficientMatrices, SystemSpec};
use crate::seminorm::{
    seminorm_diagonal, seminorm_real, seminorm_real_antisymmetric, seminorm_real_symmetric,
};
use crate::telemetry::Probe;

/// Seminorm pieces of a factorized Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorBounds {
    /// Bound on `‖[H_t, H_v]‖_η`.
    pub first: f64,
    /// Bound on `‖[[H_t, H_v], H_t]‖_η`.
    pub tvt: f64,
    /// Bound on `‖[[H_t, H_v], H_v]‖_η`.
    pub tvv: f64,
}

impl CommutatorBounds {
    pub fn w1(&self) -> f64 {
        0.5 * self.first
    }

    /// W₂ for `e^{iH_v t/2} e^{iH_t t} e^{iH_v t/2}`.
    pub fn w2_vtv(&self) -> f64 {
        w2_vtv(self.tvt, self.tvv)
    }

    /// W₂ for `e^{iH_t t/2} e^{iH_v t} e^{iH_t t/2}`.
    pub fn w2_tvt(&self) -> f64 {
        w2_tvt(self.tvt, self.tvv)
    }

    pub fn w2_best(&self) -> f64 {
        self.w2_vtv().min(self.w2_tvt())
    }
}

pub fn w2_vtv(tvt: f64, tvv: f64) -> f64 {
    (tvt + 0.5 * tvv) / 12.0
}

pub fn w2_tvt(tvt: f64, tvv: f64) -> f64 {
    (tvv + 0.5 * tvt) / 12.0
}

/// `[T, A]` for diagonal `A`: `T_pq (a_q − a_p)`.
pub fn commutator_with_diagonal(t: &DMatrix<f64>, a: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(t.nrows(), t.ncols(), |p, q| t[(p, q)] * (a[q] - a[p]))
}

/// `[[T, A], B]` for diagonal `A`, `B`: `T_pq (a_q − a_p)(b_q − b_p)`.
pub fn double_commutator_diagonal(t: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(t.nrows(), t.ncols(), |p, q| {
        t[(p, q)] * (a[q] - a[p]) * (b[q] - b[p])
    })
}

/// `[K, T]` for antisymmetric `K` and symmetric `T`, built as `KT + (KT)ᵀ`
/// so that the result is exactly symmetric.
pub fn antisymmetric_commutator(k: &DMatrix<f64>, t: &DMatrix<f64>) -> DMatrix<f64> {
    let kt = k * t;
    &kt + kt.transpose()
}

fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

fn check_inputs(t: &DMatrix<f64>, u: &DVector<f64>, fac: &FactorizedPotential) -> Result<()> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.nrows(),
            cols: t.ncols(),
        });
    }
    let n = t.nrows();
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.len(),
        });
    }
    for f in &fac.factors {
        for m in [&f.x, f.y()] {
            if m.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.dim(),
                });
            }
        }
    }
    Ok(())
}

fn check_eta(n: usize, eta: usize) -> Result<()> {
    if eta > n {
        Err(Error::EtaOutOfRange { eta, modes: n })
    } else {
        Ok(())
    }
}

/// Per-factor quantities of the diagonal fast path.
struct DiagonalTerms {
    weight: f64,
    s_a: f64,
    first: f64,
    tvt: f64,
    tvv_single: f64,
}

fn diagonal_terms(
    t: &DMatrix<f64>,
    u: &DVector<f64>,
    u_zero: bool,
    weight: f64,
    a: &DVector<f64>,
    eta: usize,
) -> Result<DiagonalTerms> {
    let w = weight.abs();
    let s_a = seminorm_diagonal(a.as_slice(), eta)?;
    let k = commutator_with_diagonal(t, a);
    let s_k = seminorm_real_antisymmetric(&k, eta)?;
    let s_kt = seminorm_real_symmetric(&antisymmetric_commutator(&k, t), eta)?;
    let s_ku = if u_zero {
        0.0
    } else {
        seminorm_real_symmetric(&double_commutator_diagonal(t, a, u), eta)?
    };
    Ok(DiagonalTerms {
        weight: w,
        s_a,
        first: 2.0 * w * s_k * s_a,
        tvt: 2.0 * w * (s_kt * s_a + s_k * s_k),
        // S([[T,a],U]) and S([[T,U],a]) coincide for diagonal a, U
        tvv_single: 2.0 * w * (2.0 * s_ku * s_a),
    })
}

/// One-body pieces `S([T,U])`, `S([[T,U],T])`, `S([[T,U],U])`.
fn one_body_terms(t: &DMatrix<f64>, u: &DVector<f64>, eta: usize) -> Result<(f64, f64, f64)> {
    if u.iter().all(|&x| x == 0.0) {
        return Ok((0.0, 0.0, 0.0));
    }
    let k = commutator_with_diagonal(t, u);
    Ok((
        seminorm_real_antisymmetric(&k, eta)?,
        seminorm_real_symmetric(&antisymmetric_commutator(&k, t), eta)?,
        seminorm_real_symmetric(&double_commutator_diagonal(t, u, u), eta)?,
    ))
}

fn diagonal_bounds(
    t: &DMatrix<f64>,
    u: &DVector<f64>,
    fac: &FactorizedPotential,
    eta: usize,
    second_order: bool,
) -> Result<CommutatorBounds> {
    let u_zero = u.iter().all(|&x| x == 0.0);
    let (s_tu, s_tut, s_tuu) = one_body_terms(t, u, eta)?;
    let active: Vec<(f64, &DVector<f64>)> = fac
        .factors
        .iter()
        .filter(|f| f.weight != 0.0 && !f.x.is_zero())
        .map(|f| (f.weight, f.x.as_diagonal().expect("diagonal factor")))
        .collect();

    let terms: Vec<DiagonalTerms> = active
        .par_iter()
        .map(|(w, a)| diagonal_terms(t, u, u_zero, *w, a, eta))
        .collect::<Result<_>>()?;

    let mut first = s_tu;
    let mut tvt = s_tut;
    let mut tvv = s_tuu;
    for term in &terms {
        first += term.first;
        tvt += term.tvt;
        tvv += term.tvv_single;
    }
    if !second_order {
        return Ok(CommutatorBounds { first, tvt: 0.0, tvv: 0.0 });
    }

    // 4 Σ_{i,j} |λ_i||λ_j| S([[T,a_i],a_j]) S(a_i) S(a_j), symmetric in (i, j)
    let coef: Vec<f64> = terms.iter().map(|x| x.weight * x.s_a).collect();
    let rows: Vec<f64> = (0..active.len())
        .into_par_iter()
        .map(|i| -> Result<f64> {
            if coef[i] == 0.0 {
                return Ok(0.0);
            }
            let mut row = 0.0;
            for j in i..active.len() {
                if coef[j] == 0.0 {
                    continue;
                }
                let m = double_commutator_diagonal(t, active[i].1, active[j].1);
                let s = seminorm_real_symmetric(&m, eta)?;
                let mult = if i == j { 1.0 } else { 2.0 };
                row += mult * coef[j] * s;
            }
            Ok(4.0 * coef[i] * row)
        })
        .collect::<Result<_>>()?;
    tvv += rows.iter().sum::<f64>();
    Ok(CommutatorBounds { first, tvt, tvv })
}

/// Per-factor matrices of the generic path, weights folded into X.
struct DenseFactor {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    tx: DMatrix<f64>,
    ty: DMatrix<f64>,
    s_x: f64,
    s_y: f64,
    s_tx: f64,
    s_ty: f64,
}

fn dense_factor(t: &DMatrix<f64>, f: &Factor, eta: usize) -> Result<DenseFactor> {
    let x = f.x.to_dense() * f.weight;
    let y = f.y().to_dense();
    let tx = commutator(t, &x);
    let ty = commutator(t, &y);
    Ok(DenseFactor {
        s_x: seminorm_real(&x, eta)?,
        s_y: seminorm_real(&y, eta)?,
        s_tx: seminorm_real(&tx, eta)?,
        s_ty: seminorm_real(&ty, eta)?,
        x,
        y,
        tx,
        ty,
    })
}

/// Generic-path bounds for arbitrary real symmetric factors, returning the
/// bound on `‖[[H_t,H_v],H_v]‖_η` for both the unmerged and the merged
/// pair terms.
pub fn generic_bounds(
    t: &DMatrix<f64>,
    u: &DMatrix<f64>,
    fac: &FactorizedPotential,
    eta: usize,
) -> Result<(CommutatorBounds, f64, f64)> {
    check_eta(t.nrows(), eta)?;
    let s = |m: &DMatrix<f64>| seminorm_real(m, eta);
    let tu = commutator(t, u);
    let tut = commutator(&tu, t);
    let tuu = commutator(&tu, u);
    let factors: Vec<DenseFactor> = fac
        .factors
        .par_iter()
        .map(|f| dense_factor(t, f, eta))
        .collect::<Result<_>>()?;

    let mut first = s(&tu)?;
    let mut tvt = s(&tut)?;
    let mut single = s(&tuu)?;
    for f in &factors {
        first += f.s_tx * f.s_y + f.s_x * f.s_ty;
        let yt = commutator(&f.y, t);
        tvt += 2.0 * f.s_tx * s(&yt)?
            + s(&commutator(&f.tx, t))? * f.s_y
            + f.s_x * s(&commutator(&f.ty, t))?;
        single += f.s_tx * s(&commutator(&f.y, u))?
            + s(&commutator(&f.tx, u))? * f.s_y
            + f.s_x * s(&commutator(&f.ty, u))?
            + s(&commutator(&f.x, u))? * f.s_ty
            + s(&commutator(&tu, &f.x))? * f.s_y
            + s(&commutator(&tu, &f.y))? * f.s_x;
    }

    let pairs: Vec<(f64, f64)> = (0..factors.len())
        .into_par_iter()
        .map(|l| -> Result<(f64, f64)> {
            let fl = &factors[l];
            let mut plain = 0.0;
            let mut merged = 0.0;
            for fm in &factors {
                let common = fl.s_tx * s(&commutator(&fl.y, &fm.x))? * fm.s_y
                    + s(&commutator(&fl.tx, &fm.x))? * fl.s_y * fm.s_y
                    + fm.s_x * fl.s_tx * s(&commutator(&fl.y, &fm.y))?
                    + s(&commutator(&fl.x, &fm.x))? * fl.s_ty * fm.s_y
                    + fm.s_x * fl.s_x * s(&commutator(&fl.ty, &fm.y))?
                    + fm.s_x * s(&commutator(&fl.x, &fm.y))? * fl.s_ty;
                let ty_x = commutator(&fl.ty, &fm.x);
                let unmerged = fm.s_x * s(&commutator(&fl.tx, &fm.y))? * fl.s_y
                    + fl.s_x * s(&ty_x)? * fm.s_y;
                let joined = &ty_x + commutator(&fm.tx, &fl.y);
                let joined = fl.s_x * s(&joined)? * fm.s_y;
                plain += common + unmerged;
                merged += common + joined;
            }
            Ok((plain, merged))
        })
        .collect::<Result<_>>()?;
    let plain = single + pairs.iter().map(|p| p.0).sum::<f64>();
    let merged = single + pairs.iter().map(|p| p.1).sum::<f64>();
    Ok((
        CommutatorBounds {
            first,
            tvt,
            tvv: plain.min(merged),
        },
        plain,
        merged,
    ))
}

fn dispatch(
    t: &DMatrix<f64>,
    u: &DVector<f64>,
    fac: &FactorizedPotential,
    eta: usize,
    second_order: bool,
) -> Result<CommutatorBounds> {
    check_inputs(t, u, fac)?;
    check_eta(t.nrows(), eta)?;
    if fac.diagonal_factors() && fac.factors.iter().all(|f| f.y.is_none()) {
        diagonal_bounds(t, u, fac, eta, second_order)
    } else {
        Ok(generic_bounds(t, &DMatrix::from_diagonal(u), fac, eta)?.0)
    }
}

/// All three seminorm bounds in one pass.
pub fn commutator_bounds(
    t: &DMatrix<f64>,
    u: &DVector<f64>,
    fac: &FactorizedPotential,
    eta: usize,
) -> Result<CommutatorBounds> {
    dispatch(t, u, fac, eta, true)
}

/// Bound on `‖[H_t, H_v]‖_η`.
pub fn first_order_bound(
    t: &DMatrix<f64>,
    u: &DVector<f64>,
    fac: &FactorizedPotential,
    eta: usize,
) -> Result<f64> {
    Ok(dispatch(t, u, fac, eta, false)?.first)
}

/// Bound on `‖[[H_t, H_v], H_t]‖_η`.
pub fn second_order_tvt(
    t: &DMatrix<f64>,
    u: &DVector<f64>,
    fac: &FactorizedPotential,
    eta: usize,
) -> Result<f64> {
    Ok(dispatch(t, u, fac, eta, true)?.tvt)
}

/// Bound on `‖[[H_t, H_v], H_v]‖_η`.
pub fn second_order_tvv(
    t: &DMatrix<f64>,
    u: &DVector<f64>,
    fac: &FactorizedPotential,
    eta: usize,
) -> Result<f64> {
    Ok(dispatch(t, u, fac, eta, true)?.tvv)
}

/// First-order bound (W₁ normalization) for `H = H(h̃) + Σ_j λ_j H(X_j)²`
/// with dense hermitian factors.
pub fn general_factor_first_order(h: &DMatrix<f64>, factors: &[Factor], eta: usize) -> Result<f64> {
    check_eta(h.nrows(), eta)?;
    let dense: Vec<DMatrix<f64>> = factors.iter().map(|f| f.x.to_dense()).collect();
    let s_x: Vec<f64> = dense
        .iter()
        .map(|x| seminorm_real(x, eta))
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for (j, f) in factors.iter().enumerate() {
        total += f.weight.abs() * seminorm_real(&commutator(h, &dense[j]), eta)? * s_x[j];
    }
    let rows: Vec<f64> = (0..factors.len())
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut row = 0.0;
            for j in i + 1..factors.len() {
                let c = seminorm_real(&commutator(&dense[i], &dense[j]), eta)?;
                row += factors[j].weight.abs() * c * s_x[i] * s_x[j];
            }
            Ok(2.0 * factors[i].weight.abs() * row)
        })
        .collect::<Result<_>>()?;
    Ok(total + rows.iter().sum::<f64>())
}

/// Closed-form bounds from `‖T‖` and `max|V̄|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShcBound {
    pub t_norm: f64,
    pub v_max: f64,
    pub tvt: f64,
    pub tvv: f64,
}

impl ShcBound {
    pub fn from_norms(t_norm: f64, v_max: f64, eta: usize) -> Self {
        let e = eta as f64;
        Self {
            t_norm,
            v_max,
            tvt: 16.0 * t_norm * t_norm * v_max * e * e + 4.0 * t_norm * t_norm * v_max * e,
            tvv: 24.0 * t_norm * v_max * v_max * e.powi(3) + 12.0 * t_norm * v_max * v_max * e * e,
        }
    }

    pub fn w2_vtv(&self) -> f64 {
        w2_vtv(self.tvt, self.tvv)
    }

    pub fn w2_tvt(&self) -> f64 {
        w2_tvt(self.tvt, self.tvv)
    }

    pub fn w2(&self) -> f64 {
        self.w2_vtv().min(self.w2_tvt())
    }
}

pub fn shc_bound(t: &DMatrix<f64>, v: &DMatrix<f64>, eta: usize) -> ShcBound {
    let t_norm = if t.is_empty() {
        0.0
    } else {
        t.clone().symmetric_eigenvalues().amax()
    };
    ShcBound::from_norms(t_norm, if v.is_empty() { 0.0 } else { v.amax() }, eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Spectral,
    Cholesky,
    Cosine,
    Shc,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 4] = [
        BoundMethod::Spectral,
        BoundMethod::Cholesky,
        BoundMethod::Cosine,
        BoundMethod::Shc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundMethod::Spectral => "spectral",
            BoundMethod::Cholesky => "cholesky",
            BoundMethod::Cosine => "cosine",
            BoundMethod::Shc => "shc",
        }
    }
}

impl std::fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" => Ok(BoundMethod::Spectral),
            "cholesky" => Ok(BoundMethod::Cholesky),
            "cosine" => Ok(BoundMethod::Cosine),
            "shc" => Ok(BoundMethod::Shc),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoundReport {
    pub method: BoundMethod,
    pub n: usize,
    pub eta: usize,
    pub wigner_seitz: f64,
    pub shift: f64,
    /// Bound on `‖[H_t, H_v]‖_η`; absent for the closed-form bound.
    pub first_order_seminorm: Option<f64>,
    pub w1: Option<f64>,
    pub tvt: f64,
    pub tvv: f64,
    pub w2_vtv: f64,
    pub w2_tvt: f64,
    pub w2_best: f64,
    pub wall_time_s: f64,
    pub peak_mem_bytes: usize,
}

impl BoundReport {
    fn from_pieces(method: BoundMethod, spec: &SystemSpec, eta: usize, shift: f64, b: CommutatorBounds) -> Self {
        Self {
            method,
            n: spec.n_modes(),
            eta,
            wigner_seitz: spec.wigner_seitz,
            shift,
            first_order_seminorm: Some(b.first),
            w1: Some(b.w1()),
            tvt: b.tvt,
            tvv: b.tvv,
            w2_vtv: b.w2_vtv(),
            w2_tvt: b.w2_tvt(),
            w2_best: b.w2_best(),
            wall_time_s: 0.0,
            peak_mem_bytes: 0,
        }
    }

    /// Copy with timing and memory fields cleared, for reproducibility checks.
    pub fn without_telemetry(&self) -> Self {
        Self {
            wall_time_s: 0.0,
            peak_mem_bytes: 0,
            ..self.clone()
        }
    }
}

/// Chemical-shift choices for [`bound_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundOptions {
    pub spectral_shift: f64,
    /// `None` uses [`min_pd_shift`].
    pub cholesky_shift: Option<f64>,
    /// Golden-section search over the spectral shift minimizing W₂.
    pub optimize_shift: bool,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            spectral_shift: 0.0,
            cholesky_shift: None,
            optimize_shift: false,
        }
    }
}

/// Outcome of one method in a suite; failures do not abort the others.
#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub method: BoundMethod,
    pub result: std::result::Result<BoundReport, String>,
}

/// Minimizes `f` on `[lo, hi]` by golden-section search.
pub fn golden_section(mut lo: f64, mut hi: f64, iterations: usize, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    for _ in 0..iterations {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b)?;
        }
    }
    Ok(if fa <= fb { (a, fa) } else { (b, fb) })
}

/// Spectral shift minimizing the best W₂ over `[−max|V|, max|V|]`.
pub fn optimize_spectral_shift(m: &CoefficientMatrices, eta: usize, iterations: usize) -> Result<(f64, CommutatorBounds)> {
    let vmax = m.v.amax();
    let eval = |c: f64| -> Result<CommutatorBounds> {
        commutator_bounds(&m.t, &m.u, &spectral_decompose(&m.v, c)?, eta)
    };
    let (c, _) = golden_section(-vmax, vmax, iterations, |c| Ok(eval(c)?.w2_best()))?;
    let at_zero = eval(0.0)?;
    let at_c = eval(c)?;
    Ok(if at_zero.w2_best() <= at_c.w2_best() {
        (0.0, at_zero)
    } else {
        (c, at_c)
    })
}

fn run_method(
    method: BoundMethod,
    spec: &SystemSpec,
    m: &CoefficientMatrices,
    eta: usize,
    options: &BoundOptions,
) -> Result<BoundReport> {
    let probe = Probe::start();
    let mut report = match method {
        BoundMethod::Shc => {
            check_eta(m.n, eta)?;
            let b = shc_bound(&m.t, &m.v, eta);
            BoundReport {
                method,
                n: m.n,
                eta,
                wigner_seitz: spec.wigner_seitz,
                shift: 0.0,
                first_order_seminorm: None,
                w1: None,
                tvt: b.tvt,
                tvv: b.tvv,
                w2_vtv: b.w2_vtv(),
                w2_tvt: b.w2_tvt(),
                w2_best: b.w2(),
                wall_time_s: 0.0,
                peak_mem_bytes: 0,
            }
        }
        BoundMethod::Spectral => {
            let (shift, b) = if options.optimize_shift {
                optimize_spectral_shift(m, eta, 24)?
            } else {
                let fac = spectral_decompose(&m.v, options.spectral_shift)?;
                (options.spectral_shift, commutator_bounds(&m.t, &m.u, &fac, eta)?)
            };
            BoundReport::from_pieces(method, spec, eta, shift, b)
        }
        BoundMethod::Cholesky => {
            let shift = options.cholesky_shift.unwrap_or_else(|| min_pd_shift(&m.v));
            let fac = cholesky_decompose(&m.v, shift)?;
            BoundReport::from_pieces(method, spec, eta, shift, commutator_bounds(&m.t, &m.u, &fac, eta)?)
        }
        BoundMethod::Cosine => {
            let fac = cosine_decompose(spec)?;
            BoundReport::from_pieces(method, spec, eta, 0.0, commutator_bounds(&m.t, &m.u, &fac, eta)?)
        }
    };
    report.wall_time_s = probe.elapsed_s();
    report.peak_mem_bytes = probe.peak_additional();
    Ok(report)
}

/// Builds the matrices of `spec` and evaluates every requested method with
/// seminorms taken at `eta`.
pub fn bound_suite(
    spec: &SystemSpec,
    methods: &[BoundMethod],
    eta: usize,
    options: &BoundOptions,
) -> Result<Vec<MethodOutcome>> {
    let m = CoefficientMatrices::build(spec)?;
    Ok(bound_suite_with_matrices(spec, &m, methods, eta, options))
}

pub fn bound_suite_with_matrices(
    spec: &SystemSpec,
    m: &CoefficientMatrices,
    methods: &[BoundMethod],
    eta: usize,
    options: &BoundOptions,
) -> Vec<MethodOutcome> {
    methods
        .iter()
        .map(|&method| MethodOutcome {
            method,
            result: run_method(method, spec, m, eta, options).map_err(|e| e.to_string()),
        })
        .collect()
}

/// Factorization used by a method, with the default shift conventions.
pub fn factorize(method: BoundMethod, spec: &SystemSpec, v: &DMatrix<f64>, options: &BoundOptions) -> Result<Option<FactorizedPotential>> {
    Ok(match method {
        BoundMethod::Spectral => Some(spectral_decompose(v, options.spectral_shift)?),
        BoundMethod::Cholesky => Some(cholesky_decompose(
            v,
            options.cholesky_shift.unwrap_or_else(|| min_pd_shift(v)),
        )?),
        BoundMethod::Cosine => Some(cosine_decompose(spec)?),
        BoundMethod::Shc => None,
    })
}

/// Re-expresses a diagonal factorization with dense matrices so that it is
/// evaluated by the generic path.
pub fn densify(fac: &FactorizedPotential) -> FactorizedPotential {
    let mut out = fac.clone();
    for f in &mut out.factors {
        f.x = FactorMatrix::Dense(f.x.to_dense());
        f.y = Some(FactorMatrix::Dense(f.y().to_dense()));
    }
    out
}
