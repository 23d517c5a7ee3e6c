use nalgebra::{DMatrix, DVector};

use super::operator::NormalOrderedOperator;
use super::pauli::{jordan_wigner, PauliOperator};
use crate::error::Result;

/// Triangle-inequality norms of the three commutators entering W₁ and W₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorNorms {
    pub first: f64,
    pub tvt: f64,
    pub tvv: f64,
}

impl CommutatorNorms {
    pub fn w2_vtv(&self) -> f64 {
        (self.tvt + 0.5 * self.tvv) / 12.0
    }

    pub fn w2_tvt(&self) -> f64 {
        (self.tvv + 0.5 * self.tvt) / 12.0
    }
}

/// Coefficient 1-norms of the normal-ordered nested commutators of
/// `H_t = H(T)` and `H_v = Σ U_p n_p + Σ_{p≠q} V_pq n_p n_q`.
pub fn fermionic_commutator_norms(
    t: &DMatrix<f64>,
    u: &DVector<f64>,
    v: &DMatrix<f64>,
) -> Result<CommutatorNorms> {
    let ht = NormalOrderedOperator::from_real_quadratic(t)?;
    let hv = NormalOrderedOperator::from_density_density(v, u)?;
    let k = ht.commutator(&hv)?;
    Ok(CommutatorNorms {
        first: k.one_norm(),
        tvt: k.commutator(&ht)?.one_norm(),
        tvv: k.commutator(&hv)?.one_norm(),
    })
}

fn pauli_commutator(a: &PauliOperator, b: &PauliOperator) -> PauliOperator {
    let ab = a.product(b);
    let ba = b.product(a);
    let mut out = ab;
    for (s, c) in ba.terms() {
        out.add_term(*s, -c);
    }
    let scale = out.terms().values().fold(0.0f64, |m, c| m.max(c.norm()));
    out.prune(1e-14 * scale);
    out
}

/// Pauli-coefficient 1-norms of the Jordan–Wigner images of the nested
/// commutators.
pub fn pauli_commutator_norms(
    t: &DMatrix<f64>,
    u: &DVector<f64>,
    v: &DMatrix<f64>,
) -> Result<CommutatorNorms> {
    let ht = jordan_wigner(&NormalOrderedOperator::from_real_quadratic(t)?)?;
    let hv = jordan_wigner(&NormalOrderedOperator::from_density_density(v, u)?)?;
    let k = pauli_commutator(&ht, &hv);
    Ok(CommutatorNorms {
        first: k.one_norm_with_identity(),
        tvt: pauli_commutator(&k, &ht).one_norm_with_identity(),
        tvv: pauli_commutator(&k, &hv).one_norm_with_identity(),
    })
}
