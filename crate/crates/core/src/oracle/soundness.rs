use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fock::{SectorSystem, TrotterOrdering};
use crate::bounds::{commutator_bounds, shc_bound, CommutatorBounds};
use crate::error::Result;
use crate::factorization::{cholesky_decompose, cosine_decompose, min_pd_shift, spectral_decompose};
use crate::hamiltonian::{CoefficientMatrices, SystemSpec};

/// Slack for comparing a bound with an exactly computed value: relative
/// rounding plus an absolute floor for near-zero exact values.
pub const RELATIVE_SLACK: f64 = 1e-8;
pub const ABSOLUTE_SLACK: f64 = 1e-11;

pub fn exceeds(exact: f64, bound: f64) -> bool {
    exact > bound * (1.0 + RELATIVE_SLACK) + ABSOLUTE_SLACK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sides: Vec<usize>,
    pub eta: usize,
    pub wigner_seitz: f64,
    pub method: String,
    pub quantity: String,
    pub exact: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessRecord {
    pub sides: Vec<usize>,
    pub eta: usize,
    pub wigner_seitz: f64,
    pub exact_first: f64,
    pub exact_tvt: f64,
    pub exact_tvv: f64,
    /// Worst reconstruction residual over the three factorizations,
    /// relative to `max|V|`.
    pub worst_residual: f64,
    pub checks: usize,
    pub violations: Vec<Violation>,
}

/// Compares every method's bounds against exact η-sector quantities.
pub fn check_spec(spec: &SystemSpec, times: &[f64]) -> Result<SoundnessRecord> {
    let m = CoefficientMatrices::build(spec)?;
    let eta = spec.eta;
    let sys = SectorSystem::new(&m.t, &m.u, &m.v, eta)?;
    let exact_first = sys.first_order();
    let exact_tvt = sys.tvt();
    let exact_tvv = sys.tvv();
    let errors: Vec<(f64, f64, f64)> = times
        .iter()
        .map(|&t| {
            (
                t,
                sys.trotter_error(t, TrotterOrdering::Vtv),
                sys.trotter_error(t, TrotterOrdering::Tvt),
            )
        })
        .collect();

    let vmax = m.v.amax().max(f64::MIN_POSITIVE);
    let spectral = spectral_decompose(&m.v, 0.0)?;
    let cholesky = cholesky_decompose(&m.v, min_pd_shift(&m.v))?;
    let cosine = cosine_decompose(spec)?;
    let mut worst_residual = 0.0f64;
    let mut methods: Vec<(String, CommutatorBounds, bool)> = Vec::new();
    for fac in [&spectral, &cholesky, &cosine] {
        let r = fac.reconstruction_residual(&m.v).unwrap_or(f64::INFINITY);
        worst_residual = worst_residual.max(r / vmax);
        methods.push((fac.method.to_string(), commutator_bounds(&m.t, &m.u, fac, eta)?, true));
    }
    let shc = shc_bound(&m.t, &m.v, eta);
    methods.push((
        "shc".into(),
        CommutatorBounds {
            first: f64::INFINITY,
            tvt: shc.tvt,
            tvv: shc.tvv,
        },
        false,
    ));

    let mut violations = Vec::new();
    let mut checks = 0;
    let mut check = |method: &str, quantity: String, exact: f64, bound: f64| {
        checks += 1;
        if exceeds(exact, bound) {
            violations.push(Violation {
                sides: spec.sides.clone(),
                eta,
                wigner_seitz: spec.wigner_seitz,
                method: method.to_string(),
                quantity,
                exact,
                bound,
            });
        }
    };
    for (name, b, has_first) in &methods {
        if *has_first {
            check(name, "first".into(), exact_first, b.first);
        }
        check(name, "tvt".into(), exact_tvt, b.tvt);
        check(name, "tvv".into(), exact_tvv, b.tvv);
        for &(t, vtv, tvt) in &errors {
            let t3 = t * t * t;
            check(name, format!("trotter_vtv(t={t})"), vtv, t3 * b.w2_vtv());
            check(name, format!("trotter_tvt(t={t})"), tvt, t3 * b.w2_tvt());
        }
    }
    Ok(SoundnessRecord {
        sides: spec.sides.clone(),
        eta,
        wigner_seitz: spec.wigner_seitz,
        exact_first,
        exact_tvt,
        exact_tvv,
        worst_residual,
        checks,
        violations,
    })
}

/// Lattices with 4 to 12 spin-orbitals.
pub const SMALL_LATTICES: [[usize; 2]; 5] = [[1, 2], [1, 3], [2, 2], [1, 5], [2, 3]];

/// Every spec of the small-system grid: each lattice with at most
/// `max_modes` spin-orbitals, each η from 1 to N/2, each r_s.
pub fn soundness_grid(max_modes: usize, radii: &[f64]) -> Vec<SystemSpec> {
    let mut out = Vec::new();
    for sides in SMALL_LATTICES {
        let n = 2 * sides[0] * sides[1];
        if n > max_modes {
            continue;
        }
        for &rs in radii {
            for eta in 1..=n / 2 {
                out.push(SystemSpec::jellium(&sides, eta, rs));
            }
        }
    }
    out
}

/// Runs [`check_spec`] over a list of specs in parallel; output order
/// follows the input.
pub fn check_all(specs: &[SystemSpec], times: &[f64]) -> Vec<Result<SoundnessRecord>> {
    specs.par_iter().map(|s| check_spec(s, times)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spec_is_sound() {
        let rec = check_spec(&SystemSpec::jellium(&[2, 2], 2, 5.0), &[0.01, 0.1]).unwrap();
        assert!(rec.violations.is_empty(), "{:?}", rec.violations);
        assert!(rec.exact_tvt > 0.0);
        assert!(rec.worst_residual <= 1e-8);
    }

    #[test]
    fn grid_size() {
        let g = soundness_grid(12, &[1.0, 5.0, 10.0]);
        assert_eq!(g.len(), 3 * (2 + 3 + 4 + 5 + 6));
    }
}
