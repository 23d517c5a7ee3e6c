//! Phase-estimation costing of second-order Trotter circuits and the
//! qubitization comparison.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SystemSpec;

/// Root-mean-square phase-estimation prefactor.
pub const PE_PREFACTOR: f64 = 0.76 * PI;

/// Default ancilla cap for Hamming-weight phasing.
pub const DEFAULT_HWP_CAP: usize = 14;

/// T gates of one fermionic FFT on the given number of modes.
pub fn ffft_t_count(modes: usize) -> Option<u64> {
    match modes {
        8 => Some(26),
        16 => Some(81),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub delta_total: f64,
    pub delta_pe: f64,
    pub delta_ts: f64,
    pub delta_syn: f64,
}

impl ErrorBudget {
    pub fn from_fractions(delta_total: f64, ts: f64, syn: f64) -> Result<Self> {
        let b = Self {
            delta_total,
            delta_pe: delta_total * (1.0 - ts - syn),
            delta_ts: delta_total * ts,
            delta_syn: delta_total * syn,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.delta_pe, self.delta_ts, self.delta_syn];
        if parts.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InfeasibleBudget(format!("non-positive budget component in {self:?}")));
        }
        if parts.iter().sum::<f64>() > self.delta_total * (1.0 + 1e-12) {
            return Err(Error::InfeasibleBudget(format!("components exceed total in {self:?}")));
        }
        Ok(())
    }
}

/// T-count per arbitrary rotation, `⌈a·log₂(1/ε) + b⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisModel {
    pub a: f64,
    pub b: f64,
}

impl Default for SynthesisModel {
    fn default() -> Self {
        Self { a: 1.15, b: 9.2 }
    }
}

impl SynthesisModel {
    pub fn t_count(&self, epsilon: f64) -> u64 {
        (self.a * (1.0 / epsilon).log2() + self.b).ceil().max(0.0) as u64
    }
}

/// Δ_PE = 0.76π/(N_PE·t).
pub fn pe_error(n_pe: u64, t: f64) -> f64 {
    PE_PREFACTOR / (n_pe as f64 * t)
}

/// Δ_TS = W₂·t².
pub fn trotter_energy_error(w2: f64, t: f64) -> f64 {
    w2 * t * t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HwpCount {
    pub rotations: u64,
    pub toffolis: u64,
    pub ancillas: u64,
}

impl std::ops::AddAssign for HwpCount {
    fn add_assign(&mut self, o: Self) {
        self.rotations += o.rotations;
        self.toffolis += o.toffolis;
        self.ancillas = self.ancillas.max(o.ancillas);
    }
}

fn hwp_single(k: u64) -> HwpCount {
    let w = k.count_ones() as u64;
    HwpCount {
        rotations: 63 - k.leading_zeros() as u64 + 1,
        toffolis: k - w,
        ancillas: k - w,
    }
}

/// Largest group size whose Hamming-weight register fits the cap.
pub fn max_hwp_group(cap: usize) -> u64 {
    let cap = cap as u64;
    let mut g = 1;
    while (g + 1) - (g + 1u64).count_ones() as u64 <= cap {
        g += 1;
    }
    g
}

/// Cost of `k` equal-angle rotations with Hamming-weight phasing. Groups
/// needing more than `cap` ancillas are split greedily into maximal
/// admissible subgroups; `ancillas` is the largest subgroup's need.
pub fn hwp_counts(k: usize, cap: usize) -> HwpCount {
    let gmax = max_hwp_group(cap);
    let mut left = k as u64;
    let mut total = HwpCount::default();
    while left > 0 {
        let g = left.min(gmax);
        total += hwp_single(g);
        left -= g;
    }
    total
}

/// Multiplicities of distinct values after rounding to 12 decimals; zeros
/// are dropped.
pub fn angle_groups(values: impl IntoIterator<Item = f64>) -> BTreeMap<i128, usize> {
    let mut groups = BTreeMap::new();
    for v in values {
        let key = (v * 1e12).round() as i128;
        if key != 0 {
            *groups.entry(key).or_insert(0) += 1;
        }
    }
    groups
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChange {
    Fft,
    Givens,
    Auto,
    /// No basis change cost (for diagonal kinetic terms).
    Bypass,
}

impl std::str::FromStr for BasisChange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fft" => Ok(BasisChange::Fft),
            "givens" => Ok(BasisChange::Givens),
            "auto" => Ok(BasisChange::Auto),
            "bypass" => Ok(BasisChange::Bypass),
            other => Err(Error::Config(format!("unknown basis change `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepOptions {
    pub basis_change: BasisChange,
    pub hwp_cap: usize,
    /// Directionally controlled evolution costs the same as uncontrolled;
    /// without it every rotation is doubled.
    pub directional_control: bool,
    /// Basis changes per Trotter step (into and out of the plane-wave basis).
    pub basis_changes_per_step: u64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            basis_change: BasisChange::Auto,
            hwp_cap: DEFAULT_HWP_CAP,
            directional_control: true,
            basis_changes_per_step: 2,
        }
    }
}

/// Gate counts of one Trotter step, before rotation synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepCost {
    pub rotations: u64,
    pub toffolis: u64,
    /// T gates spent on FFFT basis changes (not synthesized rotations).
    pub basis_change_t: u64,
    pub hwp_ancillas: u64,
    pub basis_change: BasisChange,
}

impl StepCost {
    pub fn t_count(&self, synthesis: &SynthesisModel, epsilon_r: f64) -> u64 {
        self.rotations * synthesis.t_count(epsilon_r) + self.basis_change_t
    }
}

fn other_sides_product(sides: &[usize], i: usize) -> usize {
    sides
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &l)| l)
        .product()
}

/// Cost of one Trotter step: Hamming-weight-phased potential and kinetic
/// rotations plus the basis change between the dual and plane-wave bases.
pub fn trotter_step_cost(
    spec: &SystemSpec,
    t: &DMatrix<f64>,
    v: &DMatrix<f64>,
    options: &StepOptions,
) -> Result<StepCost> {
    spec.validate()?;
    let n = t.nrows();
    let cap = options.hwp_cap;
    let mut hwp = HwpCount::default();

    let pairs = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q)));
    for (_, k) in angle_groups(pairs.map(|(p, q)| v[(p, q)])) {
        hwp += hwp_counts(k, cap);
    }
    let kinetic = kinetic_eigenvalues(t);
    for (_, k) in angle_groups(kinetic) {
        hwp += hwp_counts(k, cap);
    }

    let spin = if spec.spinful { 2 } else { 1 };
    let fft_ok = spec.sides.iter().all(|&l| ffft_t_count(l).is_some());
    let resolved = match options.basis_change {
        BasisChange::Auto if fft_ok => BasisChange::Fft,
        BasisChange::Auto => BasisChange::Givens,
        BasisChange::Fft if !fft_ok => return Err(Error::FfftUnsupported(spec.sides.clone())),
        other => other,
    };
    let mut basis_change_t = 0;
    match resolved {
        BasisChange::Fft => {
            let per_change: u64 = spec
                .sides
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let applications = (spin * other_sides_product(&spec.sides, i)) as u64;
                    applications * ffft_t_count(l).expect("supported side")
                })
                .sum();
            basis_change_t = per_change * options.basis_changes_per_step;
        }
        BasisChange::Givens => {
            for _ in 0..options.basis_changes_per_step {
                for (i, &l) in spec.sides.iter().enumerate() {
                    // 2 rotations per Givens, spins and other axes in parallel
                    let group = 2 * spin * other_sides_product(&spec.sides, i);
                    for _ in 0..l * l.saturating_sub(1) / 2 {
                        hwp += hwp_counts(group, cap);
                    }
                }
            }
        }
        BasisChange::Bypass | BasisChange::Auto => {}
    }

    let rotations = if options.directional_control {
        hwp.rotations
    } else {
        2 * hwp.rotations
    };
    Ok(StepCost {
        rotations,
        toffolis: hwp.toffolis,
        basis_change_t,
        hwp_ancillas: hwp.ancillas,
        basis_change: resolved,
    })
}

fn kinetic_eigenvalues(t: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.nrows());
    collect_eigenvalues(t, &mut out);
    out
}

fn collect_eigenvalues(m: &DMatrix<f64>, out: &mut Vec<f64>) {
    let n = m.nrows();
    if n >= 4 && n.is_multiple_of(2) {
        let h = n / 2;
        let off = m.view((0, h), (h, h)).iter().all(|&x| x == 0.0)
            && m.view((h, 0), (h, h)).iter().all(|&x| x == 0.0);
        if off {
            let top = m.view((0, 0), (h, h)).into_owned();
            let bottom = m.view((h, h), (h, h)).into_owned();
            let start = out.len();
            collect_eigenvalues(&top, out);
            if top == bottom {
                let copy: Vec<f64> = out[start..].to_vec();
                out.extend(copy);
            } else {
                collect_eigenvalues(&bottom, out);
            }
            return;
        }
    }
    out.extend(m.clone().symmetric_eigenvalues().iter());
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub w2: f64,
    pub budget: ErrorBudget,
    pub ts_fraction: f64,
    pub syn_fraction: f64,
    pub n_pe: u64,
    pub t: f64,
    pub epsilon_r: f64,
    pub t_per_rotation: u64,
    pub rotations_per_step: u64,
    pub toffolis_per_step: u64,
    pub t_per_step: u64,
    pub n_t: u64,
    pub n_tof: u64,
    /// `n_t + 4·n_tof`.
    pub aggregated: u64,
    pub ancilla: u64,
    pub lambda: Option<f64>,
    pub qubitization_t: Option<f64>,
    pub qubitization_ancilla: Option<u64>,
}

/// Resource counts at one budget split.
pub fn estimate_at(
    w2: f64,
    delta_total: f64,
    ts_fraction: f64,
    syn_fraction: f64,
    step: &StepCost,
    synthesis: &SynthesisModel,
) -> Result<ResourceEstimate> {
    if !(w2 > 0.0) {
        return Err(Error::InfeasibleBudget(format!("W2 must be positive, got {w2}")));
    }
    let budget = ErrorBudget::from_fractions(delta_total, ts_fraction, syn_fraction)?;
    let t = (budget.delta_ts / w2).sqrt();
    let n_pe = (PE_PREFACTOR / (budget.delta_pe * t)).ceil().max(1.0) as u64;
    let rotations = step.rotations.max(1);
    let epsilon_r = budget.delta_syn * t / rotations as f64;
    if !(epsilon_r > 0.0 && epsilon_r < 1.0) {
        return Err(Error::InfeasibleBudget(format!("rotation target {epsilon_r:e} outside (0, 1)")));
    }
    let t_per_rotation = synthesis.t_count(epsilon_r);
    let t_per_step = step.rotations * t_per_rotation + step.basis_change_t;
    let n_t = n_pe
        .checked_mul(t_per_step)
        .ok_or_else(|| Error::InfeasibleBudget("T count overflow".into()))?;
    let n_tof = n_pe * step.toffolis;
    Ok(ResourceEstimate {
        w2,
        budget,
        ts_fraction,
        syn_fraction,
        n_pe,
        t,
        epsilon_r,
        t_per_rotation,
        rotations_per_step: step.rotations,
        toffolis_per_step: step.toffolis,
        t_per_step,
        n_t,
        n_tof,
        aggregated: n_t + 4 * n_tof,
        ancilla: step.hwp_ancillas,
        lambda: None,
        qubitization_t: None,
        qubitization_ancilla: None,
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn argmin_grid(
    w2: f64,
    delta: f64,
    ts: &[f64],
    syn: &[f64],
    step: &StepCost,
    synthesis: &SynthesisModel,
) -> Option<ResourceEstimate> {
    let candidates: Vec<Option<ResourceEstimate>> = ts
        .par_iter()
        .map(|&a| {
            let mut best: Option<ResourceEstimate> = None;
            for &b in syn {
                if let Ok(e) = estimate_at(w2, delta, a, b, step, synthesis) {
                    if best.as_ref().is_none_or(|x| e.aggregated < x.aggregated) {
                        best = Some(e);
                    }
                }
            }
            best
        })
        .collect();
    // ascending Δ_TS, then Δ_syn; strict improvement keeps the lowest fractions
    let mut best: Option<ResourceEstimate> = None;
    for e in candidates.into_iter().flatten() {
        if best.as_ref().is_none_or(|x| e.aggregated < x.aggregated) {
            best = Some(e);
        }
    }
    best
}

pub const TS_RANGE: (f64, f64) = (0.05, 0.6);
pub const SYN_RANGE: (f64, f64) = (0.001, 0.05);

/// Minimizes the aggregated T count over the Δ_TS and Δ_syn fractions of
/// `delta_total` (Δ_PE takes the rest), with two levels of grid refinement.
pub fn optimize_budget(
    w2: f64,
    delta_total: f64,
    step: &StepCost,
    synthesis: &SynthesisModel,
) -> Result<(ErrorBudget, ResourceEstimate)> {
    if !(w2 > 0.0) {
        return Err(Error::InfeasibleBudget(format!("W2 must be positive, got {w2}")));
    }
    let (mut ts_lo, mut ts_hi) = TS_RANGE;
    let (mut syn_lo, mut syn_hi) = SYN_RANGE;
    let points = 41;
    let mut best: Option<ResourceEstimate> = None;
    for _level in 0..3 {
        let ts = linspace(ts_lo, ts_hi, points);
        let syn = linspace(syn_lo, syn_hi, points);
        let found = argmin_grid(w2, delta_total, &ts, &syn, step, synthesis)
            .ok_or_else(|| Error::InfeasibleBudget(format!("no feasible split for δ = {delta_total}")))?;
        let dts = (ts_hi - ts_lo) / (points - 1) as f64;
        let dsyn = (syn_hi - syn_lo) / (points - 1) as f64;
        ts_lo = (found.ts_fraction - 2.0 * dts).max(TS_RANGE.0);
        ts_hi = (found.ts_fraction + 2.0 * dts).min(TS_RANGE.1);
        syn_lo = (found.syn_fraction - 2.0 * dsyn).max(SYN_RANGE.0);
        syn_hi = (found.syn_fraction + 2.0 * dsyn).min(SYN_RANGE.1);
        let improves = match &best {
            None => true,
            Some(b) => found.aggregated < b.aggregated,
        };
        if improves {
            best = Some(found);
        }
    }
    let best = best.expect("at least one level ran");
    Ok((best.budget, best))
}

/// Jordan–Wigner Pauli 1-norm (identity excluded) of
/// `Σ T_pq a†_p a_q + Σ U_p n_p + Σ_{p≠q} V_pq n_p n_q`, real symmetric T, V.
pub fn lambda_norm(t: &DMatrix<f64>, u: &DVector<f64>, v: &DMatrix<f64>) -> f64 {
    let n = t.nrows();
    let mut hopping = 0.0;
    let mut zz = 0.0;
    let mut z = 0.0;
    for p in 0..n {
        let mut zp = -0.5 * t[(p, p)] - 0.5 * u[p];
        for q in 0..n {
            if q != p {
                zp -= 0.25 * (v[(p, q)] + v[(q, p)]);
            }
            if q > p {
                hopping += 0.5 * (t[(p, q)] + t[(q, p)]).abs();
                zz += 0.25 * (v[(p, q)] + v[(q, p)]).abs();
            }
        }
        z += zp.abs();
    }
    hopping + zz + z
}

/// Qubitization T count `24√2·π·λ·N/δ` and ancilla count
/// `⌈log₂(4√2·π·λ³·N⁵/δ³)⌉`.
pub fn qubitization_cost(lambda: f64, n: usize, delta: f64) -> (f64, u64) {
    let n = n as f64;
    let t = 24.0 * 2f64.sqrt() * PI * lambda * n / delta;
    let anc = (4.0 * 2f64.sqrt() * PI * lambda.powi(3) * n.powi(5) / delta.powi(3))
        .log2()
        .ceil();
    (t, anc.max(0.0) as u64)
}

/// Total error budget `δ = (mHa per electron)·η·10⁻³` Hartree.
pub fn extensive_delta(mha_per_electron: f64, eta: usize) -> f64 {
    mha_per_electron * eta as f64 * 1e-3
}

/// Full Trotter costing of a spec at a given W₂, with the qubitization
/// comparison attached.
pub fn estimate_for_spec(
    spec: &SystemSpec,
    m: &crate::hamiltonian::CoefficientMatrices,
    w2: f64,
    mha_per_electron: f64,
    step_options: &StepOptions,
    synthesis: &SynthesisModel,
) -> Result<ResourceEstimate> {
    let delta = extensive_delta(mha_per_electron, spec.eta);
    let step = trotter_step_cost(spec, &m.t, &m.v, step_options)?;
    let (_, mut est) = optimize_budget(w2, delta, &step, synthesis)?;
    let lambda = lambda_norm(&m.t, &m.u, &m.v);
    let (qt, qa) = qubitization_cost(lambda, m.n, delta);
    est.lambda = Some(lambda);
    est.qubitization_t = Some(qt);
    est.qubitization_ancilla = Some(qa);
    Ok(est)
}
