//! Plane-wave dual basis coefficient matrices.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = Σ_pq T_pq a†_p a_q + Σ_p U_p n_p + Σ_{p≠q} V_pq n_p n_q
//! ```
//!
//! in Hartree atomic units. Spin-orbitals are blocked by spin: indices
//! `0..N/2` are spin-up, `N/2..N` spin-down. Within a block the spatial index
//! is row-major over lattice coordinates (last coordinate fastest), with each
//! coordinate running over `[-⌊L/2⌋, ⌊L/2⌋)` (closed when `L` is odd).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point charge fixed in the simulation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nucleus {
    /// Position in Bohr.
    pub position: Vec<f64>,
    /// Charge ζ in units of the proton charge.
    pub charge: f64,
}

/// Which mode count divides the kinetic sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KineticNormalization {
    /// Divide by the number of modes N (spin-orbitals when spinful).
    #[default]
    SpinOrbitals,
    /// Divide by the number of spatial orbitals.
    SpatialOrbitals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub dimension: usize,
    pub sides: Vec<usize>,
    pub eta: usize,
    /// Wigner-Seitz radius r_s in Bohr.
    pub wigner_seitz: f64,
    #[serde(default)]
    pub nuclei: Vec<Nucleus>,
    #[serde(default = "default_true")]
    pub spinful: bool,
    #[serde(default)]
    pub kinetic_normalization: KineticNormalization,
}

fn default_true() -> bool {
    true
}

impl SystemSpec {
    /// Spinful Jellium (no nuclei) on a lattice with the given sides.
    pub fn jellium(sides: &[usize], eta: usize, wigner_seitz: f64) -> Self {
        Self {
            dimension: sides.len(),
            sides: sides.to_vec(),
            eta,
            wigner_seitz,
            nuclei: Vec::new(),
            spinful: true,
            kinetic_normalization: KineticNormalization::SpinOrbitals,
        }
    }

    pub fn with_eta(&self, eta: usize) -> Self {
        Self {
            eta,
            ..self.clone()
        }
    }

    pub fn n_spatial(&self) -> usize {
        self.sides.iter().product()
    }

    /// Number of modes N (spin-orbitals).
    pub fn n_modes(&self) -> usize {
        if self.spinful {
            2 * self.n_spatial()
        } else {
            self.n_spatial()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 2 && self.dimension != 3 {
            return Err(Error::UnsupportedDimension(self.dimension));
        }
        if self.sides.len() != self.dimension {
            return Err(Error::InvalidSystem(format!(
                "{} sides given for a {}D cell",
                self.sides.len(),
                self.dimension
            )));
        }
        if self.sides.contains(&0) {
            return Err(Error::InvalidSystem("lattice sides must be positive".into()));
        }
        if !(self.wigner_seitz.is_finite() && self.wigner_seitz > 0.0) {
            return Err(Error::InvalidSystem(format!(
                "Wigner-Seitz radius must be positive, got {}",
                self.wigner_seitz
            )));
        }
        let n = self.n_modes();
        if self.eta == 0 || self.eta > n {
            return Err(Error::EtaOutOfRange {
                eta: self.eta,
                modes: n,
            });
        }
        for nuc in &self.nuclei {
            if nuc.position.len() != self.dimension {
                return Err(Error::InvalidSystem(format!(
                    "nucleus position has {} components in a {}D cell",
                    nuc.position.len(),
                    self.dimension
                )));
            }
        }
        Ok(())
    }

    /// Filling fraction η / N.
    pub fn filling(&self) -> f64 {
        self.eta as f64 / self.n_modes() as f64
    }
}

/// Cell volume Ω obtained by inverting the density relation for r_s.
pub fn cell_volume(spec: &SystemSpec) -> Result<f64> {
    let eta = spec.eta as f64;
    let rs = spec.wigner_seitz;
    match spec.dimension {
        2 => Ok(eta * PI * rs * rs),
        3 => Ok(eta * 4.0 * PI / 3.0 * rs.powi(3)),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Integer range `[-⌊L/2⌋, ⌊L/2⌋)`, closed on the right when `L` is odd.
fn axis_range(side: usize) -> std::ops::Range<i64> {
    let half = (side / 2) as i64;
    let upper = if side % 2 == 1 { half + 1 } else { half };
    -half..upper
}

/// All integer grid vectors of the lattice in row-major order.
fn lattice_points(sides: &[usize]) -> Vec<Vec<i64>> {
    let mut points: Vec<Vec<i64>> = vec![Vec::new()];
    for &side in sides {
        let mut next = Vec::with_capacity(points.len() * side);
        for p in &points {
            for c in axis_range(side) {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

/// A momentum mode ν together with its wave vector k_ν = 2πν/Ω^{1/d}.
#[derive(Debug, Clone, PartialEq)]
pub struct Momentum {
    pub nu: Vec<i64>,
    pub k: Vec<f64>,
}

impl Momentum {
    pub fn k_squared(&self) -> f64 {
        self.k.iter().map(|x| x * x).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nu.iter().all(|&c| c == 0)
    }
}

pub fn momentum_vectors(spec: &SystemSpec) -> Result<Vec<Momentum>> {
    let omega = cell_volume(spec)?;
    let scale = 2.0 * PI / omega.powf(1.0 / spec.dimension as f64);
    Ok(lattice_points(&spec.sides)
        .into_iter()
        .map(|nu| {
            let k = nu.iter().map(|&c| scale * c as f64).collect();
            Momentum { nu, k }
        })
        .collect())
}

/// Orbital spacing along each axis, Ω^{1/d}/L_i: the cell is a cube of side
/// Ω^{1/d} sampled by the lattice. On a cubic lattice this is (Ω/N_spatial)^{1/d}.
fn orbital_spacing(spec: &SystemSpec, omega: f64) -> Vec<f64> {
    let side = omega.powf(1.0 / spec.dimension as f64);
    spec.sides.iter().map(|&l| side / l as f64).collect()
}

/// Integer grid coordinates of each spatial orbital.
pub fn orbital_grid(spec: &SystemSpec) -> Vec<Vec<i64>> {
    lattice_points(&spec.sides)
}

/// Centroid positions r_p of the spatial orbitals, in Bohr.
pub fn orbital_positions(spec: &SystemSpec) -> Result<Vec<Vec<f64>>> {
    let omega = cell_volume(spec)?;
    let h = orbital_spacing(spec, omega);
    Ok(orbital_grid(spec)
        .into_iter()
        .map(|p| p.iter().zip(&h).map(|(&c, h)| h * c as f64).collect())
        .collect())
}

/// Spatial index and spin (0 up, 1 down) of spin-orbital `p`.
pub fn split_spin_orbital(spec: &SystemSpec, p: usize) -> (usize, usize) {
    let ns = spec.n_spatial();
    if spec.spinful {
        (p % ns, p / ns)
    } else {
        (p, 0)
    }
}

/// Shared geometry: the per-axis phase factors 2π/L_i turn the integer
/// displacement p − q into k_ν·(r_p − r_q), which keeps every entry a function
/// of the integer displacement alone.
struct Geometry {
    grid: Vec<Vec<i64>>,
    momenta: Vec<Momentum>,
    phase_scale: Vec<f64>,
    omega: f64,
}

impl Geometry {
    fn new(spec: &SystemSpec) -> Result<Self> {
        spec.validate()?;
        let omega = cell_volume(spec)?;
        let phase_scale = spec.sides.iter().map(|&l| 2.0 * PI / l as f64).collect();
        Ok(Self {
            grid: orbital_grid(spec),
            momenta: momentum_vectors(spec)?,
            phase_scale,
            omega,
        })
    }

    fn phase(&self, nu: &[i64], disp: &[i64]) -> f64 {
        nu.iter()
            .zip(disp)
            .zip(&self.phase_scale)
            .map(|((&n, &d), s)| s * (n * d) as f64)
            .sum()
    }

    /// Builds the spatial matrix `f(p, q)` on the upper triangle and mirrors it.
    fn spatial_matrix<F>(&self, entry: F) -> DMatrix<f64>
    where
        F: Fn(&[i64]) -> f64 + Sync,
    {
        let ns = self.grid.len();
        let rows: Vec<Vec<f64>> = (0..ns)
            .into_par_iter()
            .map(|p| {
                (p..ns)
                    .map(|q| {
                        let disp: Vec<i64> = self.grid[p]
                            .iter()
                            .zip(&self.grid[q])
                            .map(|(a, b)| a - b)
                            .collect();
                        entry(&disp)
                    })
                    .collect()
            })
            .collect();
        let mut m = DMatrix::zeros(ns, ns);
        for (p, row) in rows.into_iter().enumerate() {
            for (off, val) in row.into_iter().enumerate() {
                let q = p + off;
                m[(p, q)] = val;
                m[(q, p)] = val;
            }
        }
        m
    }
}

/// Kinetic matrix T_pq = δ_{σpσq} Σ_ν k_ν² cos(k_ν·(r_p − r_q)) / N.
pub fn build_kinetic(spec: &SystemSpec) -> Result<DMatrix<f64>> {
    let geo = Geometry::new(spec)?;
    let denom = match spec.kinetic_normalization {
        KineticNormalization::SpinOrbitals => spec.n_modes(),
        KineticNormalization::SpatialOrbitals => spec.n_spatial(),
    } as f64;
    let spatial = geo.spatial_matrix(|disp| {
        geo.momenta
            .iter()
            .map(|m| m.k_squared() * geo.phase(&m.nu, disp).cos())
            .sum::<f64>()
            / denom
    });
    Ok(spin_blocks(spec, &spatial, false))
}

/// Coulomb matrix V_pq = Σ_{ν≠0} 2π cos(k_ν·(r_p − r_q)) / (Ω k_ν²), zero diagonal.
pub fn build_coulomb(spec: &SystemSpec) -> Result<DMatrix<f64>> {
    let geo = Geometry::new(spec)?;
    let spatial = geo.spatial_matrix(|disp| {
        geo.momenta
            .iter()
            .filter(|m| !m.is_zero())
            .map(|m| {
                2.0 * PI * geo.phase(&m.nu, disp).cos()
                    / (geo.omega * m.k_squared())
            })
            .sum()
    });
    let mut v = spin_blocks(spec, &spatial, true);
    v.fill_diagonal(0.0);
    Ok(v)
}

/// External potential U_p = −Σ_j Σ_{ν≠0} 4πζ_j cos(k_ν·(R_j − r_p)) / (Ω k_ν²).
pub fn build_external(spec: &SystemSpec) -> Result<DVector<f64>> {
    let geo = Geometry::new(spec)?;
    let n = spec.n_modes();
    if spec.nuclei.is_empty() {
        return Ok(DVector::zeros(n));
    }
    let positions = orbital_positions(spec)?;
    let spatial: Vec<f64> = positions
        .iter()
        .map(|r| {
            let mut acc = 0.0;
            for nuc in &spec.nuclei {
                for m in geo.momenta.iter().filter(|m| !m.is_zero()) {
                    let phase: f64 = m
                        .k
                        .iter()
                        .zip(nuc.position.iter().zip(r))
                        .map(|(k, (rj, rp))| k * (rj - rp))
                        .sum();
                    acc -= 4.0 * PI * nuc.charge * phase.cos() / (geo.omega * m.k_squared());
                }
            }
            acc
        })
        .collect();
    let ns = spec.n_spatial();
    Ok(DVector::from_fn(n, |p, _| spatial[p % ns]))
}

/// Lifts a spatial matrix to spin-orbitals; `cross_spin` copies it into the
/// off-diagonal spin blocks as well.
fn spin_blocks(spec: &SystemSpec, spatial: &DMatrix<f64>, cross_spin: bool) -> DMatrix<f64> {
    if !spec.spinful {
        return spatial.clone();
    }
    let ns = spatial.nrows();
    let mut m = DMatrix::zeros(2 * ns, 2 * ns);
    for a in 0..2 {
        for b in 0..2 {
            if a == b || cross_spin {
                m.view_mut((a * ns, b * ns), (ns, ns)).copy_from(spatial);
            }
        }
    }
    m
}

/// The three coefficient arrays of the plane-wave dual Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrices {
    pub t: DMatrix<f64>,
    pub u: DVector<f64>,
    pub v: DMatrix<f64>,
    pub n: usize,
}

impl CoefficientMatrices {
    pub fn build(spec: &SystemSpec) -> Result<Self> {
        let t = build_kinetic(spec)?;
        let u = build_external(spec)?;
        let v = build_coulomb(spec)?;
        Ok(Self {
            n: spec.n_modes(),
            t,
            u,
            v,
        })
    }

    /// External potential as a dense diagonal matrix.
    pub fn u_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.u)
    }
}
