//! Builds the plane-wave dual coefficient matrices of a small jellium cell
//! and prints their structure.
//!
//! ```text
//! cargo run --example build_jellium -- 4 4 10 5.0
//! ```

use pwdual::hamiltonian::{cell_volume, momentum_vectors};
use pwdual::{CoefficientMatrices, SystemSpec};

fn main() -> pwdual::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let lx = args.first().and_then(|s| s.parse().ok()).unwrap_or(4);
    let ly = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let eta = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(10);
    let rs = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(5.0);

    let spec = SystemSpec::jellium(&[lx, ly], eta, rs);
    let m = CoefficientMatrices::build(&spec)?;
    println!("{lx}x{ly} lattice, η = {eta}, r_s = {rs}");
    println!("N = {} spin-orbitals, Ω = {:.4}, filling = {:.3}", m.n, cell_volume(&spec)?, spec.filling());

    let kmax = momentum_vectors(&spec)?
        .iter()
        .map(|k| k.k_squared())
        .fold(0.0f64, f64::max);
    println!("largest k²/2 = {:.5}", kmax / 2.0);

    let t_eigs = m.t.clone().symmetric_eigenvalues();
    println!("T eigenvalues in [{:.5}, {:.5}]", t_eigs.min(), t_eigs.max());
    println!("T_00 = {:.6}, T_01 = {:.6}", m.t[(0, 0)], m.t[(0, 1)]);
    println!("max|V| = {:.6}, V_01 = {:.6}", m.v.amax(), m.v[(0, 1)]);
    println!("U is zero for jellium: {}", m.u.iter().all(|&x| x == 0.0));

    // same-site opposite-spin interaction sits at offset N/2
    let half = m.n / 2;
    println!("V_0,N/2 = {:.6}", m.v[(0, half)]);
    Ok(())
}
