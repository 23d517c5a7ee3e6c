//! The fermionic seminorm of a free-fermionic operator from the eigenvalues
//! of its coefficient matrix, compared with subset enumeration and with the
//! exact η-electron matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pwdual::oracle::NormalOrderedOperator;
use pwdual::seminorm::{brute_force_seminorm, fock_seminorm, reduced_seminorm, CoefficientMatrix};

fn main() -> pwdual::Result<()> {
    let n = 6;
    let a = DMatrix::from_fn(n, n, |i, j| {
        let x = ((i * 7 + j * 3) % 5) as f64 - 2.0;
        let y = ((i * 2 + j * 5) % 3) as f64 - 1.0;
        Complex64::new(x, y)
    });
    let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let cm = CoefficientMatrix::new(h.clone())?;
    let op = NormalOrderedOperator::from_quadratic(&h)?;

    println!(" η   reduced      subsets      η-sector");
    for eta in 0..=n {
        let r = reduced_seminorm(&cm, eta)?;
        let b = brute_force_seminorm(&cm, eta)?;
        let f = fock_seminorm(&op, eta)?;
        println!("{eta:2} {r:12.8} {b:12.8} {f:12.8}");
    }

    let diag = CoefficientMatrix::from_diagonal(&[3.0, -1.0, -4.0, 0.5]);
    println!("diag(3, -1, -4, 0.5) at η = 2: {}", reduced_seminorm(&diag, 2)?);
    Ok(())
}
