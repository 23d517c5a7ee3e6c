//! The three decompositions of the pair potential V and their
//! reconstruction residuals.

use pwdual::factorization::{cholesky_decompose, cosine_decompose, min_pd_shift, spectral_decompose};
use pwdual::{CoefficientMatrices, SystemSpec};

fn main() -> pwdual::Result<()> {
    let spec = SystemSpec::jellium(&[4, 4], 10, 5.0);
    let m = CoefficientMatrices::build(&spec)?;
    let vmax = m.v.amax();
    let c = min_pd_shift(&m.v);

    let facs = [
        spectral_decompose(&m.v, 0.0)?,
        cholesky_decompose(&m.v, c)?,
        cosine_decompose(&spec)?,
    ];
    println!("method     factors  shift      residual/max|V|  dropped constant");
    for f in &facs {
        let r = f.reconstruction_residual(&m.v).unwrap_or(f64::NAN) / vmax;
        println!(
            "{:<10} {:>7}  {:<9.3e}  {:<15.3e}  {:.6}",
            f.method.as_str(),
            f.factors.len(),
            f.shift,
            r,
            f.dropped_constant
        );
    }

    let top: Vec<f64> = facs[0].factors.iter().take(4).map(|f| f.weight).collect();
    println!("leading spectral weights: {top:?}");
    Ok(())
}
