//! Coefficient 1-norm and qubitization cost next to the Trotter estimate.

use pwdual::resources::{extensive_delta, lambda_norm, qubitization_cost};
use pwdual::{CoefficientMatrices, SystemSpec};

fn main() -> pwdual::Result<()> {
    for (rs, eta) in [(5.0, 49), (10.0, 10), (10.0, 49)] {
        let spec = SystemSpec::jellium(&[8, 8], eta, rs);
        let m = CoefficientMatrices::build(&spec)?;
        let lambda = lambda_norm(&m.t, &m.u, &m.v);
        let delta = extensive_delta(1.0, eta);
        let (t, anc) = qubitization_cost(lambda, m.n, delta);
        println!("r_s = {rs:>4}, η = {eta:>2}: λ = {lambda:9.3}, T = {t:.3e}, ancillas = {anc}");
    }
    Ok(())
}
