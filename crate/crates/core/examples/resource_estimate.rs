//! Phase-estimation gate counts for the best bound of an 8×8 cell at a
//! target accuracy of 1 mHa per electron.

use pwdual::bounds::BoundOptions;
use pwdual::resources::{estimate_for_spec, trotter_step_cost, StepOptions, SynthesisModel};
use pwdual::{bound_suite, BoundMethod, CoefficientMatrices, SystemSpec};

fn main() -> pwdual::Result<()> {
    let spec = SystemSpec::jellium(&[8, 8], 49, 5.0);
    let m = CoefficientMatrices::build(&spec)?;
    let w2 = bound_suite(&spec, &[BoundMethod::Cholesky], 49, &BoundOptions::default())?
        .remove(0)
        .result
        .map_err(pwdual::Error::Format)?
        .w2_best;

    let opts = StepOptions::default();
    let step = trotter_step_cost(&spec, &m.t, &m.v, &opts)?;
    println!(
        "per step: {} rotations, {} Toffolis, {} T for the basis change ({:?})",
        step.rotations, step.toffolis, step.basis_change_t, step.basis_change
    );

    let e = estimate_for_spec(&spec, &m, w2, 1.0, &opts, &SynthesisModel::default())?;
    println!("W2 = {:.2}", e.w2);
    println!("split: TS {:.3}, synthesis {:.4}, PE rest", e.ts_fraction, e.syn_fraction);
    println!("steps = {}, t = {:.4e}, T per rotation = {}", e.n_pe, e.t, e.t_per_rotation);
    println!("N_T = {:.3e}, N_Tof = {:.3e}, aggregated = {:.3e}", e.n_t as f64, e.n_tof as f64, e.aggregated as f64);
    Ok(())
}
