//! Bounds against exact η-sector commutator norms and exact Trotter errors
//! on a 2×3 lattice (12 spin-orbitals).

use pwdual::oracle::{check_spec, SectorSystem, TrotterOrdering};
use pwdual::SystemSpec;

fn main() -> pwdual::Result<()> {
    for eta in 1..=6 {
        let spec = SystemSpec::jellium(&[2, 3], eta, 5.0);
        let sys = SectorSystem::from_spec(&spec)?;
        let rec = check_spec(&spec, &[0.01, 0.1])?;
        println!(
            "η = {eta}  dim = {:4}  ‖[[T,V],T]‖ = {:.6}  ‖[[T,V],V]‖ = {:.6}  error(t=0.1) = {:.3e}  checks = {}  violations = {}",
            sys.dim(),
            rec.exact_tvt,
            rec.exact_tvv,
            sys.trotter_error(0.1, TrotterOrdering::Vtv),
            rec.checks,
            rec.violations.len()
        );
    }
    Ok(())
}
