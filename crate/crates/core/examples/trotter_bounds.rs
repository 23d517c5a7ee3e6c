//! Second-order Trotter bounds for every method on an 8×8 cell.
//!
//! ```text
//! cargo run --release --example trotter_bounds -- 5.0 49
//! ```

use pwdual::bounds::BoundOptions;
use pwdual::{bound_suite, BoundMethod, SystemSpec};

fn main() -> pwdual::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let rs = args.first().and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let eta = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(49);
    let spec = SystemSpec::jellium(&[8, 8], eta, rs);

    let outcomes = bound_suite(&spec, &BoundMethod::ALL, eta, &BoundOptions::default())?;
    println!("method     tvt          tvv          W2(vtv)      W2(tvt)      time");
    for o in outcomes {
        match o.result {
            Ok(r) => println!(
                "{:<10} {:<12.4} {:<12.4} {:<12.4} {:<12.4} {:.2}s",
                r.method.as_str(),
                r.tvt,
                r.tvv,
                r.w2_vtv,
                r.w2_tvt,
                r.wall_time_s
            ),
            Err(e) => println!("{:<10} failed: {e}", o.method.as_str()),
        }
    }
    Ok(())
}
