//! A small resumable parameter sweep driven through the CLI layer, writing
//! CSV to a temporary directory.

use pwdual::cli::{run, RunConfig};
use pwdual::BoundMethod;

fn main() -> pwdual::Result<()> {
    let dir = std::env::temp_dir().join("pwdual-sweep-example");
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("sweep.csv");
    let _ = std::fs::remove_file(&csv);

    let mut cfg = RunConfig::from_toml(
        r#"
        command = "sweep"
        methods = ["cholesky", "cosine", "shc"]

        [system]
        dimension = 2
        sides = [4, 4]
        eta = 4
        wigner_seitz = 5.0

        [sweep]
        eta = [2, 8, 16]
        wigner_seitz = [1.0, 10.0]
        "#,
    )?;
    cfg.output.csv = Some(csv.clone());
    run(&cfg)?;

    // rerunning with an extra method computes only the missing rows
    cfg.methods.push(BoundMethod::Spectral);
    run(&cfg)?;
    print!("{}", std::fs::read_to_string(&csv)?);
    Ok(())
}
