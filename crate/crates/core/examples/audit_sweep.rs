//! A seeded sweep from a TOML description, written as CSV to stdout.

use ffgeom::experiment::{export, run_experiment, ExperimentConfig, Format};

const CONFIG: &str = r#"
p = 11
seed = 2024
runs = 6
audits = ["triple-bound", "bisector-bound", "k-constant"]
statistics = ["triples"]

[e_set]
kind = "random"
size = 14
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig::from_toml(CONFIG)?;
    let mut report = run_experiment(&config)?;
    report.strip_timing();
    print!("{}", String::from_utf8(export(&report, Format::Csv)?)?);
    eprintln!("{} rows, exit status {}", report.rows.len(), report.exit_code());
    Ok(())
}
