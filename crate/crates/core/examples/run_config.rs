//! Drive the config-file pipeline from code: parse a TOML run description,
//! run it, and print the summary written to `meta.json`.
//!
//! ```text
//! cargo run --release --example run_config -- crates/core/examples/configs/compare_harmonic.toml
//! ```

use std::path::PathBuf;

use pimd_kubo::cli::{parse_config, run, RunOptions};

fn main() -> pimd_kubo::Result<()> {
    let path: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/compare_harmonic.toml").into())
        .into();
    let text = std::fs::read_to_string(&path)?;
    let cfg = parse_config(&text)?;
    let report = run(&cfg, &RunOptions::default())?;
    println!("{} -> {}", path.display(), report.output_dir.display());
    for f in &report.files {
        println!("  {f}");
    }
    println!("{}", serde_json::to_string_pretty(&report.summary)?);
    Ok(())
}
