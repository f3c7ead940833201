//! Reading a dataset file, checking it, and writing the JSON report, as the
//! `pmsep` binary does. Pass a dataset path, or run without arguments to
//! use the bundled corpus file.
//!
//!     cargo run --example files_and_reports -- corpus/nipmc_tent_cycle.json

use std::path::PathBuf;

use pmsep::cli::{run, Command};
use pmsep::NumericMode;

fn main() {
    let dataset = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/three_act.json"));
    let out = run(&Command::Check { dataset, dump_lp: None }, NumericMode::Rational, &mut |line| eprintln!("{line}"));
    println!("{}", serde_json::to_string_pretty(&out.report).expect("serializable"));
    eprintln!("{} (exit code {})", out.summary, out.code);
}
