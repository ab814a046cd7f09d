//! Drive the file-based pipeline through the same entry point as the
//! `glauber-p` binary.
//!
//! ```bash
//! cargo run --release --example cli_pipeline
//! ```

use std::process::ExitCode;

use glauber_p::cli::main_from;

fn main() -> ExitCode {
    let dir = std::env::temp_dir().join("glauber-p-examples").join("pipeline");
    let data = dir.join("a1.csv");
    let data = data.to_str().expect("utf-8 temp path");
    let out = dir.join("out");
    let out = out.to_str().expect("utf-8 temp path");

    let steps: [&[&str]; 3] = [
        &["simulate", "--nbar", "1.11", "--eta", "0.60", "--w", "1", "--n", "100000", "--seed", "42", "--out", data],
        &["reconstruct", "--data", data, "--cutoff", "2.8", "--out-dir", out],
        &["oracle"],
    ];
    for args in steps {
        println!("$ glauber-p {}", args.join(" "));
        let code = main_from(std::iter::once("glauber-p").chain(args.iter().copied()));
        if code != ExitCode::SUCCESS {
            return code;
        }
        println!();
    }
    ExitCode::SUCCESS
}
