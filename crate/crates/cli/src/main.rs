mod args;
mod commands;
mod manifest;
mod output;

use args::{Cli, Format};
use ccurv_core::ode::Tolerance;
use ccurv_core::Error;
use clap::Parser;
use commands::RunInfo;
use manifest::RunManifest;
use output::{EXIT_CONFIG, EXIT_NUMERICAL};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Invalid(_)
        | Error::Hypothesis(_)
        | Error::OutOfPatch { .. }
        | Error::ProbeCap { .. } => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CCURV_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CCURV_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}.{ext}"))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let tol = match Tolerance::new(cli.tol_rel, cli.tol_abs) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let start = Instant::now();
    let mut info = RunInfo::default();
    let out = match commands::run(&cli.command, tol, &mut info) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let text = match cli.format {
        Format::Json => out.render_json(),
        Format::Csv => out.render_csv(),
        Format::Text => out.render_text(),
    };
    match &cli.out {
        None => print!("{text}"),
        Some(path) => {
            let args: Vec<String> = std::env::args().skip(1).collect();
            let manifest = RunManifest::new(
                args,
                info.field_hash.clone(),
                tol,
                info.grid.clone(),
                &text,
                start.elapsed().as_secs_f64(),
            );
            let mut files = vec![(path.clone(), text.clone())];
            // campaigns keep both machine-readable forms
            if out.csv.is_some() {
                files.push((sibling(path, "json"), out.render_json()));
                files.push((sibling(path, "csv"), out.render_csv()));
            }
            files.push((sibling(path, "manifest.json"), manifest.to_json()));
            files.dedup_by(|a, b| a.0 == b.0);
            for (p, t) in &files {
                if let Err(e) = write(p, t) {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            }
            if cli.format != Format::Text || out.csv.is_some() {
                print!("{}", out.render_text());
            }
        }
    }
    ExitCode::from(out.exit as u8)
}
