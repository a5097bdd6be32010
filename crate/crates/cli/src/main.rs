//! `pcnls` — runs verification experiments from config files or built-in
//! presets and writes deterministic results.csv / manifest.json artifacts.
//!
//! Exit codes: 0 all assertions passed, 1 internal or I/O failure, 2 invalid
//! configuration, 3 at least one assertion failed (artifacts still written).

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pcnls_cli::experiments::{self, RunError};
use pcnls_cli::output::write_artifacts;
use pcnls_cli::{config, presets};

const EXIT_CONFIG: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

/// Compact console rendering; artifacts keep full shortest round-trip floats.
fn fmt_console(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.3e}")
    }
}

#[derive(Parser)]
#[command(name = "pcnls", version, about = "Spectral experiments with deterministic artifacts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a named preset and write its artifacts.
    Run {
        /// Path to a config file, or the name of a built-in preset.
        target: String,
        /// Override the output directory declared in the config.
        #[arg(long)]
        out: Option<String>,
    },
    /// List the built-in presets.
    ListPresets,
    /// Print a preset's summary and its full configuration.
    Describe {
        /// Preset name, as shown by `list-presets`.
        preset: String,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { target, out } => run(&target, out),
        Command::ListPresets => {
            for p in presets::all() {
                println!("{:<28} {}", p.name, p.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Describe { preset } => describe(&preset),
    }
}

fn run(target: &str, out: Option<String>) -> ExitCode {
    let path = Path::new(target);
    let (text, preset_name) = if path.is_file() {
        match fs::read_to_string(path) {
            Ok(t) => (t, None),
            Err(e) => {
                eprintln!("error: cannot read `{}`: {e}", path.display());
                return ExitCode::FAILURE;
            }
        }
    } else if let Some(p) = presets::find(target) {
        (p.config.to_string(), Some(p.name))
    } else {
        eprintln!(
            "error: `{target}` is neither a config file nor a preset; see `pcnls list-presets`"
        );
        return ExitCode::from(EXIT_CONFIG);
    };

    let mut cfg = match config::parse_config(&text) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(dir) = out {
        cfg.out_dir = dir;
    }

    let report = match experiments::run(&cfg) {
        Ok(report) => report,
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(RunError::Core(e)) => {
            eprintln!("error: computation failed: {e}");
            return ExitCode::FAILURE;
        }
    };

    for a in &report.assertions {
        let verdict = if a.passed() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {}: measured {} (want {} {})",
            a.name,
            fmt_console(a.measured),
            a.cmp.symbol(),
            fmt_console(a.bound)
        );
    }
    if let Err(e) = write_artifacts(&cfg, preset_name, &report) {
        eprintln!("error: writing artifacts to `{}`: {e}", cfg.out_dir);
        return ExitCode::FAILURE;
    }

    let total = report.assertions.len();
    if report.passed() {
        println!("{}: {total} assertions passed; artifacts in {}", cfg.name, cfg.out_dir);
        ExitCode::SUCCESS
    } else {
        let failed = report.assertions.iter().filter(|a| !a.passed()).count();
        println!("{}: {failed} of {total} assertions FAILED; artifacts in {}", cfg.name, cfg.out_dir);
        ExitCode::from(EXIT_ASSERTION)
    }
}

fn describe(name: &str) -> ExitCode {
    match presets::find(name) {
        Some(p) => {
            println!("{} — {}", p.name, p.summary);
            println!();
            print!("{}", p.config);
            ExitCode::SUCCESS
        }
        None => {
            eprintln!("error: no preset named `{name}`; see `pcnls list-presets`");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
