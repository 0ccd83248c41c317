//! Batch experiment runner for the weighted isoperimetric laboratory.
//!
//! ```text
//! isoperi run <config>          run an experiment, write CSV/SVG + summary
//! isoperi validate <config>     check a config without running it
//! isoperi plot <csv> <cols>     render a line chart (first column = x axis)
//! ```
//!
//! Exit codes: 0 all assertions pass, 1 an assertion failed, 2 invalid
//! config, 3 numeric failure. ISOPERI_THREADS caps the worker count.

mod config;
mod csv;
mod experiments;
mod pool;
mod svg;

use experiments::RunError;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_ASSERTION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") if args.len() == 2 => run(Path::new(&args[1])),
        Some("validate") if args.len() == 2 => validate(Path::new(&args[1])),
        Some("plot") if args.len() == 3 => plot(Path::new(&args[1]), &args[2]),
        _ => {
            eprintln!("usage: isoperi run <config> | validate <config> | plot <csv> <x,y1[,y2...]>");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn validate(path: &Path) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {path:?}: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let base = path.parent().unwrap_or(Path::new("."));
    let issues = config::validate(&text, base);
    if issues.is_empty() {
        println!("ok");
        ExitCode::SUCCESS
    } else {
        for issue in &issues {
            println!("{issue}");
        }
        ExitCode::from(EXIT_CONFIG)
    }
}

fn plot(csv_path: &Path, cols: &str) -> ExitCode {
    let table = match csv::Table::read(csv_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {csv_path:?}: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let names: Vec<String> = cols.split(',').map(|s| s.trim().to_string()).collect();
    if names.len() < 2 {
        eprintln!("plot needs at least two columns: x,y1[,y2...]");
        return ExitCode::from(EXIT_CONFIG);
    }
    match svg::line_chart(&table, &names[0], &names[1..]) {
        Ok(content) => {
            let out = csv_path.with_extension("svg");
            if let Err(e) = std::fs::write(&out, content) {
                eprintln!("cannot write {out:?}: {e}");
                return ExitCode::from(EXIT_NUMERIC);
            }
            println!("{}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("plot error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn run(path: &Path) -> ExitCode {
    let cfg = match config::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invalid config: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cfg.output) {
        eprintln!("cannot create output directory {:?}: {e}", cfg.output);
        return ExitCode::from(EXIT_CONFIG);
    }

    match experiments::run(&cfg) {
        Ok(outcome) => {
            for (name, table) in &outcome.tables {
                let dest = cfg.output.join(name);
                if let Err(e) = table.write(&dest) {
                    eprintln!("cannot write {dest:?}: {e}");
                    return ExitCode::from(EXIT_NUMERIC);
                }
            }
            if cfg.plot {
                if let Some((file, x, ys)) = &outcome.plot {
                    let table = outcome
                        .tables
                        .iter()
                        .find(|(n, _)| n == file)
                        .map(|(_, t)| t);
                    if let Some(table) = table {
                        match svg::line_chart(table, x, ys) {
                            Ok(content) => {
                                let _ = std::fs::write(cfg.output.join("plot.svg"), content);
                            }
                            Err(e) => eprintln!("plot skipped: {e}"),
                        }
                    }
                }
            }

            let mut summary = String::new();
            for a in &outcome.assertions {
                let status = if a.passed { "PASS" } else { "FAIL" };
                if a.detail.is_empty() {
                    let _ = writeln!(summary, "{}: {status}", a.name);
                } else {
                    let _ = writeln!(summary, "{}: {status} ({})", a.name, a.detail);
                }
            }
            let ok = outcome.all_passed();
            let _ = writeln!(summary, "RESULT: {}", if ok { "PASS" } else { "FAILED" });
            print!("{summary}");
            let _ = std::fs::write(cfg.output.join("summary.txt"), summary);
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ASSERTION)
            }
        }
        Err(RunError::Config(msg)) => {
            eprintln!("invalid config: {msg}");
            let _ = write_failure_marker(&cfg.output, &msg);
            ExitCode::from(EXIT_CONFIG)
        }
        Err(RunError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            let _ = write_failure_marker(&cfg.output, &msg);
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn write_failure_marker(dir: &PathBuf, msg: &str) -> std::io::Result<()> {
    std::fs::write(dir.join("summary.txt"), format!("FAILED: {msg}\n"))
}
