use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use freesdp::io::corpus::{GRID_POINTS, GRID_RADIUS};
use freesdp::io::{dual_grid_statuses, emit_corpus, error_exit_code, grid_csv, parse_problem, run, Overrides, EXIT_INPUT_ERROR};
use freesdp::sdp::SolverOptions;

#[derive(Parser)]
#[command(name = "freesdp", version, about = "Free spectrahedra, polar duals, cp interpolation and tracial hulls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one problem file. Exit code 0 decided, 2 marginal, 3 solver
    /// error, 4 input error.
    Run {
        file: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Interpolation mode, domination form or polar form, by kind.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the example problems, their manifest, and the reference grid.
    Corpus { dir: PathBuf },
    /// Polar-membership statuses of the TV screen over a grid, as CSV.
    DualGrid {
        #[arg(long, default_value_t = GRID_POINTS)]
        points: usize,
        #[arg(long, default_value_t = GRID_RADIUS)]
        radius: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            file,
            tol,
            max_iter,
            mode,
            format,
            out,
        } => {
            let bytes = match std::fs::read(&file) {
                Ok(b) => b,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(EXIT_INPUT_ERROR as u8);
                }
            };
            let result = parse_problem(&bytes).and_then(|p| run(&p, &Overrides { tol, max_iter, mode }));
            match result {
                Ok(report) => {
                    let text = match format {
                        Format::Json => report.to_json(),
                        Format::Text => report.to_text(),
                    };
                    if let Err(e) = emit(&text, out.as_ref()) {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_INPUT_ERROR as u8);
                    }
                    report.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    error_exit_code(&e)
                }
            }
        }
        Command::Corpus { dir } => match emit_corpus(&dir) {
            Ok(files) => {
                for f in files {
                    println!("{}", f.display());
                }
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT_ERROR
            }
        },
        Command::DualGrid {
            points,
            radius,
            tol,
            max_iter,
            out,
        } => {
            let mut opts = SolverOptions::default();
            if let Some(t) = tol {
                opts.tol = t;
            }
            if let Some(m) = max_iter {
                opts.max_iter = m;
            }
            match dual_grid_statuses(points, radius, &opts) {
                Ok(grid) => match emit(&grid_csv(&grid), out.as_ref()) {
                    Ok(()) => 0,
                    Err(e) => {
                        eprintln!("error: {e}");
                        EXIT_INPUT_ERROR
                    }
                },
                Err(e) => {
                    eprintln!("error: {e}");
                    error_exit_code(&e)
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
