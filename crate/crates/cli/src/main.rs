#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weyl_scatter::config::QUAD_TOL_ENV;
use weyl_scatter::output::{fmt_f64, write_csv, write_json, JsonTable};
use weyl_scatter::{
    cmd_recover_theta, cmd_scatter, cmd_ssf, cmd_verify, CliError, Format, Prepared, RunConfig, EXIT_CONFIG, EXIT_OK,
    EXIT_VERIFY,
};

#[derive(Parser)]
#[command(name = "weyl-scatter", version, about = "Scattering matrices and spectral shift functions from Weyl functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scattering matrix on the λ-grid.
    Scatter(Args),
    /// Spectral shift function and Birman-Krein residual on the λ-grid.
    Ssf(Args),
    /// Run every invariant check and write a JSON report.
    Verify(Args),
    /// Recover Θ from the Dirac scattering matrix at `lambda_probe`.
    RecoverTheta(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent (overrides `outputs.path`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `outputs.format`.
    #[arg(long)]
    format: Option<Format>,
    /// Worker threads for grid evaluation.
    #[arg(long)]
    jobs: Option<usize>,
}

fn load(args: &Args) -> Result<Prepared, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::Config {
        path: "$".into(),
        message: format!("{}: {e}", args.config.display()),
    })?;
    let mut cfg = RunConfig::from_json(&text)?;
    cfg.override_quad_tol(std::env::var(QUAD_TOL_ENV).ok().as_deref())?;
    if let Some(f) = args.format {
        cfg.outputs.format = f;
    }
    let base = args.config.parent().unwrap_or(Path::new("."));
    Prepared::new(cfg, base)
}

fn sink(args: &Args, p: &Prepared) -> Result<(Box<dyn Write>, String), CliError> {
    let target = args.out.clone().or_else(|| p.config.outputs.path.as_ref().map(PathBuf::from));
    match target {
        None => Ok((Box::new(BufWriter::new(io::stdout().lock())), "stdout".into())),
        Some(path) => {
            let name = path.display().to_string();
            let file = File::create(&path).map_err(|source| CliError::Io {
                path: name.clone(),
                source,
            })?;
            Ok((Box::new(BufWriter::new(file)), name))
        }
    }
}

fn emit(args: &Args, p: &Prepared, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
    let (mut w, name) = sink(args, p)?;
    write(&mut w)
        .and_then(|_| w.flush())
        .map_err(|source| CliError::Io { path: name, source })
}

fn run(command: Command) -> Result<i32, CliError> {
    let (args, kind) = match &command {
        Command::Scatter(a) => (a, 0),
        Command::Ssf(a) => (a, 1),
        Command::Verify(a) => (a, 2),
        Command::RecoverTheta(a) => (a, 3),
    };
    if let Some(jobs) = args.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let p = load(args)?;
    let format = p.config.outputs.format;
    match kind {
        0 | 1 => {
            let table = if kind == 0 { cmd_scatter(&p)? } else { cmd_ssf(&p)? };
            emit(args, &p, |w| match format {
                Format::Csv => write_csv(&table, w),
                Format::Json => write_json(&JsonTable::from(&table), w),
            })?;
            Ok(EXIT_OK)
        }
        2 => {
            let report = cmd_verify(&p);
            emit(args, &p, |w| match format {
                Format::Json => write_json(&report, w),
                Format::Csv => {
                    writeln!(w, "# config_hash sha256:{}", report.config_hash)?;
                    writeln!(w, "check_name,points_tested,max_residual,tolerance,pass")?;
                    for c in &report.checks {
                        let r = c.max_residual.map_or_else(String::new, fmt_f64);
                        writeln!(w, "{},{},{},{},{}", c.check_name, c.points_tested, r, fmt_f64(c.tolerance), c.pass)?;
                    }
                    Ok(())
                }
            })?;
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("check failed: {} (max residual {:?}, tolerance {:e})", c.check_name, c.max_residual, c.tolerance);
            }
            Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
        }
        _ => {
            let rec = cmd_recover_theta(&p)?;
            emit(args, &p, |w| write_json(&rec, w))?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
