//! `threatforge` command-line front end.
//!
//! Exit codes: 0 success, 1 parse/validation failure, 2 strict-coverage
//! gaps, 3 I/O failure. Reports go to stdout, diagnostics to stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use threatforge::catalog::{default_catalog, load_catalog, merge, Catalog};
use threatforge::engine::{coverage, enumerate, stats, CoverageStatus};
use threatforge::model::{validate, SystemModel};
use threatforge::report::{render_csv, render_json, render_markdown, stats_json};
use threatforge::sdl;

const EXIT_INVALID: u8 = 1;
const EXIT_UNCOVERED: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "threatforge", version, about = "Threat-model-as-code engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Md,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a system description
    Validate { system_file: PathBuf },
    /// Enumerate threats for a system and render a report
    Enumerate {
        system_file: PathBuf,
        /// Extra catalog file, merged left-to-right onto the default
        #[arg(long = "catalog")]
        catalogs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
        /// Start from an empty catalog instead of the built-in one
        #[arg(long)]
        no_default_catalog: bool,
    },
    /// Show the per-(asset, threat type) coverage matrix
    Coverage {
        system_file: PathBuf,
        #[arg(long = "catalog")]
        catalogs: Vec<PathBuf>,
        #[arg(long)]
        no_default_catalog: bool,
        /// Exit 2 if any cell is uncovered
        #[arg(long)]
        strict: bool,
    },
    /// Inspect or validate threat catalogs
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Print summary statistics as JSON
    Stats {
        system_file: PathBuf,
        #[arg(long = "catalog")]
        catalogs: Vec<PathBuf>,
        #[arg(long)]
        no_default_catalog: bool,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List merged catalog entries in order
    List {
        #[arg(long = "catalog")]
        catalogs: Vec<PathBuf>,
        #[arg(long)]
        no_default_catalog: bool,
    },
    /// Validate a catalog file
    Validate { catalog_file: PathBuf },
}

fn read_file(path: &Path) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        EXIT_IO
    })
}

fn load_system(path: &Path) -> Result<SystemModel, u8> {
    let source = read_file(path)?;
    match sdl::parse(&source) {
        Ok(system) => Ok(system),
        Err(errors) => {
            for e in &errors {
                eprintln!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message);
            }
            Err(EXIT_INVALID)
        }
    }
}

fn load_merged_catalog(catalogs: &[PathBuf], no_default: bool) -> Result<Catalog, u8> {
    let mut merged = if no_default {
        Catalog::empty("empty")
    } else {
        default_catalog()
    };
    for path in catalogs {
        let document = read_file(path)?;
        match load_catalog(&document) {
            Ok(catalog) => merged = merge(&merged, &catalog),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                return Err(EXIT_INVALID);
            }
        }
    }
    Ok(merged)
}

fn cmd_validate(path: &Path) -> Result<(), u8> {
    let system = load_system(path)?;
    let report = validate(&system);
    for issue in &report.issues {
        eprintln!(
            "{}: {}: {}",
            path.display(),
            match issue.severity {
                threatforge::model::Severity::Error => "error",
                threatforge::model::Severity::Warning => "warning",
            },
            issue.message
        );
    }
    if report.is_valid() {
        Ok(())
    } else {
        Err(EXIT_INVALID)
    }
}

fn cmd_enumerate(
    path: &Path,
    catalogs: &[PathBuf],
    format: Format,
    no_default: bool,
) -> Result<(), u8> {
    let system = load_system(path)?;
    let catalog = load_merged_catalog(catalogs, no_default)?;
    let model = enumerate(&system, &catalog);
    let rendered = match format {
        Format::Md => render_markdown(&model, &system),
        Format::Csv => render_csv(&model, &system),
        Format::Json => {
            let report = coverage(&system, &model).expect("model built from system");
            render_json(&model, &report, &stats(&model), &system)
        }
    }
    .expect("model built from system");
    print!("{rendered}");
    if !rendered.ends_with('\n') {
        println!();
    }
    Ok(())
}

fn cmd_coverage(
    path: &Path,
    catalogs: &[PathBuf],
    no_default: bool,
    strict: bool,
) -> Result<(), u8> {
    let system = load_system(path)?;
    let catalog = load_merged_catalog(catalogs, no_default)?;
    let model = enumerate(&system, &catalog);
    let report = coverage(&system, &model).expect("model built from system");

    let mut out = String::new();
    let _ = writeln!(out, "| Asset | Type | Status | Instances |");
    let _ = writeln!(out, "| --- | --- | --- | --- |");
    for cell in &report.cells {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            cell.asset_id,
            cell.threat_type.code(),
            match cell.status {
                CoverageStatus::Covered => "covered",
                CoverageStatus::Uncovered => "uncovered",
            },
            cell.instance_count
        );
    }
    let covered = report
        .cells
        .iter()
        .filter(|c| c.status == CoverageStatus::Covered)
        .count();
    let _ = writeln!(out, "\n{covered}/{} cells covered", report.cells.len());
    print!("{out}");

    if strict && !report.fully_covered() {
        Err(EXIT_UNCOVERED)
    } else {
        Ok(())
    }
}

fn cmd_catalog(action: &CatalogAction) -> Result<(), u8> {
    match action {
        CatalogAction::List {
            catalogs,
            no_default_catalog,
        } => {
            let merged = load_merged_catalog(catalogs, *no_default_catalog)?;
            for template in &merged.templates {
                println!(
                    "{}\t{}\t{}\t{}",
                    template.id,
                    template.applies_to.token(),
                    template.threat_type.code(),
                    template.text
                );
            }
            Ok(())
        }
        CatalogAction::Validate { catalog_file } => {
            let document = read_file(catalog_file)?;
            match load_catalog(&document) {
                Ok(_) => Ok(()),
                Err(e) => {
                    eprintln!("{}: {e}", catalog_file.display());
                    Err(EXIT_INVALID)
                }
            }
        }
    }
}

fn cmd_stats(path: &Path, catalogs: &[PathBuf], no_default: bool) -> Result<(), u8> {
    let system = load_system(path)?;
    let catalog = load_merged_catalog(catalogs, no_default)?;
    let model = enumerate(&system, &catalog);
    let value = stats_json(&stats(&model));
    println!("{}", serde_json::to_string_pretty(&value).expect("infallible"));
    Ok(())
}

fn main() -> ExitCode {
    // styling hook; all current output is already plain text
    let _no_color = std::env::var_os("THREATFORGE_NO_COLOR").is_some();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };

    let result = match &cli.command {
        Command::Validate { system_file } => cmd_validate(system_file),
        Command::Enumerate {
            system_file,
            catalogs,
            format,
            no_default_catalog,
        } => cmd_enumerate(system_file, catalogs, *format, *no_default_catalog),
        Command::Coverage {
            system_file,
            catalogs,
            no_default_catalog,
            strict,
        } => cmd_coverage(system_file, catalogs, *no_default_catalog, *strict),
        Command::Catalog { action } => cmd_catalog(action),
        Command::Stats {
            system_file,
            catalogs,
            no_default_catalog,
        } => cmd_stats(system_file, catalogs, *no_default_catalog),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
