use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trade_influence::cli::{self, CliError, OutputFormat, RunConfig};
use trade_influence::engine::{Method, DEFAULT_DAMPING, DEFAULT_LAMBDA, DEFAULT_MICMAC_POWER};
use trade_influence::regions::parse_region;
use trade_influence::{Criterion, DatasetManifest, WeightKind};

#[derive(Parser)]
#[command(name = "trade-influence", version, about = "Direct and indirect influences in trade networks")]
struct Opts {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the direct matrix and the indirect matrix of the chosen method.
    Matrix(RunArgs),
    /// Rank countries by dependence, influence or connectedness.
    Rank {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "influence")]
        criterion: Criterion,
    },
    /// Dependence-influence plane with sector assignments.
    Plane(RunArgs),
    /// Distance between two ranking files and per-country rank changes.
    Compare { ranking_a: PathBuf, ranking_b: PathBuf },
    /// Influence graph in DOT format.
    ExportDot {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.0)]
        min_weight: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Countries CSV: code,name,gdp,total_exports,total_imports
    #[arg(long)]
    countries: PathBuf,
    /// Flows CSV: reporter,partner,exports,imports
    #[arg(long)]
    flows: PathBuf,
    /// Comma-separated country codes, or `americas`.
    #[arg(long)]
    region: Option<String>,
    #[arg(long, default_value = "")]
    year: String,
    #[arg(long, default_value = "trade")]
    weight: WeightKind,
    /// pwp, micmac, pagerank, heatkernel, or `direct` for no operator.
    #[arg(long, default_value = "pwp")]
    method: String,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[arg(long, default_value_t = DEFAULT_MICMAC_POWER)]
    k: u32,
    #[arg(long, default_value_t = DEFAULT_DAMPING)]
    p: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let method = if self.method.eq_ignore_ascii_case("direct") {
            None
        } else {
            let name: Method = self.method.parse().map_err(|message| CliError {
                stage: cli::Stage::Usage,
                message,
            })?;
            Some(cli::method_from_flags(name, self.lambda, self.k, self.p)?)
        };
        Ok(RunConfig {
            manifest: DatasetManifest {
                countries_path: self.countries,
                flows_path: self.flows,
                year_label: self.year,
                region_filter: self.region.as_deref().map(parse_region),
            },
            weight: self.weight,
            method,
            output_dir: self.out,
            output_format: self.format,
        })
    }
}

fn run(opts: Opts) -> Result<(), CliError> {
    match opts.command {
        Command::Matrix(args) => {
            for path in cli::cmd_matrix(&args.into_config()?)? {
                println!("{}", path.display());
            }
        }
        Command::Rank { run, criterion } => {
            println!("{}", cli::cmd_rank(&run.into_config()?, criterion)?.display());
        }
        Command::Plane(args) => {
            println!("{}", cli::cmd_plane(&args.into_config()?)?.display());
        }
        Command::Compare {
            ranking_a,
            ranking_b,
        } => {
            print!("{}", cli::cmd_compare(&ranking_a, &ranking_b)?);
        }
        Command::ExportDot { run, min_weight } => {
            println!(
                "{}",
                cli::cmd_export_dot(&run.into_config()?, min_weight)?.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Opts::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("trade-influence: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
