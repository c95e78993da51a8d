use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mv_entropy::{LogBase, SolveMode};
use mv_entropy_cli::{
    cmd_compare, cmd_dynamics, cmd_entropy, cmd_refine, CliError, LoadedConfig, Numeric, OutputFormat, RunOptions,
};

#[derive(Parser)]
#[command(
    name = "mv-entropy",
    version,
    about = "Entropy of MV-algebra dynamical systems on finite spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy of one partition.
    Entropy {
        config: PathBuf,
        partition: String,
        #[command(flatten)]
        common: Common,
    },
    /// Minimum-entropy common refinement of several partitions.
    Refine {
        config: PathBuf,
        #[arg(required = true)]
        partitions: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// H_1..H_N, running infimum and product-join sequence of a partition.
    Dynamics {
        config: PathBuf,
        partition: String,
        #[command(flatten)]
        common: Common,
    },
    /// Checks a relabeling between two systems and compares H_n on both.
    Compare {
        first: PathBuf,
        second: PathBuf,
        /// Partition of the first system, carried to the second.
        partition: String,
        /// Image of each point of the first space, e.g. `2,0,3,1`.
        #[arg(long, value_delimiter = ',', required = true)]
        bijection: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Heuristic,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum NumericArg {
    Rational,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    JsonLines,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    log_base: Option<BaseArg>,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    #[arg(long, value_enum)]
    numeric: Option<NumericArg>,
    /// Comparison tolerance in float mode.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    output: FormatArg,
    /// Largest number of tensor cells per point.
    #[arg(long)]
    max_cells: Option<usize>,
    /// Largest number of vertex combinations evaluated in exact mode.
    #[arg(long)]
    max_combos: Option<u128>,
    /// Add wall-clock timing to the record (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            log_base: self.log_base.map(|b| match b {
                BaseArg::E => LogBase::Natural,
                BaseArg::Two => LogBase::Two,
            }),
            numeric: self.numeric.map(|n| match n {
                NumericArg::Rational => Numeric::Rational,
                NumericArg::Float => Numeric::Float,
            }),
            tolerance: self.tolerance,
            mode: match self.mode {
                ModeArg::Exact => SolveMode::Exact,
                ModeArg::Heuristic => SolveMode::Heuristic,
                ModeArg::Auto => SolveMode::Auto,
            },
            seed: self.seed,
            n_max: self.n_max,
            max_cells: self.max_cells,
            max_combos: self.max_combos,
            timing: self.timing,
        }
    }

    fn format(&self) -> OutputFormat {
        match self.output {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::JsonLines => OutputFormat::JsonLines,
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Entropy {
            config,
            partition,
            common,
        } => {
            let cfg = LoadedConfig::from_path(&config)?;
            Ok(cmd_entropy(&cfg, &partition, &common.options())?.render(common.format()))
        }
        Command::Refine {
            config,
            partitions,
            common,
        } => {
            let cfg = LoadedConfig::from_path(&config)?;
            Ok(cmd_refine(&cfg, &partitions, &common.options())?.render(common.format()))
        }
        Command::Dynamics {
            config,
            partition,
            common,
        } => {
            let cfg = LoadedConfig::from_path(&config)?;
            Ok(cmd_dynamics(&cfg, &partition, &common.options())?.render(common.format()))
        }
        Command::Compare {
            first,
            second,
            partition,
            bijection,
            common,
        } => {
            let a = LoadedConfig::from_path(&first)?;
            let b = LoadedConfig::from_path(&second)?;
            Ok(cmd_compare(&a, &b, &bijection, &partition, &common.options())?.render(common.format()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
