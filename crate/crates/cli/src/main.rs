use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gzavg_cli::commands::{self, Context, ScanRanges};
use gzavg_cli::config::parse_range;
use gzavg_cli::output::write_records;
use gzavg_cli::{CliError, OutputFormat, RunConfig};
use gzavg_core::brandt::BrandtConfig;
use gzavg_core::repnum::Orientation;

#[derive(Parser)]
#[command(name = "gzavg", version, about = "Exact averages of central L-values over class-group characters")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    format: OutputFormat,
    /// Worker threads for scans.
    #[arg(long, default_value_t = 1, global = true)]
    jobs: usize,
    /// Cache directory (overrides GZAVG_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Which form counts ideals in a class A.
    #[arg(long, value_enum, default_value_t = OrientationArg::Standard, global = true)]
    orientation: OrientationArg,
    /// Node budget for each lattice enumeration.
    #[arg(long, default_value_t = BrandtConfig::default().max_nodes, global = true)]
    max_nodes: u64,
    /// Cap on the number of quaternion ideal classes.
    #[arg(long, default_value_t = BrandtConfig::default().max_classes, global = true)]
    max_classes: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    /// Count class A by the form of A⁻¹.
    Standard,
    /// Count class A by the form of A.
    Inverse,
}

#[derive(Subcommand)]
enum Command {
    /// Class group of Q(sqrt(-D)).
    Classgroup { d: u64 },
    /// Exact average at (D, N, k, character index, m).
    Average { d: u64, n: u64, k: u32, psi: usize, m: u64 },
    /// Compare <c, T_m c> with the class-group expression for m ≤ m_max.
    BrandtVerify { d: u64, n: u64, m_max: u64 },
    /// Grid scans.
    Scan {
        #[command(subcommand)]
        kind: ScanKind,
    },
}

#[derive(Args)]
struct GridArgs {
    /// Discriminant range, e.g. 3..47.
    #[arg(long = "D")]
    d: String,
    /// Level range, e.g. 29..97.
    #[arg(long = "N")]
    n: Option<String>,
    /// Upper end of the level range when --N is absent.
    #[arg(long = "N-max")]
    n_max: Option<u64>,
}

impl GridArgs {
    fn ranges(&self, m: &str) -> Result<ScanRanges, CliError> {
        let n = match (&self.n, self.n_max) {
            (Some(r), _) => parse_range(r)?,
            (None, Some(max)) => 3..=max,
            (None, None) => return Err(CliError::Input("one of --N or --N-max is required".into())),
        };
        let m = parse_range(m)?;
        if *m.start() == 0 {
            return Err(CliError::Input("m must be positive".into()));
        }
        Ok(ScanRanges { d: parse_range(&self.d)?, n, m })
    }
}

#[derive(Subcommand)]
enum ScanKind {
    /// Φ-term table: zero when N > mD.
    Stability {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "1..5")]
        m: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Positivity certificates for every character.
    Nonvanishing {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// p-adic non-vanishing certificates.
    Modp {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Levels passing the Eisenstein filter, with certificates at k = 1.
    Theorem6 {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        p: u64,
    },
    /// Floating comparison with the convexity bound.
    Subconvexity {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    let g = cli.global;
    let mut config = RunConfig {
        brandt: BrandtConfig { max_classes: g.max_classes, max_nodes: g.max_nodes },
        orientation: match g.orientation {
            OrientationArg::Standard => Orientation::Standard,
            OrientationArg::Inverse => Orientation::Inverse,
        },
        output_format: g.format,
        jobs: g.jobs,
        ..RunConfig::default()
    };
    if let Some(dir) = g.cache_dir {
        config.cache_dir = Some(dir);
    }
    config.validate()?;
    let ctx = Context::new(config);
    match cli.command {
        Command::Classgroup { d } => commands::classgroup(&ctx, d),
        Command::Average { d, n, k, psi, m } => commands::average(&ctx, d, n, k, psi, m),
        Command::BrandtVerify { d, n, m_max } => commands::brandt_verify(&ctx, d, n, m_max),
        Command::Scan { kind } => match kind {
            ScanKind::Stability { grid, m, k } => commands::scan_stability(&ctx, &grid.ranges(&m)?, k),
            ScanKind::Nonvanishing { grid, k } => commands::scan_nonvanishing(&ctx, &grid.ranges("1")?, k),
            ScanKind::Modp { grid, p, k } => commands::scan_modp(&ctx, &grid.ranges("1")?, k, p),
            ScanKind::Theorem6 { grid, p } => commands::scan_theorem6(&ctx, &grid.ranges("1")?, p),
            ScanKind::Subconvexity { grid, k, delta } => commands::scan_subconvexity(&ctx, &grid.ranges("1")?, k, delta),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.global.format;
    match run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = write_records(&mut stdout, &outcome.records, format) {
                let _ = writeln!(std::io::stderr(), "error: {e}");
                return ExitCode::from(1);
            }
            if outcome.mismatches > 0 {
                let _ = writeln!(std::io::stderr(), "error: {} identity mismatches", outcome.mismatches);
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
