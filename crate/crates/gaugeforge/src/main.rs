use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaugeforge::commands::{self, Context, EmbedArgs, OdeAction, OdeArgs};
use gaugeforge::config::RunConfig;
use gaugeforge::error::{CliError, EXIT_USAGE};
use gaugeforge::report::{Format, Report};
use gaugeforge::suite;

#[derive(Parser, Debug)]
#[command(name = "gaugeforge", version, about = "Check asymptotic gauges, their morphisms and the algebras built on them")]
struct Cli {
    /// TOML run configuration (schedule, precision, gauge registry, mollifier).
    #[arg(long, global = true, help_heading = "Global options")]
    config: Option<PathBuf>,
    /// Sampling schedule as eps0,ratio,count.
    #[arg(long, global = true, help_heading = "Global options")]
    schedule: Option<String>,
    /// Working precision in decimal digits (falls back to GAUGEFORGE_PRECISION).
    #[arg(long, global = true, help_heading = "Global options")]
    precision: Option<u32>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, help_heading = "Global options")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json, help_heading = "Global options")]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify the gauge axioms for a registered or built-in gauge.
    CheckGauge {
        #[arg(long)]
        gauge: String,
    },
    /// Check an index morphism, and optionally a gauge morphism between two gauges.
    Morphism {
        /// Expression in eps (or n), or one of lambda, eta, identity.
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "Is")]
        from: String,
        #[arg(long, default_value = "Is")]
        to: String,
        /// Source gauge of a gauge morphism; needs --target-gauge.
        #[arg(long, requires = "target_gauge")]
        source_gauge: Option<String>,
        /// Target gauge of a gauge morphism.
        #[arg(long, requires = "source_gauge")]
        target_gauge: Option<String>,
    },
    /// Decide whether two gauges have the same moderate nets.
    Equiv {
        #[arg(long)]
        b1: String,
        #[arg(long)]
        b2: String,
    },
    /// Build a gauge strictly between AG(b1) and AG(b2).
    Interleave {
        #[arg(long)]
        b1: String,
        #[arg(long)]
        b2: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Embed a distribution with a mollifier and check the embedding diagrams.
    Embed {
        /// delta, heaviside, delta' or smooth(<expr in x>).
        #[arg(long)]
        dist: String,
        #[arg(long, default_value = "1/eps")]
        generator: String,
        /// Mollifier family, e.g. hermite(3).
        #[arg(long)]
        mollifier: Option<String>,
        /// Compact set lo,hi.
        #[arg(long)]
        k: Option<String>,
        #[arg(long, default_value_t = 1)]
        max_order: usize,
    },
    /// Generalized ODEs x' = F(eps, x, t).
    Ode {
        #[arg(value_enum)]
        action: OdeActionArg,
        #[command(flatten)]
        args: OdeCli,
    },
    /// Run the acceptance battery.
    Suite,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OdeActionArg {
    Solve,
    Transform,
    Transfer,
    Classify,
}

#[derive(Args, Debug)]
struct OdeCli {
    /// Problem file with rhs, t0, x0 and interval.
    #[arg(long)]
    problem: PathBuf,
    /// lambda, eta, identity or an expression in eps.
    #[arg(long)]
    morphism: Option<String>,
    /// Source gauge for the morphism; needs --target-gauge.
    #[arg(long, requires = "target_gauge")]
    source_gauge: Option<String>,
    /// Target gauge for the morphism.
    #[arg(long, requires = "source_gauge")]
    target_gauge: Option<String>,
    /// Gauge used by classify.
    #[arg(long, default_value = "B_pol")]
    gauge: String,
    /// Compact time set lo,hi.
    #[arg(long, default_value = "0,1")]
    k: String,
    /// closed or rk4 (default: closed form for linear problems).
    #[arg(long)]
    method: Option<String>,
    /// Write the transformed problem file here.
    #[arg(long)]
    emit: Option<PathBuf>,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Command::Suite = cli.command {
        return Ok(suite::run(config.digits(cli.precision)?));
    }
    let sched = config.schedule(cli.schedule.as_deref(), cli.precision)?;
    let explicit = cli.schedule.is_some() || config.schedule.is_some();
    let ctx = Context::new(config, sched, explicit);
    match &cli.command {
        Command::CheckGauge { gauge } => commands::check_gauge(&ctx, gauge),
        Command::Morphism { map, from, to, source_gauge, target_gauge } => {
            let gauges = source_gauge.as_deref().zip(target_gauge.as_deref());
            commands::morphism(&ctx, map, from, to, gauges)
        }
        Command::Equiv { b1, b2 } => commands::equiv(&ctx, b1, b2),
        Command::Interleave { b1, b2, depth } => commands::interleave_cmd(&ctx, b1, b2, *depth),
        Command::Embed { dist, generator, mollifier, k, max_order } => commands::embed_cmd(
            &ctx,
            &EmbedArgs { dist, generator, mollifier: mollifier.as_deref(), k: k.as_deref(), max_order: *max_order },
        ),
        Command::Ode { action, args } => {
            let action = match action {
                OdeActionArg::Solve => OdeAction::Solve,
                OdeActionArg::Transform => OdeAction::Transform,
                OdeActionArg::Transfer => OdeAction::Transfer,
                OdeActionArg::Classify => OdeAction::Classify,
            };
            let a = OdeArgs {
                problem: &args.problem,
                morphism: args.morphism.as_deref(),
                gauges: args.source_gauge.as_deref().zip(args.target_gauge.as_deref()),
                gauge: &args.gauge,
                k: &args.k,
                method: args.method.as_deref(),
                emit: args.emit.as_deref(),
            };
            commands::ode_cmd(&ctx, action, &a)
        }
        Command::Suite => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("gaugeforge: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    let text = report.render(format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("gaugeforge: {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
