use std::path::PathBuf;
use std::process::ExitCode;

use ballharm::commands::{self, CommandError, CommandOutput};
use ballharm::{ConfigError, Overrides, RunConfig};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// Numerical verification of sharp gradient estimates for invariant
/// harmonic functions on the complex unit ball.
#[derive(Parser)]
#[command(name = "ballharm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the sharp constant with the extremal-field estimate at each radius.
    VerifyConstant(Flags),
    /// Tabulate C(z, l) over sampled directions and locate the maximiser.
    Profile(Flags),
    /// Tabulate the Schwarz-type envelope M_c(r) by two methods.
    Burgeth(Flags),
    /// Run every invariant suite and write a JSON report.
    Audit(Flags),
    /// Write a quadrature rule in the ball-quad v1 text format.
    Rule(Flags),
}

/// Values are kept as text and parsed by the configuration layer so that
/// file and flag settings are validated the same way.
#[derive(Args)]
struct Flags {
    #[arg(long, value_name = "N")]
    dim: Option<String>,
    #[arg(long, value_name = "L")]
    level: Option<String>,
    #[arg(long, value_name = "N")]
    mc: Option<String>,
    #[arg(long, value_name = "S")]
    seed: Option<String>,
    #[arg(long, alias = "radius", value_name = "r1,r2,...", allow_hyphen_values = true)]
    radii: Option<String>,
    #[arg(long, value_name = "C")]
    c: Option<String>,
    #[arg(long, value_name = "re1,im1,...", allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, value_name = "K")]
    grid: Option<String>,
    #[arg(long, value_name = "T")]
    tol_smooth: Option<String>,
    #[arg(long, value_name = "T")]
    tol_nonsmooth: Option<String>,
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
                Some(Overrides::parse_file(&text)?)
            }
            None => None,
        };
        let mut o = Overrides::default();
        let pairs = [
            ("dim", &self.dim),
            ("level", &self.level),
            ("mc", &self.mc),
            ("seed", &self.seed),
            ("radii", &self.radii),
            ("c", &self.c),
            ("z", &self.z),
            ("grid", &self.grid),
            ("tol-smooth", &self.tol_smooth),
            ("tol-nonsmooth", &self.tol_nonsmooth),
            ("format", &self.format),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                o.set(k, v)?;
            }
        }
        o.out = self.out.clone();
        RunConfig::resolve(file.as_ref(), &o)
    }
}

fn emit(cfg: &RunConfig, out: &CommandOutput) -> Result<(), ConfigError> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &out.body).map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))?;
            out.summary.iter().for_each(|l| println!("{l}"));
        }
        None => {
            print!("{}", out.body);
            out.summary.iter().for_each(|l| eprintln!("{l}"));
        }
    }
    Ok(())
}

type Handler = fn(&RunConfig) -> Result<CommandOutput, CommandError>;

fn run(cli: Cli) -> i32 {
    let (flags, f): (&Flags, Handler) = match &cli.command {
        Command::VerifyConstant(a) => (a, commands::verify_constant),
        Command::Profile(a) => (a, commands::profile),
        Command::Burgeth(a) => (a, commands::burgeth),
        Command::Audit(a) => (a, commands::audit),
        Command::Rule(a) => (a, commands::rule),
    };
    let cfg = match flags.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match f(&cfg) {
        Ok(out) => match emit(&cfg, &out) {
            Ok(()) => out.exit_code(),
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = std::panic::catch_unwind(|| run(cli)).unwrap_or_else(|_| {
        eprintln!("error: internal failure");
        1
    });
    ExitCode::from(code as u8)
}
