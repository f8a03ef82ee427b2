use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use solp::engine::Limits;
use solp::pexpr::Bounds;
use solp_cli::commands::{self, PexprOptions, SolveOptions};

/// Service-oriented logic programming: discovery and binding by resolution.
///
/// Exit status: 0 on success or a positive verdict, 1 on a negative verdict
/// or when no answer is found, 2 on input errors.
#[derive(Parser)]
#[command(name = "solp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Asynchronous relational networks.
    #[command(subcommand)]
    Arn(ArnCommand),
    /// Linear temporal logic over actions.
    #[command(subcommand)]
    Ltl(LtlCommand),
    /// Resolve a query against a repository and print the derivation.
    Solve {
        query: PathBuf,
        repository: PathBuf,
        /// Replay the steps of a derivation script instead of searching.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
        #[arg(long, default_value_t = 16)]
        max_answers: usize,
        /// Also write a JSON trace to this path.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        pexpr: PexprArgs,
    },
    /// Program expressions.
    #[command(subcommand)]
    Pexpr(PexprCommand),
}

#[derive(Subcommand)]
enum ArnCommand {
    /// Print the well-formedness violations of a network.
    Validate { network: PathBuf },
    /// Check a formula at a point of a ground network.
    Check { network: PathBuf, point: String, formula: String },
}

#[derive(Subcommand)]
enum LtlCommand {
    /// Satisfiability, with a witness lasso.
    Sat { formula: String },
    /// Whether the first formula entails the second, with a counterexample.
    Entails { premise: String, conclusion: String },
}

#[derive(Subcommand)]
enum PexprCommand {
    /// Replay a derivation script and check the resulting program.
    Derive {
        script: PathBuf,
        #[command(flatten)]
        pexpr: PexprArgs,
    },
    /// Check a ground program against a spec `(pre, post)` or `(position, pre, post)`.
    Check {
        program: PathBuf,
        spec: String,
        #[command(flatten)]
        pexpr: PexprArgs,
    },
}

#[derive(Args)]
struct PexprArgs {
    /// Initial-state ranges, e.g. `0..8` or `0..8,y=1..8`.
    #[arg(long, default_value = "0..8")]
    bounds: Bounds,
    /// Loop iterations allowed per run.
    #[arg(long, default_value_t = 10_000)]
    fuel: u64,
}

impl PexprArgs {
    fn options(self) -> PexprOptions {
        PexprOptions { bounds: self.bounds, fuel: self.fuel }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cli.command {
        Command::Arn(ArnCommand::Validate { network }) => commands::arn_validate(out, &network),
        Command::Arn(ArnCommand::Check { network, point, formula }) => commands::arn_check(out, &network, &point, &formula),
        Command::Ltl(LtlCommand::Sat { formula }) => commands::ltl_sat(out, &formula),
        Command::Ltl(LtlCommand::Entails { premise, conclusion }) => commands::ltl_entails(out, &premise, &conclusion),
        Command::Solve { query, repository, script, max_depth, max_answers, output, pexpr } => {
            let opts = SolveOptions {
                script: script.as_deref(),
                limits: Limits { max_depth, max_answers },
                output: output.as_deref(),
                pexpr: pexpr.options(),
            };
            commands::solve_cmd(out, &query, &repository, &opts)
        }
        Command::Pexpr(PexprCommand::Derive { script, pexpr }) => commands::pexpr_derive(out, &script, &pexpr.options()),
        Command::Pexpr(PexprCommand::Check { program, spec, pexpr }) => commands::pexpr_check(out, &program, &spec, &pexpr.options()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
