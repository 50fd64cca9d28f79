use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use repeff::barlow::DEFAULT_LAMBDA;
use repeff::commands::{
    cmd_analyze, cmd_loss, cmd_train, cmd_validate, AnalyzeArgs, ExitStatus, Outcome, ValidateOverrides,
};
use repeff::fim::DEFAULT_EPSILON;
use repeff::io::EmbeddingFormat;
use repeff::lab::Theorem2Config;
use repeff::Error;

#[derive(Parser)]
#[command(name = "repeff", version, about = "Representation-efficiency diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Covariance spectrum, FIM spectrum and efficiency of an embedding file.
    Analyze(AnalyzeCli),
    /// Train the toy linear encoder and report the final evaluation.
    Train(TrainCli),
    /// Run validators and exit 0 iff all pass.
    Validate(ValidateCli),
    /// Cross-correlation and Barlow Twins loss between two view files.
    Loss(LossCli),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    #[value(name = "bin-f64")]
    BinF64,
}

impl From<FormatArg> for EmbeddingFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => EmbeddingFormat::Csv,
            FormatArg::BinF64 => EmbeddingFormat::BinF64,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClaimArg {
    Lemma1,
    Lemma3,
    Lemma4,
    Theorem1,
    Theorem2,
    Prop1,
    All,
}

impl ClaimArg {
    fn selector(self) -> &'static str {
        match self {
            ClaimArg::Lemma1 => "lemma1",
            ClaimArg::Lemma3 => "lemma3",
            ClaimArg::Lemma4 => "lemma4",
            ClaimArg::Theorem1 => "theorem1",
            ClaimArg::Theorem2 => "theorem2",
            ClaimArg::Prop1 => "prop1",
            ClaimArg::All => "all",
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeCli {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_sq: f64,
    #[arg(long, default_value_t = 1.0)]
    lipschitz: f64,
    /// Also report the population cross-correlation under this noise variance.
    #[arg(long)]
    noise_var: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TrainCli {
    #[arg(long)]
    d_in: Option<usize>,
    #[arg(long)]
    d_out: Option<usize>,
    /// Data covariance scale.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    noise_var: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    batch_n: Option<usize>,
    #[arg(long)]
    eval_n: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    sigma_sq: Option<f64>,
    #[arg(long)]
    lipschitz: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the per-step trace as CSV.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

impl TrainCli {
    fn config(&self) -> Theorem2Config {
        let mut c = Theorem2Config::default();
        c.d_in = self.d_in.unwrap_or(c.d_in);
        c.d_out = self.d_out.unwrap_or(c.d_out);
        c.data_scale = self.gamma.unwrap_or(c.data_scale);
        c.noise_var = self.noise_var.unwrap_or(c.noise_var);
        c.eval_n = self.eval_n.unwrap_or(c.eval_n);
        c.epsilon = self.epsilon.unwrap_or(c.epsilon);
        let t = &mut c.train;
        t.lambda = self.lambda.unwrap_or(t.lambda);
        t.lr = self.lr.unwrap_or(t.lr);
        t.steps = self.steps.unwrap_or(t.steps);
        t.batch_n = self.batch_n.unwrap_or(t.batch_n);
        t.report_epsilon = c.epsilon;
        t.sigma_sq = self.sigma_sq.unwrap_or(t.sigma_sq);
        t.lipschitz = self.lipschitz.unwrap_or(t.lipschitz);
        t.seed = self.seed.unwrap_or(t.seed);
        c
    }
}

#[derive(Args)]
struct ValidateCli {
    #[arg(value_enum)]
    claim: ClaimArg,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count (lemma1, lemma3) and theorem2 evaluation batch size.
    #[arg(long)]
    samples: Option<usize>,
    /// Dimension for lemma1, lemma4 and theorem1.
    #[arg(long)]
    dim: Option<usize>,
    /// Equal covariance eigenvalue for lemma4 and theorem1, data scale for theorem2.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    noise_var: Option<f64>,
    #[arg(long)]
    sigma_sq: Option<f64>,
    #[arg(long)]
    lipschitz: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    batch_n: Option<usize>,
    #[arg(long)]
    d_in: Option<usize>,
    #[arg(long)]
    d_out: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

impl ValidateCli {
    fn overrides(&self) -> ValidateOverrides {
        ValidateOverrides {
            seed: self.seed,
            samples: self.samples,
            dim: self.dim,
            gamma: self.gamma,
            noise_var: self.noise_var,
            sigma_sq: self.sigma_sq,
            lipschitz: self.lipschitz,
            epsilon: self.epsilon,
            lambda: self.lambda,
            lr: self.lr,
            steps: self.steps,
            batch_n: self.batch_n,
            d_in: self.d_in,
            d_out: self.d_out,
        }
    }
}

#[derive(Args)]
struct LossCli {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    input_b: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    #[command(flatten)]
    output: OutputArgs,
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(Error::from)
}

fn emit(outcome: Outcome, out: Option<&Path>, trace_out: Option<&Path>) -> Result<ExitStatus, Error> {
    if let (Some(path), Some(csv)) = (trace_out, outcome.trace_csv.as_deref()) {
        write_file(path, csv)?;
    }
    let text = outcome.report.to_text();
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    print!("{text}");
    if let Some(err) = &outcome.report.error {
        eprintln!("error: {err}");
    }
    Ok(outcome.status)
}

fn run(cli: Cli) -> Result<ExitStatus, Error> {
    match cli.command {
        Command::Analyze(a) => {
            let args = AnalyzeArgs {
                input: a.input,
                format: a.format.into(),
                epsilon: a.epsilon,
                sigma_sq: a.sigma_sq,
                lipschitz: a.lipschitz,
                noise_var: a.noise_var,
                lambda: a.lambda,
            };
            emit(cmd_analyze(&args)?, a.output.out.as_deref(), None)
        }
        Command::Train(t) => emit(
            cmd_train(&t.config())?,
            t.output.out.as_deref(),
            t.trace_out.as_deref(),
        ),
        Command::Validate(v) => emit(
            cmd_validate(v.claim.selector(), &v.overrides())?,
            v.output.out.as_deref(),
            None,
        ),
        Command::Loss(l) => emit(
            cmd_loss(&l.input, &l.input_b, l.format.into(), l.lambda)?,
            l.output.out.as_deref(),
            None,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = run(cli).unwrap_or_else(|err| {
        eprintln!("error: {err}");
        ExitStatus::for_error(&err)
    });
    ExitCode::from(status.code() as u8)
}
