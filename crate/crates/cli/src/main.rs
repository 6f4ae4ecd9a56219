//! Command-line surface: build and inspect codes, train decoder weights,
//! evaluate decoders over a simulated BPSK/AWGN channel, and run paired
//! comparisons.
//!
//! Every run echoes its resolved configuration (defaults included) before
//! doing any work, so a report can always be reproduced from its log.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 I/O error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use permbp::channel::{emit_report, monte_carlo, ReportFormat, SimReport, StopRule};
use permbp::code::{CodeSpec, StackedCheckMatrix};
use permbp::decoder::{ClassicDecoder, CycListDecoder, FrameDecoder, MlDecoder, StackedDecoder};
use permbp::learn::{
    load_weights, save_weights, train, LossMode, Optimizer, TrainConfig, TrainingMeta, WeightFile,
};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "permbp",
    version,
    about = "Belief-propagation decoding on permutation-stacked parity-check matrices"
)]
struct Cli {
    /// Worker threads for simulation and training (0 = machine parallelism)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a code and print its parameters
    Code(CodeCmd),
    /// Train decoder weights and write a weight file
    Train(TrainCmd),
    /// Evaluate one decoder over an AWGN channel and write a report
    Eval(EvalCmd),
    /// Paired-seed comparison of two or more decoders
    Compare(CompareCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Bch,
    Prm,
}

#[derive(Args)]
struct CodeParams {
    /// Code family
    #[arg(long, value_enum)]
    family: Family,
    /// Field degree m (code length 2^m - 1, extended 2^m)
    #[arg(long)]
    m: usize,
    /// Designed-distance parameter (bch only)
    #[arg(long)]
    delta: Option<usize>,
    /// Order r (prm only)
    #[arg(long)]
    order: Option<usize>,
    /// Extend with the overall parity bit
    #[arg(long)]
    extended: bool,
}

impl CodeParams {
    fn build(&self) -> Result<CodeSpec, CliError> {
        let spec = match (self.family, self.delta, self.order) {
            (Family::Bch, Some(d), None) => CodeSpec::bch(self.m, d)?,
            (Family::Prm, None, Some(r)) => CodeSpec::punctured_rm(self.m, r)?,
            (Family::Bch, _, _) => {
                return Err(CliError::Usage(
                    "bch takes --delta (and not --order)".into(),
                ))
            }
            (Family::Prm, _, _) => {
                return Err(CliError::Usage(
                    "prm takes --order (and not --delta)".into(),
                ))
            }
        };
        Ok(if self.extended {
            spec.to_extended()
        } else {
            spec
        })
    }

    fn echo(&self) -> String {
        let param = match self.family {
            Family::Bch => format!("delta={}", self.delta.unwrap_or_default()),
            Family::Prm => format!("order={}", self.order.unwrap_or_default()),
        };
        format!(
            "family={} m={} {param} extended={}",
            match self.family {
                Family::Bch => "bch",
                Family::Prm => "prm",
            },
            self.m,
            self.extended
        )
    }
}

#[derive(Args)]
struct CodeCmd {
    #[command(flatten)]
    code: CodeParams,
    /// Number of permutation blocks for --dump-h
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Write the stacked parity-check blocks as 0/1 text (extended codes)
    #[arg(long, value_name = "PATH")]
    dump_h: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LossModeArg {
    Final,
    Multi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OptimizerArg {
    Adam,
    Sgd,
}

#[derive(Args)]
struct TrainCmd {
    #[command(flatten)]
    code: CodeParams,
    /// Number of permutation blocks in the decoding graph
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Half-iteration count (the decoder runs 2t iterations)
    #[arg(long, default_value_t = 5)]
    t: usize,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    #[arg(long, default_value_t = 128)]
    batch: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    /// Training Eb/N0 range in dB, LO:HI, sampled uniformly per frame
    #[arg(long, default_value = "1:6")]
    snr: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = LossModeArg::Final)]
    loss_mode: LossModeArg,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    optimizer: OptimizerArg,
    /// Print the loss every N steps (0 = silent)
    #[arg(long, default_value_t = 100)]
    log_every: usize,
    /// Output weight file (JSON)
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderKind {
    Stacked,
    Cyclist,
    Classic,
    Ml,
}

impl DecoderKind {
    fn as_str(&self) -> &'static str {
        match self {
            DecoderKind::Stacked => "stacked",
            DecoderKind::Cyclist => "cyclist",
            DecoderKind::Classic => "classic",
            DecoderKind::Ml => "ml",
        }
    }
}

#[derive(Args)]
struct EvalCmd {
    /// Weight file written by `train`
    #[arg(long, value_name = "PATH")]
    weights: PathBuf,
    #[arg(long, value_enum)]
    decoder: DecoderKind,
    /// List size for the cyclist decoder
    #[arg(long, default_value_t = 4)]
    list_size: usize,
    /// Comma-separated Eb/N0 points in dB, e.g. 2,4,6
    #[arg(long)]
    snr: String,
    /// Stop a point after this many frame errors
    #[arg(long, default_value_t = 100)]
    stop_errors: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output report; format chosen by extension (.csv or .json)
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareCmd {
    #[arg(long, value_name = "PATH")]
    weights: PathBuf,
    /// Comma-separated decoder list; the first is the baseline
    #[arg(long)]
    decoders: String,
    #[arg(long, default_value_t = 4)]
    list_size: usize,
    #[arg(long)]
    snr: String,
    #[arg(long, default_value_t = 100)]
    stop_errors: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for per-decoder reports and the delta table
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

enum CliError {
    Usage(String),
    Lib(permbp::Error),
}

impl From<permbp::Error> for CliError {
    fn from(e: permbp::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn report(&self) -> (u8, String) {
        match self {
            CliError::Usage(msg) => (2, format!("usage error: {msg}")),
            CliError::Lib(e) => {
                let code = match e {
                    permbp::Error::NonFinite(_) | permbp::Error::Diverged { .. } => 3,
                    permbp::Error::Io(_) | permbp::Error::Malformed(_) => 4,
                    _ => 2,
                };
                (code, format!("error: {e}"))
            }
        }
    }
}

fn parse_snr_range(s: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("--snr expects LO:HI, got `{s}`")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad snr bound `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad snr bound `{}`", parts[1])))?;
    Ok((lo, hi))
}

fn parse_snr_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad snr value `{p}`")))
        })
        .collect()
}

fn report_format(path: &Path) -> Result<ReportFormat, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(ReportFormat::Csv),
        Some("json") => Ok(ReportFormat::Json),
        _ => Err(CliError::Usage(format!(
            "output path `{}` must end in .csv or .json",
            path.display()
        ))),
    }
}

fn build_decoder(
    kind: DecoderKind,
    file: &WeightFile,
    list_size: usize,
    name: Option<String>,
) -> Result<Box<dyn FrameDecoder>, CliError> {
    let code = &file.code;
    let rename = |n: &Option<String>, d: &'static str| n.clone().unwrap_or_else(|| d.into());
    Ok(match kind {
        DecoderKind::Stacked => Box::new(
            StackedDecoder::new(code, file.p, file.bank()?)?.with_name(&rename(&name, "stacked")),
        ),
        DecoderKind::Cyclist => Box::new(
            CycListDecoder::new(code, list_size, file.bank()?)?
                .with_name(&rename(&name, "cyclist")),
        ),
        DecoderKind::Classic => Box::new(
            ClassicDecoder::new(code, file.p, file.t)?.with_name(&rename(&name, "classic")),
        ),
        DecoderKind::Ml => Box::new(MlDecoder::new(code)?.with_name(&rename(&name, "ml"))),
    })
}

fn cmd_code(cmd: &CodeCmd) -> Result<(), CliError> {
    println!("config: {} p={}", cmd.code.echo(), cmd.p);
    let spec = cmd.code.build()?;
    println!("n={} k={}", spec.length(), spec.k);
    println!("g={}", spec.generator);
    println!("h={}", spec.check_poly);
    println!("u={}", spec.check_poly.weight());
    if let Some(path) = &cmd.dump_h {
        if !spec.extended {
            return Err(CliError::Usage(
                "--dump-h writes the stacked blocks of the extended code; pass --extended".into(),
            ));
        }
        let stacked = StackedCheckMatrix::build(&spec, cmd.p)?;
        let mut text = String::new();
        for (z, block) in stacked.blocks.iter().enumerate() {
            if z > 0 {
                text.push('\n');
            }
            text.push_str(&block.to_text());
        }
        std::fs::write(path, text).map_err(permbp::Error::from)?;
        println!("wrote {} block(s) to {}", cmd.p, path.display());
    }
    Ok(())
}

fn cmd_train(cmd: &TrainCmd) -> Result<(), CliError> {
    let snr_range = parse_snr_range(&cmd.snr)?;
    println!(
        "config: {} p={} t={} steps={} batch={} lr={} snr={}:{} seed={} loss_mode={} optimizer={} out={}",
        cmd.code.echo(),
        cmd.p,
        cmd.t,
        cmd.steps,
        cmd.batch,
        cmd.lr,
        snr_range.0,
        snr_range.1,
        cmd.seed,
        match cmd.loss_mode {
            LossModeArg::Final => "final",
            LossModeArg::Multi => "multi",
        },
        match cmd.optimizer {
            OptimizerArg::Adam => "adam",
            OptimizerArg::Sgd => "sgd",
        },
        cmd.out.display()
    );
    let config = TrainConfig {
        code: cmd.code.build()?,
        p: cmd.p,
        t: cmd.t,
        batch_size: cmd.batch,
        steps: cmd.steps,
        learning_rate: cmd.lr,
        snr_range_db: snr_range,
        seed: cmd.seed,
        loss_mode: match cmd.loss_mode {
            LossModeArg::Final => LossMode::FinalOnly,
            LossModeArg::Multi => LossMode::Multiloss,
        },
        optimizer: match cmd.optimizer {
            OptimizerArg::Adam => Optimizer::default(),
            OptimizerArg::Sgd => Optimizer::Sgd,
        },
    };
    let outcome = train(&config)?;
    if cmd.log_every > 0 {
        for (step, loss) in outcome.loss_history.iter().enumerate() {
            if step % cmd.log_every == 0 || step + 1 == outcome.loss_history.len() {
                println!("step {step} loss {loss:.6}");
            }
        }
    }
    let file = WeightFile::new(
        &config.code,
        config.p,
        &outcome.bank,
        TrainingMeta {
            seed: config.seed,
            steps: config.steps,
            lr: config.learning_rate,
            snr_range: config.snr_range_db,
        },
    );
    save_weights(&cmd.out, &file)?;
    println!("wrote weights to {}", cmd.out.display());
    Ok(())
}

fn echo_eval(prefix: &str, file: &WeightFile, snrs: &[f64], stop: &StopRule, seed: u64) {
    println!(
        "config: {prefix} code={} p={} t={} u={} snr={:?} stop_errors={} max_frames={} seed={seed}",
        file.code.label(),
        file.p,
        file.t,
        file.u,
        snrs,
        stop.min_frame_errors,
        stop.max_frames
    );
}

fn print_cells(report: &SimReport) {
    for c in &report.cells {
        println!(
            "{} @ {} dB: frames={} fer={:.6e} ber={:.6e} cond={} mean_decode_us={:.2}",
            report.decoder,
            c.snr_db,
            c.frames,
            c.fer,
            c.ber,
            c.cond_fraction
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "-".into()),
            c.mean_decode_us
        );
    }
}

fn cmd_eval(cmd: &EvalCmd) -> Result<(), CliError> {
    let format = report_format(&cmd.out)?;
    let snrs = parse_snr_list(&cmd.snr)?;
    let file = load_weights(&cmd.weights)?;
    let stop = StopRule {
        min_frame_errors: cmd.stop_errors,
        max_frames: cmd.max_frames,
    };
    echo_eval(
        &format!(
            "decoder={} list_size={} weights={}",
            cmd.decoder.as_str(),
            cmd.list_size,
            cmd.weights.display()
        ),
        &file,
        &snrs,
        &stop,
        cmd.seed,
    );
    let decoder = build_decoder(cmd.decoder, &file, cmd.list_size, None)?;
    let report = monte_carlo(decoder.as_ref(), &file.code, &snrs, &stop, cmd.seed);
    print_cells(&report);
    emit_report(&report, format, &cmd.out)?;
    println!("wrote report to {}", cmd.out.display());
    Ok(())
}

fn cmd_compare(cmd: &CompareCmd) -> Result<(), CliError> {
    let snrs = parse_snr_list(&cmd.snr)?;
    let kinds: Vec<DecoderKind> = cmd
        .decoders
        .split(',')
        .map(|name| {
            DecoderKind::from_str(name.trim(), true)
                .map_err(|_| CliError::Usage(format!("unknown decoder `{name}`")))
        })
        .collect::<Result<_, _>>()?;
    if kinds.len() < 2 {
        return Err(CliError::Usage(
            "--decoders needs at least two comma-separated entries".into(),
        ));
    }
    let file = load_weights(&cmd.weights)?;
    let stop = StopRule {
        min_frame_errors: cmd.stop_errors,
        max_frames: cmd.max_frames,
    };
    echo_eval(
        &format!(
            "decoders={} list_size={} weights={}",
            cmd.decoders,
            cmd.list_size,
            cmd.weights.display()
        ),
        &file,
        &snrs,
        &stop,
        cmd.seed,
    );
    std::fs::create_dir_all(&cmd.out).map_err(permbp::Error::from)?;

    let mut reports = Vec::new();
    for (i, &kind) in kinds.iter().enumerate() {
        let name = format!("{}_{}", i, kind.as_str());
        let decoder = build_decoder(kind, &file, cmd.list_size, Some(name.clone()))?;
        let report = monte_carlo(decoder.as_ref(), &file.code, &snrs, &stop, cmd.seed);
        print_cells(&report);
        emit_report(
            &report,
            ReportFormat::Csv,
            &cmd.out.join(format!("{name}.csv")),
        )?;
        emit_report(
            &report,
            ReportFormat::Json,
            &cmd.out.join(format!("{name}.json")),
        )?;
        reports.push(report);
    }

    let base = &reports[0];
    let mut deltas =
        String::from("snr_db,decoder,baseline,d_ber,d_fer,d_cond_fraction,time_ratio\n");
    for report in &reports[1..] {
        for (c, b) in report.cells.iter().zip(&base.cells) {
            let d_cond = match (c.cond_fraction, b.cond_fraction) {
                (Some(x), Some(y)) => (x - y).to_string(),
                _ => String::new(),
            };
            writeln!(
                deltas,
                "{},{},{},{},{},{},{}",
                c.snr_db,
                report.decoder,
                base.decoder,
                c.ber - b.ber,
                c.fer - b.fer,
                d_cond,
                c.mean_decode_us / b.mean_decode_us
            )
            .expect("string write");
        }
    }
    let delta_path = cmd.out.join("deltas.csv");
    std::fs::write(&delta_path, &deltas).map_err(permbp::Error::from)?;
    print!("{deltas}");
    println!("wrote per-decoder reports and {}", delta_path.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.workers > 0 {
        // ignore the error if a pool already exists (e.g. repeated calls in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    match &cli.command {
        Cmd::Code(c) => cmd_code(c),
        Cmd::Train(c) => cmd_train(c),
        Cmd::Eval(c) => cmd_eval(c),
        Cmd::Compare(c) => cmd_compare(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, msg) = e.report();
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}
