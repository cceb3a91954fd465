//! `qffnn`: line-recognition experiments on simulated quantum perceptron
//! networks.
//!
//! Exit codes: 0 on success, 1 when `network` finds a verdict that differs
//! from the target set, 2 on any error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qffnn::experiment::{
    evaluate_neuron, neuron_sweep, parse_vector, parse_weights, render, run_network_table,
    Evaluation, ExperimentConfig, ModeSelection, NetworkTable, NeuronOptions, NeuronReport,
    OutputFormat, DEFAULT_SHOTS,
};
use qffnn::ffnn::{
    coherent_circuit, hybrid_circuit, HybridSampling, Mode, NetworkSpec, DEFAULT_THRESHOLD,
};
use qffnn::neuron::{BinaryVector, PatternLabel};
use qffnn::noise::ReadoutErrorModel;
use qffnn::parallel::Exec;
use qffnn::sim::listing::to_listing;

#[derive(Parser)]
#[command(
    name = "qffnn",
    version,
    about = "Quantum perceptron feed-forward network experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every input label with the network and check the verdicts.
    Network(NetworkArgs),
    /// Activation probability of a single node, or a sweep over all inputs.
    Neuron(NeuronArgs),
    /// Print the gate listing of the hybrid or coherent network circuit.
    DumpCircuit(DumpArgs),
    /// Draw a 4-entry label as a 2x2 pixel grid.
    Render { label: u64 },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hybrid,
    Coherent,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitModeArg {
    Hybrid,
    Coherent,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalArg {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum HybridSamplingArg {
    Auto,
    FeedForward,
    PerNode,
}

#[derive(Args)]
struct NetworkSource {
    /// Hidden weights then the output weight, each a label or
    /// ':'-separated entries.
    #[arg(long, default_value = "12,10,2", conflicts_with = "network")]
    weights: String,
    /// Network description file (JSON).
    #[arg(long)]
    network: Option<PathBuf>,
}

impl NetworkSource {
    fn load(&self) -> Result<NetworkSpec> {
        match &self.network {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                NetworkSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))
            }
            None => parse_weights(&self.weights).context("invalid --weights"),
        }
    }
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long = "eval", value_enum, default_value = "exact")]
    eval: EvalArg,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Readout flip probabilities `p01,p10`.
    #[arg(long, value_parser = parse_noise)]
    noise: Option<ReadoutErrorModel>,
    /// Correct sampled counts with the inverse readout calibration.
    #[arg(long)]
    mitigate: bool,
    /// Run everything on the calling thread.
    #[arg(long)]
    sequential: bool,
}

impl SamplingArgs {
    fn evaluation(&self) -> Evaluation {
        match self.eval {
            EvalArg::Exact => Evaluation::Exact,
            EvalArg::Sampled => Evaluation::Sampled,
        }
    }

    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }
}

#[derive(Args)]
struct NetworkArgs {
    #[arg(long, value_enum, default_value = "both")]
    mode: ModeArg,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    source: NetworkSource,
    #[arg(long, value_enum, default_value = "auto")]
    hybrid_sampling: HybridSamplingArg,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Result file; without it the table goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Args)]
struct NeuronArgs {
    /// Input label or entries; omit with --sweep.
    #[arg(long, required_unless_present = "sweep")]
    input: Option<String>,
    #[arg(long)]
    weight: String,
    /// Vector length for labels.
    #[arg(long, default_value_t = 4)]
    size: usize,
    /// Evaluate every input label against the weight.
    #[arg(long)]
    sweep: bool,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long, value_enum, default_value = "coherent")]
    mode: CircuitModeArg,
    /// Input label or entries.
    #[arg(long, default_value = "0")]
    input: String,
    #[command(flatten)]
    source: NetworkSource,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_noise(s: &str) -> std::result::Result<ReadoutErrorModel, String> {
    s.parse().map_err(|e: qffnn::Error| e.to_string())
}

/// Length implied by an entry list, else `size`.
fn vector(token: &str, size: usize) -> Result<BinaryVector> {
    let len = if token.contains(':') {
        token.split(':').count()
    } else {
        size
    };
    parse_vector(token, len).with_context(|| format!("invalid vector '{token}'"))
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn print_summary(table: &NetworkTable, out: &mut dyn Write) -> Result<()> {
    let modes: Vec<Mode> = table.summary.modes.iter().map(|m| m.mode).collect();
    write!(out, "{:>5}  {:<7}", "label", "pattern")?;
    for m in &modes {
        write!(out, "  {:>16}", m.to_string())?;
    }
    writeln!(out, "  target  ok")?;
    for row in &table.rows {
        write!(out, "{:>5}  {:<7}", row.label, row.pattern)?;
        for o in &row.outcomes {
            let verdict = if o.positive { '+' } else { '-' };
            write!(out, "  {:>14.6} {verdict}", o.p_out)?;
        }
        let target = if row.target { "yes" } else { "no" };
        let ok = if row.correct() { "ok" } else { "WRONG" };
        writeln!(out, "  {target:>6}  {ok}")?;
    }
    for m in &table.summary.modes {
        let margin = m
            .margin
            .map_or_else(|| "n/a".to_owned(), |v| format!("{v:.6}"));
        writeln!(
            out,
            "{}: accuracy {:.4}, margin {margin}",
            m.mode, m.accuracy
        )?;
    }
    writeln!(
        out,
        "{}",
        if table.all_correct() {
            "all verdicts correct"
        } else {
            "some verdicts differ from the target set"
        }
    )?;
    Ok(())
}

fn cmd_network(args: NetworkArgs) -> Result<ExitCode> {
    let net = args.source.load()?;
    let config = ExperimentConfig {
        mode: match args.mode {
            ModeArg::Hybrid => ModeSelection::Hybrid,
            ModeArg::Coherent => ModeSelection::Coherent,
            ModeArg::Both => ModeSelection::Both,
        },
        evaluation: args.sampling.evaluation(),
        shots: args.sampling.shots,
        seed: args.sampling.seed,
        noise: args.sampling.noise,
        mitigate: args.sampling.mitigate,
        hybrid_sampling: match args.hybrid_sampling {
            HybridSamplingArg::Auto => HybridSampling::Auto,
            HybridSamplingArg::FeedForward => HybridSampling::FeedForward,
            HybridSamplingArg::PerNode => HybridSampling::PerNode,
        },
        threshold: args.threshold,
        exec: args.sampling.exec(),
        ..Default::default()
    };
    if net.input_len() != 4 {
        bail!(
            "the network command classifies 4-entry inputs, the network reads {}",
            net.input_len()
        );
    }
    if config.evaluation == Evaluation::Exact && config.noise.is_some() {
        eprintln!("note: --noise only affects --eval sampled");
    }
    let table = run_network_table(&net, &config)?;
    let format = match args.format {
        FormatArg::Json => OutputFormat::Json,
        FormatArg::Csv => OutputFormat::Csv,
    };
    let text = match format {
        OutputFormat::Json => table.to_json(),
        OutputFormat::Csv => table.to_csv(),
    };
    write_output(args.out.as_ref(), &text)?;
    if args.out.is_some() {
        print_summary(&table, &mut std::io::stdout())?;
    } else {
        print_summary(&table, &mut std::io::stderr())?;
    }
    Ok(if table.all_correct() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn print_report(r: &NeuronReport, out: &mut dyn Write) -> Result<()> {
    let label = r
        .input_label
        .map_or_else(|| "-".to_owned(), |l| l.to_string());
    write!(
        out,
        "input {label:>3}  {:<7}  p = {:.6}  (i.w)^2/m^2 = {:.6}",
        r.pattern, r.p, r.closed_form
    )?;
    if let Some(counts) = &r.counts {
        let table: Vec<String> = counts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        write!(out, "  counts {{{}}}", table.join(", "))?;
    }
    writeln!(out)?;
    Ok(())
}

fn cmd_neuron(args: NeuronArgs) -> Result<ExitCode> {
    let weight = vector(&args.weight, args.size)?;
    let options = NeuronOptions {
        evaluation: args.sampling.evaluation(),
        shots: args.sampling.shots,
        seed: args.sampling.seed,
        noise: args.sampling.noise,
        mitigate: args.sampling.mitigate,
        exec: args.sampling.exec(),
    };
    let reports = if args.sweep {
        neuron_sweep(&weight, &options)?
    } else {
        let input = vector(args.input.as_deref().unwrap_or_default(), weight.len())?;
        let stream = input.label().map_or(0, |PatternLabel(l)| l);
        vec![evaluate_neuron(&input, &weight, &options, stream)?]
    };
    let mut stdout = std::io::stdout();
    match args.format {
        ReportFormat::Json => {
            let text = if args.sweep {
                serde_json::to_string_pretty(&reports)?
            } else {
                serde_json::to_string_pretty(&reports[0])?
            };
            writeln!(stdout, "{text}")?;
        }
        ReportFormat::Text => {
            for r in &reports {
                print_report(r, &mut stdout)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dump(args: DumpArgs) -> Result<ExitCode> {
    let net = args.source.load()?;
    let input = vector(&args.input, net.input_len())?;
    let circuit = match args.mode {
        CircuitModeArg::Hybrid => hybrid_circuit(&net, &input)?,
        CircuitModeArg::Coherent => coherent_circuit(&net, &input)?,
    };
    write_output(args.out.as_ref(), &to_listing(&circuit))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_render(label: u64) -> Result<ExitCode> {
    println!("{}", render(label)?);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Network(a) => cmd_network(a),
        Command::Neuron(a) => cmd_neuron(a),
        Command::DumpCircuit(a) => cmd_dump(a),
        Command::Render { label } => cmd_render(label),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
