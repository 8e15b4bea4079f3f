//! `arithgen`: generate, verify and approximate arithmetic circuits.
//!
//! Exit status: 0 on success, 1 when a verification or search constraint
//! fails, 2 on usage errors (invalid flags or parameter combinations).

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use arithgen::arith::{AdderFamily, AdderSpec, CircuitSpec, MultiplierFamily, MultiplierSpec, Signedness};
use arithgen::export::{export, flat_verilog, CgpChromosome, ExportError, ExportFormat, Format, Variant};
use arithgen::netlist::{FlatNetlist, Signature};
use arithgen::search::{approximate, derive_seed, SearchConfig, SearchError};
use arithgen::sim::{
    error_metrics, stats, verify_exhaustive, verify_random, Exact, InputSpace, SimError, EXHAUSTIVE_LIMIT,
};

#[derive(Parser)]
#[command(name = "arithgen", version, about = "Gate-level arithmetic circuit generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a circuit as Verilog, BLIF, C or a CGP chromosome.
    Generate(GenerateArgs),
    /// Check a circuit against its integer semantics.
    ///
    /// Prints `status=pass|fail`, the number of vectors compared and, on
    /// failure, the first counterexample.
    Verify(VerifyArgs),
    /// Error metrics of an approximate circuit.
    ///
    /// Text output is one `key=value` per line: wce, mae, mre (inputs with an
    /// exact output of 0 excluded), error_rate, inputs_evaluated,
    /// erroneous_inputs, zero_exact_outputs, exhaustive and, for sampled
    /// runs, seed. JSON output has the same keys.
    Error(ErrorArgs),
    /// (1+lambda) search for smaller circuits within a worst-case error bound.
    ///
    /// Each run writes `<name>_run<i>.cgp` (best chromosome), `<name>_run<i>.v`
    /// (the same circuit as flat Verilog) and `<name>_run<i>.history` (lines
    /// `evaluation active_gates wce` at every acceptance) into the output
    /// directory. Run `i` uses the seed
    /// `seed + i * 0x9E3779B97F4A7C15` (wrapping).
    Approximate(ApproximateArgs),
    /// Gate counts by kind, total gates, logic depth and wire count.
    ///
    /// Text output is one `key=value` per line (`AND=8`, `total_gates=..`,
    /// `depth=..`, `wire_count=..`); JSON output has the fields
    /// gate_counts, total_gates, depth and wire_count.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitKind {
    Ha,
    Fa,
    Rca,
    Cla,
    Cska,
    Array,
    Dadda,
    Wallace,
    Bam,
    Tm,
    Divider,
    Mac,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdderArg {
    Rca,
    Cla,
    Cska,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Verilog,
    Blif,
    C,
    Cgp,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Flat,
    Hier,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct Selection {
    #[arg(long, value_enum)]
    circuit: CircuitKind,
    /// Operand width N.
    #[arg(long, default_value_t = 8)]
    bits: usize,
    /// Two's-complement operands (adders and exact multipliers).
    #[arg(long)]
    signed: bool,
    /// Final adder of Dadda and Wallace multipliers.
    #[arg(long, value_enum, default_value = "rca")]
    adder: AdderArg,
    /// Carry-skip block / lookahead group size.
    #[arg(long, default_value_t = 4)]
    block_size: usize,
    /// Broken-array multiplier: omitted rows.
    #[arg(long, default_value_t = 0)]
    bam_h: usize,
    /// Broken-array multiplier: omitted diagonals.
    #[arg(long, default_value_t = 0)]
    bam_v: usize,
    /// Truncated multiplier: omitted columns.
    #[arg(long, default_value_t = 0)]
    tm_k: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    sel: Selection,
    #[arg(long, value_enum, default_value = "verilog")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "flat")]
    variant: VariantArg,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    sel: Selection,
    /// Check this CGP chromosome (with the selected circuit's ports) instead
    /// of the generated circuit.
    #[arg(long)]
    chromosome: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct ErrorArgs {
    #[command(flatten)]
    sel: Selection,
    /// Approximate circuit as a CGP chromosome with the selected circuit's ports.
    #[arg(long)]
    chromosome: Option<PathBuf>,
    /// Accurate circuit to compare with (same width and options); the
    /// integer product/sum/quotient when omitted.
    #[arg(long, value_enum)]
    exact: Option<CircuitKind>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(Args)]
struct ApproximateArgs {
    #[command(flatten)]
    sel: Selection,
    /// Seed chromosome instead of the selected circuit (same ports).
    #[arg(long)]
    chromosome: Option<PathBuf>,
    /// Largest accepted worst-case error.
    #[arg(long, default_value_t = 0)]
    threshold: u128,
    /// Evaluations per run, the seed included.
    #[arg(long, default_value_t = 10_000)]
    evaluations: u64,
    #[arg(long, default_value_t = 4)]
    lambda: usize,
    #[arg(long, default_value_t = 5)]
    mutations: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    sel: Selection,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

enum Failure {
    /// Invalid request; exit status 2.
    Usage(String),
    /// Verification or constraint failure; exit status 1.
    Check(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Check(format!("{e:#}"))
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn spec_of(sel: &Selection, kind: CircuitKind) -> CircuitSpec {
    let s = if sel.signed {
        Signedness::Signed
    } else {
        Signedness::Unsigned
    };
    let adder = match sel.adder {
        AdderArg::Rca => AdderFamily::Rca,
        AdderArg::Cla => AdderFamily::Cla,
        AdderArg::Cska => AdderFamily::Cska,
    };
    let n = sel.bits;
    let add = |f| CircuitSpec::Adder(AdderSpec::new(f, s, n).with_block_size(sel.block_size));
    let mul = |f| {
        CircuitSpec::Multiplier(
            MultiplierSpec::new(f, s, n)
                .with_final_adder(adder)
                .with_block_size(sel.block_size),
        )
    };
    match kind {
        CircuitKind::Ha => CircuitSpec::HalfAdder,
        CircuitKind::Fa => CircuitSpec::FullAdder,
        CircuitKind::Rca => add(AdderFamily::Rca),
        CircuitKind::Cla => add(AdderFamily::Cla),
        CircuitKind::Cska => add(AdderFamily::Cska),
        CircuitKind::Array => mul(MultiplierFamily::Array),
        CircuitKind::Dadda => mul(MultiplierFamily::Dadda),
        CircuitKind::Wallace => mul(MultiplierFamily::Wallace),
        CircuitKind::Bam => mul(MultiplierFamily::Bam {
            h: sel.bam_h,
            v: sel.bam_v,
        }),
        CircuitKind::Tm => mul(MultiplierFamily::Tm { k: sel.tm_k }),
        CircuitKind::Divider => CircuitSpec::Divider { width: n },
        CircuitKind::Mac => CircuitSpec::Mac { width: n },
    }
}

fn selected(sel: &Selection) -> CircuitSpec {
    spec_of(sel, sel.circuit)
}

fn build_flat(spec: &CircuitSpec) -> Result<FlatNetlist, Failure> {
    let circuit = spec.build().map_err(usage)?;
    circuit.flatten().map_err(|e| Failure::Check(e.to_string()))
}

fn read_chromosome(path: &Path, name: &str, sig: &Signature) -> Result<(CgpChromosome, FlatNetlist), Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let c = CgpChromosome::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let net = c
        .to_netlist(name, Some(sig))
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok((c, net))
}

fn write_output(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .context("writing to standard output")?;
        }
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Outcome {
    let kind = match args.format {
        FormatArg::Verilog => Format::Verilog,
        FormatArg::Blif => Format::Blif,
        FormatArg::C => Format::C,
        FormatArg::Cgp => Format::Cgp,
    };
    let variant = match args.variant {
        VariantArg::Flat => Variant::Flat,
        VariantArg::Hier => Variant::Hier,
    };
    let format = ExportFormat::new(kind, variant).map_err(usage)?;
    let circuit = selected(&args.sel).build().map_err(usage)?;
    let text = export(&circuit, format).map_err(|e| match e {
        ExportError::TooWide(_) | ExportError::CgpHierarchical => usage(e),
        other => Failure::Check(other.to_string()),
    })?;
    write_output(args.out.as_deref(), &text)
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let spec = selected(&args.sel);
    if spec.is_approximate() {
        return Err(usage(format!("{spec} is approximate; use `error` to measure it")));
    }
    let mut net = build_flat(&spec)?;
    if let Some(path) = &args.chromosome {
        net = read_chromosome(path, &net.name, &net.signature())?.1;
    }
    let reference = spec.reference();
    let verdict = match args.mode {
        Mode::Exhaustive => verify_exhaustive(&net, &*reference, EXHAUSTIVE_LIMIT).map_err(|e| match e {
            SimError::TooManyInputs { .. } => usage(format!("{e}; use --mode random")),
            other => Failure::Check(other.to_string()),
        })?,
        Mode::Random => verify_random(&net, &*reference, args.trials, args.seed).map_err(usage)?,
    };
    let mut text = format!(
        "circuit={spec}\nmode={}\nstatus={}\nvectors={}\n",
        match args.mode {
            Mode::Exhaustive => "exhaustive",
            Mode::Random => "random",
        },
        if verdict.passed { "pass" } else { "fail" },
        verdict.vectors
    );
    if let Some(seed) = verdict.seed {
        text.push_str(&format!("seed={seed}\n"));
    }
    if let Some(cx) = &verdict.counterexample {
        text.push_str(&format!("counterexample={cx}\n"));
    }
    write_output(None, &text)?;
    if verdict.passed {
        Ok(())
    } else {
        Err(Failure::Check(format!("{spec} does not match its reference")))
    }
}

fn cmd_error(args: &ErrorArgs) -> Outcome {
    let spec = selected(&args.sel);
    let circuit_net = build_flat(&spec)?;
    let approx = match &args.chromosome {
        Some(path) => read_chromosome(path, &circuit_net.name, &circuit_net.signature())?.1,
        None => circuit_net,
    };
    let space = match args.mode {
        Mode::Exhaustive => {
            if approx.input_bits() > EXHAUSTIVE_LIMIT {
                return Err(usage(format!(
                    "{} input bits exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}; use --mode random",
                    approx.input_bits()
                )));
            }
            InputSpace::Exhaustive
        }
        Mode::Random => InputSpace::Random {
            trials: args.trials,
            seed: args.seed,
        },
    };
    let reference = spec.reference();
    let exact_net;
    let exact = match args.exact {
        Some(kind) => {
            let exact_spec = spec_of(&args.sel, kind);
            if exact_spec.is_approximate() {
                return Err(usage(format!("{exact_spec} is not an accurate circuit")));
            }
            exact_net = build_flat(&exact_spec)?;
            Exact::Netlist(&exact_net)
        }
        None => Exact::Function(&*reference),
    };
    let report = error_metrics(&approx, exact, space).map_err(usage)?;
    let text = match args.format {
        ReportFormat::Text => report.to_key_value(),
        ReportFormat::Json => serde_json::to_string_pretty(&report).context("serializing report")? + "\n",
    };
    write_output(None, &text)
}

fn cmd_approximate(args: &ApproximateArgs) -> Outcome {
    let spec = selected(&args.sel);
    let net = build_flat(&spec)?;
    let sig = net.signature();
    let (seed_chromosome, name) = match &args.chromosome {
        Some(path) => {
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("chromosome")
                .to_string();
            (read_chromosome(path, &net.name, &sig)?.0, name)
        }
        None => (
            CgpChromosome::from_netlist(&net).map_err(|e| Failure::Check(e.to_string()))?,
            net.name.clone(),
        ),
    };
    let widths: Vec<usize> = sig.inputs.iter().map(|(_, w)| *w).collect();
    if widths.iter().sum::<usize>() > EXHAUSTIVE_LIMIT {
        return Err(usage(format!("the search needs at most {EXHAUSTIVE_LIMIT} input bits")));
    }
    if args.runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let reference = spec.reference();
    let mut summary = String::new();
    for run in 0..args.runs {
        let config = SearchConfig {
            wce_threshold: args.threshold,
            lambda: args.lambda,
            mutations_per_offspring: args.mutations,
            max_evaluations: args.evaluations,
            time_limit: None,
            seed: derive_seed(args.seed, run),
        };
        let result = approximate(&seed_chromosome, &*reference, &widths, &config).map_err(|e| match e {
            SearchError::SeedViolatesThreshold { .. } => Failure::Check(e.to_string()),
            other => usage(other),
        })?;
        let base = args.out_dir.join(format!("{name}_run{run}"));
        let cgp = base.with_extension("cgp");
        let history = base.with_extension("history");
        let verilog = base.with_extension("v");
        let best = result
            .best
            .to_netlist(&net.name, Some(&sig))
            .map_err(|e| Failure::Check(e.to_string()))?;
        let best_v = flat_verilog(&best.strip_dead()).map_err(|e| Failure::Check(e.to_string()))?;
        fs::write(&cgp, result.best.to_text()).with_context(|| format!("writing {}", cgp.display()))?;
        fs::write(&verilog, best_v).with_context(|| format!("writing {}", verilog.display()))?;
        fs::write(&history, result.history_text()).with_context(|| format!("writing {}", history.display()))?;
        summary.push_str(&format!(
            "run={run} seed={} evaluations={} active_gates={} wce={} chromosome={}\n",
            config.seed,
            result.evaluations,
            result.best_active_gates,
            result.best_wce,
            cgp.display()
        ));
    }
    write_output(None, &summary)
}

fn cmd_stats(args: &StatsArgs) -> Outcome {
    let net = build_flat(&selected(&args.sel))?;
    let s = stats(&net);
    let text = match args.format {
        ReportFormat::Text => s.to_key_value(),
        ReportFormat::Json => serde_json::to_string_pretty(&s).context("serializing stats")? + "\n",
    };
    write_output(None, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Error(a) => cmd_error(a),
        Command::Approximate(a) => cmd_approximate(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
