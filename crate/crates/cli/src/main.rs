//! `driftbar` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse or data error, 3 failed
//! assertion.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use driftbar::baselines::{rho_grid, rho_sweep, BaselineOptions, RestartPolicy, SweepConfig};
use driftbar::diagnostics::autocorrelation;
use driftbar::eval::{
    audit_accuracy, audit_prediction_log, prequential_trace, AuditOptions, Classifier,
    MajorityClassifier, NaiveBayes, PersistenceClassifier, PredictionLog, RestartClassifier,
    Verdict,
};
use driftbar::stream_io::{dataset_summary, parse_auto_str, ClassColumn};
use driftbar::synth::{gen_iid_labels, gen_markov_labels, write_labels_arff, write_labels_csv, MarkovLabelModel};
use driftbar::{Label, StreamDataset};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "driftbar", version, about = "Naive baselines and audits for labelled data streams")]
struct Cli {
    /// Worker threads for parallel work (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grade a reported accuracy or a prediction log against the naive bars.
    Audit(AuditArgs),
    /// Sample autocorrelation of a binary label stream.
    Acf(AcfArgs),
    /// Random-restart majority sweep over alarm probabilities.
    Sweep(SweepArgs),
    /// Generate synthetic label streams.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Prequential (test-then-train) evaluation of a learner.
    Eval(EvalArgs),
    /// Instance, feature and class counts.
    Summary(InputArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// ARFF or CSV file, or `-` for standard input.
    #[arg(long, short)]
    input: String,

    /// Class column: zero-based index or column name (default: last).
    #[arg(long)]
    class: Option<String>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("subject").required(true).args(["predictions", "accuracy"]))]
struct AuditArgs {
    #[command(flatten)]
    input: InputArgs,

    /// `true,predicted` CSV produced on the same stream.
    #[arg(long)]
    predictions: Option<PathBuf>,

    /// Reported prequential accuracy, as a fraction.
    #[arg(long)]
    accuracy: Option<f64>,

    /// Exit with status 3 unless the subject beats the persistence bar.
    #[arg(long)]
    assert_above_bar: bool,
}

#[derive(Args, Debug)]
struct AcfArgs {
    #[command(flatten)]
    input: InputArgs,

    #[arg(long, default_value_t = 100)]
    max_lag: usize,

    /// Output CSV (default: standard output).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Alarm probabilities as LO:HI:STEP.
    #[arg(long, default_value = "0:1:0.1", value_parser = parse_grid)]
    grid: RhoGrid,

    #[arg(long, default_value_t = 10)]
    reps: usize,

    #[arg(long)]
    seed: Option<u64>,

    /// Per-run rows (default: standard output).
    #[arg(long, short)]
    out: Option<PathBuf>,

    /// Per-rho summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SynthCommand {
    /// Two-state Markov chain with a given prior and lag-1 autocorrelation.
    Markov {
        #[command(flatten)]
        common: SynthArgs,
        #[arg(long, allow_negative_numbers = true)]
        acf1: f64,
    },
    /// Independent Bernoulli labels.
    Iid {
        #[command(flatten)]
        common: SynthArgs,
    },
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    n: usize,

    /// Probability of class 1.
    #[arg(long)]
    prior: f64,

    #[arg(long)]
    seed: Option<u64>,

    /// Output file; `.arff` selects ARFF, anything else CSV (default: standard output).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
enum Learner {
    NaiveBayes,
    Majority,
    Persistence,
    Restart(f64),
}

fn parse_learner(s: &str) -> Result<Learner, String> {
    match s {
        "naive-bayes" | "nb" => Ok(Learner::NaiveBayes),
        "majority" => Ok(Learner::Majority),
        "persistence" => Ok(Learner::Persistence),
        _ => {
            let rho = s
                .strip_prefix("restart:")
                .ok_or_else(|| format!("unknown learner {s:?}; expected naive-bayes, majority, persistence or restart:RHO"))?;
            let rho: f64 = rho.parse().map_err(|_| format!("bad alarm probability {rho:?}"))?;
            if !(0.0..=1.0).contains(&rho) {
                return Err(format!("alarm probability {rho} is outside [0, 1]"));
            }
            Ok(Learner::Restart(rho))
        }
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,

    /// naive-bayes, majority, persistence or restart:RHO.
    #[arg(long, value_parser = parse_learner)]
    learner: Learner,

    #[arg(long)]
    seed: Option<u64>,

    /// Report JSON (default: standard output).
    #[arg(long, short)]
    out: Option<PathBuf>,

    /// Also write the predictions as a `true,predicted` CSV.
    #[arg(long)]
    trace: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = TieBreakArg::MostRecent)]
    tie_break: TieBreakArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TieBreakArg {
    MostRecent,
    SchemaOrder,
}

#[derive(Clone, Debug)]
struct RhoGrid(Vec<f64>);

fn parse_grid(s: &str) -> Result<RhoGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(format!("expected LO:HI:STEP, got {s:?}"));
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad number {v:?} in grid"));
    rho_grid(num(lo)?, num(hi)?, num(step)?)
        .map(RhoGrid)
        .map_err(|e| e.to_string())
}

/// Failure modes, each with its exit status.
enum Failure {
    Usage(String),
    Data(String),
    Assertion(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Assertion(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Assertion(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn data_err(source: &str) -> impl Fn(driftbar::Error) -> Failure + '_ {
    move |e| Failure::Data(format!("{source}: {e}"))
}

fn class_column(arg: &Option<String>) -> ClassColumn {
    match arg {
        None => ClassColumn::Last,
        Some(s) => match s.parse::<usize>() {
            Ok(i) => ClassColumn::Index(i),
            Err(_) => ClassColumn::Name(s.clone()),
        },
    }
}

fn read_text(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map(|_| ())
    };
    res.map_err(|e| Failure::Data(format!("{}: {e}", display_name(path))))?;
    Ok(text)
}

fn display_name(path: &str) -> &str {
    if path == "-" {
        "<stdin>"
    } else {
        path
    }
}

fn load(args: &InputArgs) -> Result<StreamDataset, Failure> {
    let text = read_text(&args.input)?;
    parse_auto_str(&text, class_column(&args.class)).map_err(data_err(display_name(&args.input)))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Outcome {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Data(format!("<stdout>: {e}")))
        }
    }
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report types serialise");
    v.push(b'\n');
    v
}

fn effective_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => {
            eprintln!("driftbar: seed = {s}");
            s
        }
        None => {
            eprintln!("driftbar: seed = {DEFAULT_SEED} (default; pass --seed to override)");
            DEFAULT_SEED
        }
    }
}

fn audit(args: AuditArgs) -> Outcome {
    let ds = load(&args.input)?;
    let opts = AuditOptions::default();
    let (bytes, verdict) = if let Some(path) = &args.predictions {
        let name = path.display().to_string();
        let text = read_text(&name)?;
        let log = PredictionLog::parse_csv(&text).map_err(data_err(&name))?;
        let (audit, _) = audit_prediction_log(&log, Some(&ds), &opts).map_err(data_err(&name))?;
        (json_bytes(&audit), audit.verdict)
    } else {
        let acc = args.accuracy.expect("clap enforces one subject");
        if !(0.0..=1.0).contains(&acc) {
            return Err(Failure::Usage(format!("--accuracy {acc} is outside [0, 1]")));
        }
        let v = audit_accuracy(acc, &ds, &opts).map_err(data_err(display_name(&args.input.input)))?;
        (json_bytes(&v), v.verdict)
    };
    emit(None, &bytes)?;
    if args.assert_above_bar && verdict != Verdict::AbovePersistence {
        return Err(Failure::Assertion(format!(
            "verdict is {verdict:?}, not AbovePersistence"
        )));
    }
    Ok(())
}

fn acf(args: AcfArgs) -> Outcome {
    let ds = load(&args.input)?;
    let series = autocorrelation(&ds.labels(), args.max_lag).map_err(data_err(display_name(&args.input.input)))?;
    let mut buf = Vec::new();
    series.write_csv(&mut buf).map_err(data_err("<buffer>"))?;
    emit(args.out.as_deref(), &buf)
}

fn sweep(args: SweepArgs) -> Outcome {
    let seed = effective_seed(args.seed);
    if args.reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".into()));
    }
    let ds = load(&args.input)?;
    let cfg = SweepConfig {
        rho_grid: args.grid.0,
        repetitions: args.reps,
        master_seed: seed,
    };
    let res = rho_sweep(&ds.labels(), &cfg, BaselineOptions::default())
        .map_err(data_err(display_name(&args.input.input)))?;
    let mut rows = Vec::new();
    res.write_rows_csv(&mut rows).map_err(data_err("<buffer>"))?;
    emit(args.out.as_deref(), &rows)?;
    if let Some(path) = &args.summary {
        let mut summary = Vec::new();
        res.write_summary_csv(&mut summary).map_err(data_err("<buffer>"))?;
        emit(Some(path), &summary)?;
    }
    Ok(())
}

fn synth(cmd: SynthCommand) -> Outcome {
    let (common, labels, provenance) = match cmd {
        SynthCommand::Markov { common, acf1 } => {
            let seed = effective_seed(common.seed);
            let model = MarkovLabelModel::new(common.prior, acf1, seed, common.n)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let prov = format!(
                "synth markov n={} prior={} acf1={} seed={seed}",
                common.n, common.prior, acf1
            );
            (common, gen_markov_labels(&model), prov)
        }
        SynthCommand::Iid { common } => {
            let seed = effective_seed(common.seed);
            let labels = gen_iid_labels(common.prior, common.n, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            let prov = format!("synth iid n={} prior={} seed={seed}", common.n, common.prior);
            (common, labels, prov)
        }
    };
    let arff = common
        .out
        .as_deref()
        .and_then(Path::extension)
        .is_some_and(|e| e.eq_ignore_ascii_case("arff"));
    let mut buf = Vec::new();
    let written = if arff {
        write_labels_arff(&labels, &provenance, &mut buf)
    } else {
        write_labels_csv(&labels, &provenance, &mut buf)
    };
    written.map_err(data_err("<buffer>"))?;
    emit(common.out.as_deref(), &buf)
}

#[derive(serde::Serialize)]
struct SeededReport<'a> {
    #[serde(flatten)]
    report: &'a driftbar::eval::EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn eval(args: EvalArgs) -> Outcome {
    let ds = load(&args.input)?;
    let source = display_name(&args.input.input);
    if ds.is_empty() {
        return Err(Failure::Data(format!("{source}: {}", driftbar::Error::EmptyStream)));
    }
    let tie = match args.tie_break {
        TieBreakArg::MostRecent => driftbar::baselines::TieBreak::MostRecent,
        TieBreakArg::SchemaOrder => driftbar::baselines::TieBreak::SchemaOrder,
    };
    let opts = BaselineOptions { tie_break: tie, ..Default::default() };
    let cold = opts.cold_start.resolve(&ds.labels());
    let k = ds.n_classes();
    let mut seed_used = None;
    let mut learner: Box<dyn Classifier> = match args.learner {
        Learner::NaiveBayes => Box::new(NaiveBayes::new(ds.schema())),
        Learner::Majority => Box::new(MajorityClassifier::new(k, cold, tie)),
        Learner::Persistence => Box::new(PersistenceClassifier::new(cold)),
        Learner::Restart(rho) => {
            let seed = effective_seed(args.seed);
            seed_used = Some(seed);
            let policy = RestartPolicy::new(rho, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            Box::new(RestartClassifier::new(k, cold, tie, policy))
        }
    };
    let (report, predictions) = prequential_trace(learner.as_mut(), &ds).map_err(data_err(source))?;
    eprintln!(
        "driftbar: {} accuracy {:.5} over {} instances in {:?}",
        report.classifier, report.accuracy, report.n, report.wall_time
    );

    let out = SeededReport {
        report: &report,
        seed: seed_used,
    };
    emit(args.out.as_deref(), &json_bytes(&out))?;

    if let Some(path) = &args.trace {
        let names = ds.schema().class_values();
        let name = |l: Label| names.get(l.0).cloned().unwrap_or_else(|| format!("<class {}>", l.0));
        let log = PredictionLog {
            entries: ds
                .instances()
                .iter()
                .zip(&predictions)
                .map(|(inst, &p)| (name(inst.label), name(p)))
                .collect(),
        };
        let mut buf = Vec::new();
        log.write_csv(&mut buf).map_err(data_err("<buffer>"))?;
        emit(Some(path), &buf)?;
    }
    Ok(())
}

fn summary(args: InputArgs) -> Outcome {
    let ds = load(&args)?;
    emit(None, &json_bytes(&dataset_summary(&ds)))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Audit(a) => audit(a),
        Command::Acf(a) => acf(a),
        Command::Sweep(a) => sweep(a),
        Command::Synth(c) => synth(c),
        Command::Eval(a) => eval(a),
        Command::Summary(a) => summary(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("driftbar: --threads must be at least 1");
            return ExitCode::from(1);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("driftbar: cannot start worker threads: {e}");
            return ExitCode::from(2);
        }
    };

    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("driftbar: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
