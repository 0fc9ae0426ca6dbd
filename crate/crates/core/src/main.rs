//! Command-line front end: data generation, partition inspection,
//! training, prediction, evaluation, feature selection, and a
//! depth-sweep benchmark.
//!
//! Every command is deterministic given its flags and seeds; wall-clock
//! timings are reported but never written into model files. Tunable
//! values resolve in three steps: command-line flag, then `--config`
//! file entry, then built-in default.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mckelm::dataset::{
    apply_normalizer, fit_normalizer, gen_synthetic, load_auto, save_binary, save_csv,
    train_test_split, Dataset, LabelMap, SyntheticShape,
};
use mckelm::error::{Error, Result};
use mckelm::feature_select::{
    load_attribution_auto, load_selection, overall_scores, save_selection, top_m,
};
use mckelm::kernels::KernelParams;
use mckelm::mckelm::VoteMode;
use mckelm::metrics::{accuracy, confusion, EvalReport};
use mckelm::model::{
    train_model_file, translate_labels, ClassifierChoice, ModelFile, TrainRecipe,
};
use mckelm::partition::{build_partition, PartitionConfig};
use mckelm::write_text_atomic;

#[derive(Parser)]
#[command(
    name = "mckelm",
    version,
    about = "Multicolumn kernel extreme learning machine toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the density-guided partition tree and report its splits.
    Partition(PartitionArgs),
    /// Train a classifier and write a model file.
    Train(TrainArgs),
    /// Classify query rows with a trained model.
    Predict(PredictArgs),
    /// Score a model (or a fresh training run) against labelled data.
    Evaluate(EvaluateArgs),
    /// Rank features by attribution score and write a selection file.
    SelectFeatures(SelectFeaturesArgs),
    /// Sweep partition depths, tabulating time and accuracy per depth.
    Bench(BenchArgs),
    /// Generate a synthetic labelled dataset.
    GenData(GenDataArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassifierKind {
    Mckelm,
    Kelm,
    Elm,
    Rkelm,
    Knn,
    Gnb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelKind {
    /// Gaussian RBF.
    Rbf,
    /// Chi-square, for nonnegative histogram-like features.
    Chi2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VoteModeArg {
    /// Plurality over routed column labels.
    Majority,
    /// Average raw column scores, then take the best class.
    ScoreAvg,
}

impl From<VoteModeArg> for VoteMode {
    fn from(v: VoteModeArg) -> VoteMode {
        match v {
            VoteModeArg::Majority => VoteMode::Majority,
            VoteModeArg::ScoreAvg => VoteMode::ScoreAverage,
        }
    }
}

impl From<ClassifierKind> for ClassifierChoice {
    fn from(v: ClassifierKind) -> ClassifierChoice {
        match v {
            ClassifierKind::Mckelm => ClassifierChoice::Mckelm,
            ClassifierKind::Kelm => ClassifierChoice::Kelm,
            ClassifierKind::Elm => ClassifierChoice::Elm,
            ClassifierKind::Rkelm => ClassifierChoice::Rkelm,
            ClassifierKind::Knn => ClassifierChoice::Knn,
            ClassifierKind::Gnb => ClassifierChoice::Gnb,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    /// Gaussian clusters, near linearly separable.
    Blobs,
    /// Concentric rings, not linearly separable.
    Rings,
}

/// Flags shared by every command that reads data or computes.
#[derive(Args, Clone)]
struct CommonOpts {
    /// Flat key=value settings file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Treat the first CSV row as a header.
    #[arg(long)]
    has_header: bool,
}

/// Training tunables shared by train, evaluate, and bench.
#[derive(Args, Clone)]
struct TrainOpts {
    /// Classifier to train.
    #[arg(long, value_enum)]
    classifier: Option<ClassifierKind>,
    /// Partition depth: the tree yields 2^eta subsets.
    #[arg(long)]
    eta: Option<u32>,
    /// Nearest training rows consulted when routing a query.
    #[arg(long)]
    route_k: Option<usize>,
    /// Kernel family for kernel classifiers.
    #[arg(long, value_enum)]
    kernel: Option<KernelKind>,
    /// RBF width parameter.
    #[arg(long)]
    gamma: Option<f64>,
    /// Chi-square scale parameter.
    #[arg(long)]
    sigma: Option<f64>,
    /// Ridge regularization constant.
    #[arg(long)]
    reg_c: Option<f64>,
    /// Feature-selection file applied before normalization.
    #[arg(long)]
    features: Option<PathBuf>,
    /// Hidden-layer width for the random-feature machine
    /// (default: rows/10, kept within [64, 1024]).
    #[arg(long)]
    hidden: Option<usize>,
    /// Neighbour count for the nearest-neighbour classifier.
    #[arg(long)]
    knn_k: Option<usize>,
    /// RNG seed for seeded classifiers.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PartitionArgs {
    /// Training data (.csv or binary).
    #[arg(long)]
    train: PathBuf,
    /// Where to write the report (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Partition depth.
    #[arg(long)]
    eta: Option<u32>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct TrainArgs {
    /// Training data (.csv or binary).
    #[arg(long)]
    train: PathBuf,
    /// Where to write the model file.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    opts: TrainOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct PredictArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Query data (.csv or binary); labels in the file are ignored.
    #[arg(long)]
    test: PathBuf,
    /// Where to write the predictions CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a column with each routed subset's vote and distance.
    #[arg(long)]
    votes: bool,
    /// How multicolumn models combine their columns.
    #[arg(long, value_enum)]
    vote_mode: Option<VoteModeArg>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Trained model file (or use --train to fit one now).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Training data: fit a model in-process and time it.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Labelled evaluation data.
    #[arg(long)]
    test: PathBuf,
    /// Report basename: writes <out>.txt and <out>.json
    /// (default: flat text to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// How multicolumn models combine their columns.
    #[arg(long, value_enum)]
    vote_mode: Option<VoteModeArg>,
    #[command(flatten)]
    opts: TrainOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct SelectFeaturesArgs {
    /// Attribution tensor (.csv or binary).
    #[arg(long)]
    attrib: PathBuf,
    /// Where to write the selection file (JSON).
    #[arg(long)]
    out: PathBuf,
    /// How many features to keep.
    #[arg(long)]
    top_m: Option<usize>,
    /// Rank by absolute score instead of signed score.
    #[arg(long)]
    absolute: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct BenchArgs {
    /// Training data (.csv or binary).
    #[arg(long)]
    train: PathBuf,
    /// Labelled evaluation data.
    #[arg(long)]
    test: PathBuf,
    /// Comma-separated partition depths to sweep.
    #[arg(long)]
    etas: Option<String>,
    /// Timed runs per depth; the median is reported.
    #[arg(long)]
    repeats: Option<usize>,
    #[command(flatten)]
    opts: TrainOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct GenDataArgs {
    /// Rows to generate.
    #[arg(long)]
    n: Option<usize>,
    /// Features per row.
    #[arg(long)]
    d: Option<usize>,
    /// Classes.
    #[arg(long)]
    c: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Shape family.
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
    /// Output path (.csv writes text, anything else binary).
    #[arg(long)]
    out: PathBuf,
    /// Also write a held-out split here.
    #[arg(long)]
    test_out: Option<PathBuf>,
    /// Fraction of rows held out when --test-out is given.
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Flat key=value settings file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

// ---------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------

const CONFIG_KEYS: &[&str] = &[
    "classifier",
    "eta",
    "route-k",
    "kernel",
    "gamma",
    "sigma",
    "reg-c",
    "seed",
    "threads",
    "hidden",
    "knn-k",
    "top-m",
    "vote-mode",
    "repeats",
    "etas",
    "test-fraction",
    "n",
    "d",
    "c",
    "shape",
];

/// Parsed `--config` file: flat `key = value` lines, `#` comments.
struct Settings {
    values: HashMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Settings> {
        let mut values = HashMap::new();
        let Some(path) = path else {
            return Ok(Settings { values });
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{} line {}: expected key = value, got {raw:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "{} line {}: unknown setting {key:?}",
                    path.display(),
                    lineno + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Settings { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| Error::Config(format!("setting {key} = {raw:?}: {e}"))),
        }
    }

    fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => T::from_str(raw, true)
                .map(Some)
                .map_err(|e| Error::Config(format!("setting {key} = {raw:?}: {e}"))),
        }
    }
}

// ---------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------

fn init_threads(common: &CommonOpts, settings: &Settings) -> Result<()> {
    let threads = match common.threads.or(settings.get("threads")?) {
        Some(t) => t,
        None => return Ok(()), // rayon defaults to available parallelism
    };
    if threads == 0 {
        return Err(Error::Config("threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Fully resolved training recipe.
fn resolve_plan(opts: &TrainOpts, settings: &Settings) -> Result<TrainRecipe> {
    let classifier = opts
        .classifier
        .map_or_else(|| settings.get_enum("classifier"), |v| Ok(Some(v)))?
        .unwrap_or(ClassifierKind::Mckelm);
    let kernel_kind = opts
        .kernel
        .map_or_else(|| settings.get_enum("kernel"), |v| Ok(Some(v)))?
        .unwrap_or(KernelKind::Rbf);
    let gamma = opts.gamma.map_or_else(|| settings.get("gamma"), |v| Ok(Some(v)))?.unwrap_or(1.0);
    let sigma = opts.sigma.map_or_else(|| settings.get("sigma"), |v| Ok(Some(v)))?.unwrap_or(1.0);
    let kernel = match kernel_kind {
        KernelKind::Rbf => KernelParams::rbf(gamma)?,
        KernelKind::Chi2 => KernelParams::chi_square(sigma)?,
    };
    let selection = match &opts.features {
        Some(path) => Some(load_selection(path)?),
        None => None,
    };
    Ok(TrainRecipe {
        classifier: classifier.into(),
        eta: opts.eta.map_or_else(|| settings.get("eta"), |v| Ok(Some(v)))?.unwrap_or(3),
        route_k: opts
            .route_k
            .map_or_else(|| settings.get("route-k"), |v| Ok(Some(v)))?
            .unwrap_or(3),
        kernel,
        regularization: opts
            .reg_c
            .map_or_else(|| settings.get("reg-c"), |v| Ok(Some(v)))?
            .unwrap_or(1.0),
        hidden: opts.hidden.map_or_else(|| settings.get("hidden"), |v| Ok(Some(v)))?,
        knn_k: opts.knn_k.map_or_else(|| settings.get("knn-k"), |v| Ok(Some(v)))?.unwrap_or(1),
        seed: opts.seed.map_or_else(|| settings.get("seed"), |v| Ok(Some(v)))?.unwrap_or(0),
        selection,
    })
}

fn resolve_vote_mode(flag: Option<VoteModeArg>, settings: &Settings) -> Result<VoteMode> {
    let arg = flag
        .map_or_else(|| settings.get_enum("vote-mode"), |v| Ok(Some(v)))?
        .unwrap_or(VoteModeArg::Majority);
    Ok(arg.into())
}

/// Write by extension: `.csv` as text, anything else as the binary
/// dataset format.
fn save_dataset(path: &Path, data: &Dataset, map: &LabelMap) -> Result<()> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        save_csv(path, data, map)
    } else {
        save_binary(path, data)
    }
}

/// `<base>.<ext>` without touching any existing extension.
fn with_suffix(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

// ---------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------

fn cmd_partition(args: PartitionArgs) -> Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    init_threads(&args.common, &settings)?;
    let eta = args.eta.map_or_else(|| settings.get("eta"), |v| Ok(Some(v)))?.unwrap_or(3);
    let (raw, _) = load_auto(&args.train, args.common.has_header)?;
    let normalizer = fit_normalizer(&raw);
    let data = apply_normalizer(&normalizer, &raw, false)?;
    let tree = build_partition(data.features_f64().view(), &PartitionConfig::new(eta)?)?;

    let mut text = String::new();
    let _ = writeln!(text, "rows: {}", tree.row_count());
    let _ = writeln!(text, "features: {}", tree.dim());
    let _ = writeln!(text, "eta: {eta} ({} subsets)", tree.subset_count());
    let _ = writeln!(text, "root density O = {}", tree.root_density());
    for (i, s) in tree.splits().iter().enumerate() {
        let _ = writeln!(
            text,
            "split {i}: feature {}, threshold {}, halves density D = {}",
            s.feature, s.value, s.halves_density
        );
    }
    for (leaf, members) in tree.leaf_members().iter().enumerate() {
        let _ = writeln!(text, "leaf {leaf}: {} rows", members.len());
    }
    emit(args.out.as_deref(), &text)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    init_threads(&args.common, &settings)?;
    let plan = resolve_plan(&args.opts, &settings)?;
    let (raw, labels) = load_auto(&args.train, args.common.has_header)?;
    let (model, seconds) = train_model_file(&plan, &raw, labels)?;
    model.save(&args.out)?;
    println!(
        "trained {} on {} rows ({} features, {} classes) in {seconds:.3} s -> {}",
        model.classifier.kind_name(),
        raw.n(),
        raw.feature_count(),
        raw.class_count(),
        args.out.display()
    );
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    init_threads(&args.common, &settings)?;
    let mode = resolve_vote_mode(args.vote_mode, &settings)?;
    let model = ModelFile::load(&args.model)?;
    let (queries, _) = load_auto(&args.test, args.common.has_header)?;

    let started = Instant::now();
    let pred = model.predict(&queries, mode)?;
    let seconds = started.elapsed().as_secs_f64();

    let mut text = String::new();
    text.push_str(if args.votes { "row,label,votes\n" } else { "row,label\n" });
    for (row, &label) in pred.labels.iter().enumerate() {
        if args.votes {
            let votes = match &pred.reports {
                Some(reports) => reports[row]
                    .votes
                    .iter()
                    .map(|v| format!("{}:{}:{}", v.subset, model.labels.original(v.label), v.distance))
                    .collect::<Vec<_>>()
                    .join(";"),
                None => String::new(),
            };
            let _ = writeln!(text, "{row},{label},{votes}");
        } else {
            let _ = writeln!(text, "{row},{label}");
        }
    }
    emit(args.out.as_deref(), &text)?;
    eprintln!("classified {} rows in {seconds:.3} s", queries.n());
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    init_threads(&args.common, &settings)?;
    let mode = resolve_vote_mode(args.vote_mode, &settings)?;

    let (model, train_seconds) = match (&args.model, &args.train) {
        (Some(path), None) => (ModelFile::load(path)?, 0.0),
        (None, Some(path)) => {
            let plan = resolve_plan(&args.opts, &settings)?;
            let (raw, labels) = load_auto(path, args.common.has_header)?;
            train_model_file(&plan, &raw, labels)?
        }
        _ => {
            return Err(Error::Config(
                "pass exactly one of --model (saved model) or --train (fit now)".into(),
            ))
        }
    };

    let (test, test_map) = load_auto(&args.test, args.common.has_header)?;
    let started = Instant::now();
    let pred = model.predict(&test, mode)?;
    let test_seconds = started.elapsed().as_secs_f64();
    let truth = translate_labels(&test_map, test.labels(), &model.labels)?;
    let cm = confusion(&truth, &pred.internal, model.classifier.class_count())?;
    let report = EvalReport::from_confusion(&cm, train_seconds, test_seconds)?;

    match &args.out {
        Some(base) => {
            let txt = with_suffix(base, "txt");
            let json = with_suffix(base, "json");
            write_text_atomic(&txt, &report.to_flat_text())?;
            let body = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Format(format!("report serialization: {e}")))?;
            write_text_atomic(&json, &format!("{body}\n"))?;
            println!(
                "accuracy {:.4} on {} rows -> {} and {}",
                report.accuracy,
                test.n(),
                txt.display(),
                json.display()
            );
        }
        None => print!("{}", report.to_flat_text()),
    }
    Ok(())
}

fn cmd_select_features(args: SelectFeaturesArgs) -> Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    let tensor = load_attribution_auto(&args.attrib, args.common.has_header)?;
    let scores = overall_scores(&tensor)?;
    let m = args.top_m.map_or_else(|| settings.get("top-m"), |v| Ok(Some(v)))?.unwrap_or(500);
    let selection = top_m(&scores, m, args.absolute)?;
    save_selection(&args.out, &selection)?;
    println!(
        "selected {m} of {} features -> {}",
        tensor.feature_count(),
        args.out.display()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let settings = Settings::load(args.common.config.as_deref())?;
    init_threads(&args.common, &settings)?;
    let mut plan = resolve_plan(&args.opts, &settings)?;
    // The sweep subject is the multicolumn model; a --classifier flag
    // would contradict the eta axis.
    plan.classifier = ClassifierChoice::Mckelm;

    let etas_raw = args
        .etas
        .clone()
        .or(settings.get("etas")?)
        .unwrap_or_else(|| "0,1,2,3".to_string());
    let etas: Vec<u32> = etas_raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|e| Error::Config(format!("etas entry {s:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    if etas.is_empty() {
        return Err(Error::Config("etas must list at least one depth".into()));
    }
    let repeats =
        args.repeats.map_or_else(|| settings.get("repeats"), |v| Ok(Some(v)))?.unwrap_or(3);
    if repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }

    let (raw, labels) = load_auto(&args.train, args.common.has_header)?;
    let (test, test_map) = load_auto(&args.test, args.common.has_header)?;

    println!("{:>4} {:>8} {:>10} {:>10} {:>10}", "eta", "subsets", "train_s", "test_s", "accuracy");
    for &eta in &etas {
        plan.eta = eta;
        let mut train_times = Vec::with_capacity(repeats);
        let mut test_times = Vec::with_capacity(repeats);
        let mut score = 0.0;
        for _ in 0..repeats {
            let (model, train_s) = train_model_file(&plan, &raw, labels.clone())?;
            let started = Instant::now();
            let pred = model.predict(&test, VoteMode::Majority)?;
            test_times.push(started.elapsed().as_secs_f64());
            train_times.push(train_s);
            let truth = translate_labels(&test_map, test.labels(), &model.labels)?;
            let cm = confusion(&truth, &pred.internal, model.classifier.class_count())?;
            score = accuracy(&cm)?;
        }
        println!(
            "{eta:>4} {:>8} {:>10.4} {:>10.4} {score:>10.4}",
            1u64 << eta,
            median(train_times),
            median(test_times)
        );
    }
    Ok(())
}

fn cmd_gen_data(args: GenDataArgs) -> Result<()> {
    let settings = Settings::load(args.config.as_deref())?;
    let n = args.n.map_or_else(|| settings.get("n"), |v| Ok(Some(v)))?.unwrap_or(1000);
    let d = args.d.map_or_else(|| settings.get("d"), |v| Ok(Some(v)))?.unwrap_or(8);
    let c = args.c.map_or_else(|| settings.get("c"), |v| Ok(Some(v)))?.unwrap_or(2);
    let seed = args.seed.map_or_else(|| settings.get("seed"), |v| Ok(Some(v)))?.unwrap_or(0);
    let shape = match args
        .shape
        .map_or_else(|| settings.get_enum("shape"), |v| Ok(Some(v)))?
        .unwrap_or(ShapeArg::Blobs)
    {
        ShapeArg::Blobs => SyntheticShape::Blobs,
        ShapeArg::Rings => SyntheticShape::Rings,
    };

    let data = gen_synthetic(n, d, c, seed, shape)?;
    let map = LabelMap::identity(c);
    match &args.test_out {
        Some(test_out) => {
            let fraction = args
                .test_fraction
                .map_or_else(|| settings.get("test-fraction"), |v| Ok(Some(v)))?
                .unwrap_or(0.25);
            let (train, test) = train_test_split(&data, fraction, seed)?;
            save_dataset(&args.out, &train, &map)?;
            save_dataset(test_out, &test, &map)?;
            println!(
                "wrote {} train rows -> {} and {} test rows -> {}",
                train.n(),
                args.out.display(),
                test.n(),
                test_out.display()
            );
        }
        None => {
            save_dataset(&args.out, &data, &map)?;
            println!("wrote {} rows -> {}", data.n(), args.out.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Partition(args) => cmd_partition(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::SelectFeatures(args) => cmd_select_features(args),
        Command::Bench(args) => cmd_bench(args),
        Command::GenData(args) => cmd_gen_data(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
