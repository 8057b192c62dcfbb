//! The `sonn` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or file
//! error, 3 training failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::baseline::{pca_fit, train_fnn, FnnConfig};
use crate::dataset::{
    gen_blobs, gen_separable, gen_surrogate_eeg, gen_xor, read_csv, split_indices, write_csv, Dataset, Matrix,
    NormParams, SplitSpec,
};
use crate::ecnn::{default_fit_config, train_ecnn};
use crate::error::Error;
use crate::gmdh::{train_gmdh_layered, train_gmdh_roulette, GmdhConfig, NeuronKind};
use crate::lmdt::{
    aggregate_segments, pair_report_csv, top_class, train_pairwise_tree, train_pocket_ratchet, DtConfig,
    LinearMachine, PairwiseConfig, PocketConfig, TestSelector, ThermalSchedule,
};
use crate::model::{FnnPayload, Learner, ModelFile, Provenance, FORMAT_VERSION};
use crate::neurocore::{FitConfig, FitMethod};
use crate::ruletree::extract_rules;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_TRAINING: i32 = 3;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(Error),
    Training(Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Training(_) => EXIT_TRAINING,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(e) => write!(f, "data error: {e}"),
            CliError::Training(e) => write!(f, "training error: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn data(e: Error) -> CliError {
    CliError::Data(e)
}

fn training(e: Error) -> CliError {
    match e {
        Error::InvalidConfig(m) => CliError::Usage(m),
        other => CliError::Training(other),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| {
        CliError::Data(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "sonn", version, about = "Self-organizing constructive classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Train a model on a CSV file.
    Train(TrainArgs),
    /// Score a saved model on a CSV file.
    Evaluate(EvaluateArgs),
    /// Print a saved model as text or DOT.
    Export(ExportArgs),
    /// Grow threshold rules from the rows a binary model classifies correctly.
    ExtractRules(ExtractArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Xor,
    Blobs,
    SurrogateEeg,
    Separable,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    kind: GenKind,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    classes: usize,
    /// Informative columns (surrogate-eeg).
    #[arg(long, default_value_t = 4)]
    informative: usize,
    /// Noise columns (surrogate-eeg).
    #[arg(long, default_value_t = 68)]
    irrelevant: usize,
    /// Feature count (separable).
    #[arg(long, default_value_t = 2)]
    features: usize,
    /// Minimum discriminant lead (separable).
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Ecnn,
    GmdhLayered,
    GmdhRoulette,
    Lm,
    PairwiseDt,
    Ruletree,
    Fnn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Linear,
    Bilinear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FitArg {
    Gradient,
    LeastSquares,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SelectorArg {
    InduceDt,
    Sfs,
}

#[derive(Debug, Args)]
struct DataArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "y")]
    label: String,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[command(flatten)]
    data: DataArgs,
    /// Model output path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fit:validation[:test] fractions, e.g. "2/3:1/3".
    #[arg(long, default_value = "2/3:1/3")]
    split: String,
    /// Expected class count; checked against the data.
    #[arg(long)]
    classes: Option<usize>,
    /// Column excluded from the features (e.g. a recording id).
    #[arg(long)]
    group_by: Option<String>,
    /// Per-pair or per-epoch report CSV.
    #[arg(long)]
    report: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "bilinear")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "gradient")]
    fit: FitArg,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Survivors per layer (gmdh-layered).
    #[arg(long)]
    survivors: Option<usize>,
    #[arg(long, default_value_t = 10)]
    max_layers: usize,
    /// Roulette attempts (gmdh-roulette) or test-induction attempts (pairwise-dt).
    #[arg(long)]
    attempts: Option<usize>,
    /// Feature cap per pairwise test.
    #[arg(long)]
    max_features: Option<usize>,
    #[arg(long, value_enum, default_value = "induce-dt")]
    selector: SelectorArg,
    /// Use the thermal correction size instead of a fixed one.
    #[arg(long)]
    thermal: bool,
    /// Hidden units (fnn).
    #[arg(long, default_value_t = 4)]
    hidden: usize,
    /// Keep principal components up to this explained-variance level (fnn).
    #[arg(long)]
    pca: Option<f64>,
    #[arg(long)]
    patience: Option<usize>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Report per-group class distributions for this column.
    #[arg(long)]
    group_by: Option<String>,
    /// Confusion matrix CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Dot,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Rule model output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional held-out file to score the rules on.
    #[arg(long)]
    test: Option<PathBuf>,
}

/// Runs the command line with explicit output streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Train(a) => cmd_train(&a, out),
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::Export(a) => cmd_export(&a, out),
        Command::ExtractRules(a) => cmd_extract_rules(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.code()
        }
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(io_err(p)),
        None => out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> CliResult<()> {
    let ds = match a.kind {
        GenKind::Xor => gen_xor(a.n, a.seed),
        GenKind::Blobs => gen_blobs(a.n, a.classes, a.seed),
        GenKind::SurrogateEeg => gen_surrogate_eeg(a.n, a.informative, a.irrelevant, 2, a.seed).map(|g| g.dataset),
        GenKind::Separable => gen_separable(a.n, a.classes, a.features, a.margin, a.seed),
    }
    .map_err(training)?;
    match &a.out {
        Some(p) => {
            let file = File::create(p).map_err(io_err(p))?;
            let mut w = BufWriter::new(file);
            write_csv(&ds, &mut w).map_err(io_err(p))?;
            w.flush().map_err(io_err(p))
        }
        None => write_csv(&ds, out).map_err(io_err(Path::new("<stdout>"))),
    }
}

#[derive(Serialize)]
struct TrainConfigRecord<'a, C: Serialize> {
    method: &'a str,
    split: &'a str,
    settings: C,
}

fn error_rate(model: &ModelFile, ds: &Dataset) -> crate::Result<f64> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut wrong = 0;
    for i in 0..ds.len() {
        if model.learner.predict(ds.row(i))?.0 != ds.labels()[i] {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / ds.len() as f64)
}

fn settings_json<C: Serialize>(method: &str, split: &str, c: C) -> serde_json::Value {
    serde_json::to_value(TrainConfigRecord {
        method,
        split,
        settings: c,
    })
    .expect("config serialises")
}

fn fit_config(a: &TrainArgs, base: FitConfig) -> FitConfig {
    FitConfig {
        method: match a.fit {
            FitArg::Gradient => FitMethod::Gradient,
            FitArg::LeastSquares => FitMethod::LeastSquares,
        },
        learning_rate: a.learning_rate.unwrap_or(base.learning_rate),
        epochs: a.epochs.unwrap_or(base.epochs),
        restarts: a.restarts.unwrap_or(base.restarts),
        seed: a.seed,
        ..base
    }
}

fn pocket_config(a: &TrainArgs) -> PocketConfig {
    PocketConfig {
        epochs: a.epochs,
        c: 1.0,
        use_ratchet: true,
        thermal: a.thermal.then(ThermalSchedule::default),
        seed: a.seed,
    }
}

fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> CliResult<()> {
    let csv = read_csv(&a.data.data, &a.data.label, a.group_by.as_deref(), None).map_err(data)?;
    let raw = csv.dataset;
    if let Some(r) = a.classes {
        if r != raw.class_count() {
            return Err(CliError::Usage(format!(
                "--classes {r} but the data has {} classes",
                raw.class_count()
            )));
        }
    }
    let fractions = SplitSpec::parse_fractions(&a.split).map_err(|e| CliError::Usage(e.to_string()))?;
    if !(2..=3).contains(&fractions.len()) {
        return Err(CliError::Usage("--split needs 2 or 3 parts".into()));
    }
    let parts_idx =
        split_indices(&raw, &SplitSpec::new(fractions, a.seed, true)).map_err(|e| CliError::Usage(e.to_string()))?;
    let norm = NormParams::fit(&raw.subset(&parts_idx[0]).features().clone()).map_err(data)?;
    let ds = norm.apply(&raw).map_err(data)?;
    let fit = ds.subset(&parts_idx[0]);
    let val = ds.subset(&parts_idx[1]);
    let test = parts_idx.get(2).map(|idx| ds.subset(idx));
    let method_name;
    let mut report = String::new();
    let mut report_csv: Option<String> = None;

    let (learner, config) = match a.method {
        Method::Ecnn => {
            method_name = "ecnn";
            let cfg = fit_config(a, default_fit_config());
            let net = train_ecnn(&fit, &val, &cfg).map_err(training)?;
            let _ = writeln!(report, "selected features: {}", names(&ds, &net.selected_features()));
            let _ = writeln!(report, "cascade neurons: {}", net.neurons.len());
            (Learner::Ecnn(net), settings_json(method_name, &a.split, &cfg))
        }
        Method::GmdhLayered | Method::GmdhRoulette => {
            let cfg = GmdhConfig {
                survivors: a.survivors,
                kind: match a.kind {
                    KindArg::Linear => NeuronKind::Linear,
                    KindArg::Bilinear => NeuronKind::Bilinear,
                },
                fit: fit_config(a, FitConfig::default()),
                max_layers: a.max_layers,
                attempts: a.attempts.unwrap_or(GmdhConfig::default().attempts),
            };
            let (name, learner) = if a.method == Method::GmdhLayered {
                let net = train_gmdh_layered(&fit, &val, &cfg).map_err(training)?;
                ("gmdh-layered", Learner::GmdhLayered(net))
            } else {
                let net = train_gmdh_roulette(&fit, &val, &cfg).map_err(training)?;
                ("gmdh-roulette", Learner::GmdhRoulette(net))
            };
            method_name = name;
            if let Learner::GmdhLayered(net) | Learner::GmdhRoulette(net) = &learner {
                let _ = writeln!(report, "neurons: {}", net.neurons.len());
                let _ = writeln!(report, "selected features: {}", names(&ds, &net.selected_features()));
            }
            (learner, settings_json(method_name, &a.split, &cfg))
        }
        Method::Lm => {
            method_name = "lm";
            let cfg = pocket_config(a);
            let init = LinearMachine::zeros(ds.class_count(), ds.n_features()).map_err(training)?;
            let (lm, state) = train_pocket_ratchet(&init, &fit, &cfg).map_err(training)?;
            let _ = writeln!(report, "pocket accuracy: {}", state.pocket_accuracy);
            let _ = writeln!(report, "epochs run: {}", state.epochs_run);
            (Learner::Lm(lm), settings_json(method_name, &a.split, &cfg))
        }
        Method::PairwiseDt => {
            method_name = "pairwise-dt";
            let cfg = PairwiseConfig {
                selector: match a.selector {
                    SelectorArg::InduceDt => TestSelector::InduceDt,
                    SelectorArg::Sfs => TestSelector::Sfs,
                },
                dt: DtConfig {
                    n_f: a.max_features,
                    attempts: a.attempts.unwrap_or(DtConfig::default().attempts),
                    pocket: pocket_config(a),
                },
            };
            let (tree, pairs) = train_pairwise_tree(&fit, &val, &cfg).map_err(training)?;
            let _ = writeln!(report, "pairwise tests: {}", pairs.len());
            for p in &pairs {
                let _ = writeln!(
                    report,
                    "  pair {}/{}: validation error {:.4}, features {}",
                    p.i, p.j, p.error, p.feature_count
                );
            }
            report_csv = Some(pair_report_csv(&pairs));
            (Learner::PairwiseDt(tree), settings_json(method_name, &a.split, &cfg))
        }
        Method::Ruletree => {
            method_name = "ruletree";
            if ds.class_count() != 2 {
                return Err(CliError::Usage("rule trees separate exactly two classes".into()));
            }
            let (x0, x1) = class_rows(&fit, |_| true);
            let pool: Vec<usize> = (0..ds.n_features()).collect();
            let tree = extract_rules(&x0, &x1, &pool, ds.feature_names()).map_err(training)?;
            (Learner::Ruletree(tree), settings_json(method_name, &a.split, serde_json::Value::Null))
        }
        Method::Fnn => {
            method_name = "fnn";
            let base = FnnConfig::default();
            let cfg = FnnConfig {
                learning_rate: a.learning_rate.unwrap_or(base.learning_rate),
                max_epochs: a.epochs.unwrap_or(base.max_epochs),
                patience: a.patience.unwrap_or(base.patience),
                restarts: a.restarts.unwrap_or(base.restarts),
                seed: a.seed,
            };
            let pca = match a.pca {
                Some(level) => Some(pca_fit(fit.features(), level).map_err(training)?),
                None => None,
            };
            let (f, v) = match &pca {
                Some(p) => (p.transform(&fit).map_err(training)?, p.transform(&val).map_err(training)?),
                None => (fit.clone(), val.clone()),
            };
            let (network, curve) = train_fnn(&f, &v, a.hidden, &cfg).map_err(training)?;
            let _ = writeln!(report, "best epoch: {}", curve.best_epoch);
            if let Some(p) = &pca {
                let _ = writeln!(report, "principal components kept: {}", p.retained());
            }
            let mut csv = String::from("epoch,train_error,val_error\n");
            for (k, (t, v)) in curve.train_error.iter().zip(&curve.val_error).enumerate() {
                let _ = writeln!(csv, "{k},{t},{v}");
            }
            report_csv = Some(csv);
            #[derive(Serialize)]
            struct FnnSettings {
                hidden: usize,
                pca: Option<f64>,
                training: FnnConfig,
            }
            let settings = FnnSettings {
                hidden: a.hidden,
                pca: a.pca,
                training: cfg,
            };
            (
                Learner::Fnn(FnnPayload { network, pca }),
                settings_json(method_name, &a.split, settings),
            )
        }
    };

    let model = ModelFile {
        format_version: FORMAT_VERSION,
        learner,
        label_column: a.data.label.clone(),
        feature_names: ds.feature_names().to_vec(),
        class_names: csv.class_names,
        normalization: norm,
        provenance: Provenance {
            seed: a.seed,
            split: a.split.clone(),
            dataset_fingerprint: raw.fingerprint(),
            config,
        },
    };
    model.save(&a.out).map_err(data)?;
    if let (Some(path), Some(csv)) = (&a.report, &report_csv) {
        std::fs::write(path, csv).map_err(io_err(path))?;
    }

    let mut text = format!("method: {method_name}\n");
    let _ = writeln!(text, "training error: {}", error_rate(&model, &fit).map_err(training)?);
    let _ = writeln!(text, "validation error: {}", error_rate(&model, &val).map_err(training)?);
    if let Some(t) = &test {
        let _ = writeln!(text, "test error: {}", error_rate(&model, t).map_err(training)?);
    }
    let _ = writeln!(text, "overall error: {}", error_rate(&model, &ds).map_err(training)?);
    text.push_str(&report);
    emit(None, &text, out)
}

fn names(ds: &Dataset, idx: &[usize]) -> String {
    idx.iter()
        .map(|&j| ds.feature_names()[j].as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Splits rows by class, keeping those for which `keep(i)` holds.
fn class_rows(ds: &Dataset, keep: impl Fn(usize) -> bool) -> (Matrix, Matrix) {
    let mut r0 = Vec::new();
    let mut r1 = Vec::new();
    for i in (0..ds.len()).filter(|&i| keep(i)) {
        if ds.labels()[i] == 0 {
            r0.extend_from_slice(ds.row(i));
        } else {
            r1.extend_from_slice(ds.row(i));
        }
    }
    let m = ds.n_features();
    let make = |v: Vec<f64>| Matrix::from_vec(v.len() / m.max(1), m, v).expect("row-major rows");
    (make(r0), make(r1))
}

/// Loads a CSV in the model's label mapping and column order, normalised.
fn load_for_model(
    model: &ModelFile,
    path: &Path,
    group_by: Option<&str>,
) -> CliResult<(Dataset, Option<Vec<String>>)> {
    let csv = read_csv(path, &model.label_column, group_by, Some(&model.class_names)).map_err(data)?;
    let have = csv.dataset.feature_names();
    let mut cols = Vec::with_capacity(model.feature_names.len());
    for name in &model.feature_names {
        let j = have.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Data(Error::InvalidDataset(format!("column `{name}` required by the model is missing")))
        })?;
        cols.push(j);
    }
    if let Some(extra) = have.iter().find(|h| !model.feature_names.contains(h)) {
        return Err(CliError::Data(Error::InvalidDataset(format!(
            "column `{extra}` is not a model feature"
        ))));
    }
    let projected = csv.dataset.project(&cols);
    let normed = model.normalization.apply(&projected).map_err(data)?;
    Ok((normed, csv.groups))
}

fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = ModelFile::load(&a.model).map_err(data)?;
    let (ds, groups) = load_for_model(&model, &a.data, a.group_by.as_deref())?;
    let r = model.class_names.len();
    let mut confusion = vec![vec![0usize; r]; r];
    let mut predictions = Vec::with_capacity(ds.len());
    for i in 0..ds.len() {
        let (p, _) = model.learner.predict(ds.row(i)).map_err(data)?;
        confusion[ds.labels()[i]][p] += 1;
        predictions.push(p);
    }
    let wrong: usize = (0..r).map(|t| (0..r).filter(|&p| p != t).map(|p| confusion[t][p]).sum::<usize>()).sum();
    let mut text = format!("method: {}\n", model.learner.method());
    let _ = writeln!(text, "rows: {}", ds.len());
    let _ = writeln!(text, "error: {}", wrong as f64 / ds.len() as f64);
    text.push_str("confusion (rows = true, columns = predicted):\n");
    let _ = writeln!(text, "  {}", model.class_names.join("\t"));
    for (t, row) in confusion.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(usize::to_string).collect();
        let _ = writeln!(text, "{}\t{}", model.class_names[t], cells.join("\t"));
    }
    if let Some(groups) = groups {
        let mut order: Vec<String> = Vec::new();
        for g in &groups {
            if !order.contains(g) {
                order.push(g.clone());
            }
        }
        text.push_str("per-group class distribution:\n");
        for g in &order {
            let preds: Vec<usize> = groups
                .iter()
                .zip(&predictions)
                .filter(|(h, _)| *h == g)
                .map(|(_, p)| *p)
                .collect();
            let dist = aggregate_segments(&preds, r).map_err(data)?;
            let (c, p) = top_class(&dist);
            let shares: Vec<String> = dist.iter().map(|v| format!("{v:.4}")).collect();
            let _ = writeln!(
                text,
                "  {g}: {} (p = {p:.4}) [{}]",
                model.class_names[c],
                shares.join(", ")
            );
        }
    }
    if let Some(path) = &a.out {
        let mut csv = String::from("true");
        for c in &model.class_names {
            let _ = write!(csv, ",{c}");
        }
        csv.push('\n');
        for (t, row) in confusion.iter().enumerate() {
            csv.push_str(&model.class_names[t]);
            for v in row {
                let _ = write!(csv, ",{v}");
            }
            csv.push('\n');
        }
        emit(Some(path), &csv, out)?;
    }
    emit(None, &text, out)
}

fn cmd_export(a: &ExportArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = ModelFile::load(&a.model).map_err(data)?;
    let text = match (&model.learner, a.format) {
        (Learner::Ecnn(n), Format::Text) => n.describe(),
        (Learner::Ecnn(n), Format::Dot) => n.to_dot(),
        (Learner::GmdhLayered(n) | Learner::GmdhRoulette(n), Format::Text) => n.to_polynomial_text(),
        (Learner::GmdhLayered(n) | Learner::GmdhRoulette(n), Format::Dot) => n.to_dot(),
        (Learner::Lm(lm), Format::Text) => lm.to_text(&model.feature_names),
        (Learner::Lm(lm), Format::Dot) => lm.to_dot(&model.feature_names),
        (Learner::PairwiseDt(t), Format::Text) => t.to_text(),
        (Learner::PairwiseDt(t), Format::Dot) => t.to_dot(),
        (Learner::Ruletree(t), Format::Text) => t.to_text(Some(&model.class_names)),
        (Learner::Ruletree(t), Format::Dot) => t.to_dot(),
        (Learner::Fnn(p), Format::Text) => {
            let names: Vec<String> = match &p.pca {
                Some(pca) => (1..=pca.retained()).map(|k| format!("pc{k}")).collect(),
                None => model.feature_names.clone(),
            };
            p.network.to_text(&names)
        }
        (Learner::Fnn(_), Format::Dot) => {
            return Err(CliError::Usage("fnn models export as text only".into()));
        }
    };
    emit(a.out.as_deref(), &text, out)
}

fn cmd_extract_rules(a: &ExtractArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = ModelFile::load(&a.model).map_err(data)?;
    if model.class_names.len() != 2 {
        return Err(CliError::Usage("rule extraction needs a two-class model".into()));
    }
    let (ds, _) = load_for_model(&model, &a.data, None)?;
    let mut correct = vec![false; ds.len()];
    for (i, c) in correct.iter_mut().enumerate() {
        *c = model.learner.predict(ds.row(i)).map_err(data)?.0 == ds.labels()[i];
    }
    let (x0, x1) = class_rows(&ds, |i| correct[i]);
    if x0.rows() == 0 || x1.rows() == 0 {
        return Err(CliError::Training(Error::Degenerate(
            "the model classifies no row of one class correctly".into(),
        )));
    }
    let pool = model.learner.selected_features(ds.n_features());
    let tree = extract_rules(&x0, &x1, &pool, ds.feature_names()).map_err(training)?;
    let removed = correct.iter().filter(|c| !**c).count();

    let rules = ModelFile {
        format_version: FORMAT_VERSION,
        learner: Learner::Ruletree(tree.clone()),
        label_column: model.label_column.clone(),
        feature_names: model.feature_names.clone(),
        class_names: model.class_names.clone(),
        normalization: model.normalization.clone(),
        provenance: Provenance {
            seed: model.provenance.seed,
            split: model.provenance.split.clone(),
            dataset_fingerprint: model.provenance.dataset_fingerprint.clone(),
            config: serde_json::json!({
                "method": "ruletree",
                "source_method": model.learner.method(),
                "feature_pool": pool,
            }),
        },
    };
    rules.save(&a.out).map_err(data)?;

    let mut text = format!("rows used: {} (removed {removed} misclassified)\n", x0.rows() + x1.rows());
    text.push_str(&tree.to_text(Some(&model.class_names)));
    let _ = writeln!(text, "rule error on data: {}", error_rate(&rules, &ds).map_err(training)?);
    if let Some(path) = &a.test {
        let (t, _) = load_for_model(&model, path, None)?;
        let _ = writeln!(text, "rule error on test: {}", error_rate(&rules, &t).map_err(training)?);
        let _ = writeln!(text, "source model error on test: {}", error_rate(&model, &t).map_err(training)?);
    }
    emit(None, &text, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("sonn").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_capture(&["generate", "spiral"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn generate_to_stdout() {
        let (code, out, _) = run_capture(&["generate", "xor", "--n", "5", "--seed", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 6);
        assert!(out.starts_with("x1,x2,y\n"));
    }
}
