use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use codeplag::corpus::{load_corpus, load_labels, save_labels, Corpus};
use codeplag::evidence::{
    build_report, render_html, report_file_name, DEFAULT_MIN_MATCH, DEFAULT_OVERLAP_FRACTION,
};
use codeplag::forest::{
    evaluate, select_threshold, threshold_sweep, train_with, EvalReport, Label, RandomForestModel,
    SweepRow, TrainConfig, DEFAULT_TARGET_FPR, DEFAULT_THRESHOLD,
};
use codeplag::pipeline::{detect, rows_to_csv, PipelineConfig, SimilarityIndex};
use codeplag::synth::{generate_synthetic, MutationOp, SyntheticConfig};
use codeplag::vectorspace::{NGramConfig, DEFAULT_NGRAM};
use codeplag::lexer::stream_of;
use codeplag::{Execution, NormalizationProfile, SourceFile};

#[derive(Parser)]
#[command(name = "codeplag", version, about = "Template-aware plagiarism detection for student code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a random forest on labeled pairs of a corpus.
    Train(TrainArgs),
    /// Score every pair of a corpus with a trained model.
    Detect(DetectArgs),
    /// Measure a model against labeled pairs.
    Eval(EvalArgs),
    /// Render an HTML side-by-side comparison of two files.
    Evidence(EvidenceArgs),
    /// Generate a synthetic corpus with known copies.
    Synth(SynthArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory of .pde/.java submissions (not searched recursively).
    #[arg(long, value_name = "DIR")]
    submissions: PathBuf,
    /// Instructor starter code shared by every submission.
    #[arg(long, value_name = "FILE")]
    template: Option<PathBuf>,
}

/// Feature settings. Left unset, detect and eval reuse the values stored in
/// the model file.
#[derive(Args)]
struct FeatureArgs {
    /// Token n-gram length (1..=10).
    #[arg(long, value_name = "N")]
    ngram: Option<usize>,
    /// Token normalization: `normalized` or `text`.
    #[arg(long, value_name = "PROFILE")]
    profile: Option<NormalizationProfile>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// CSV with header `id_a,id_b,label`.
    #[arg(long, value_name = "CSV")]
    labels: PathBuf,
    #[arg(long, value_name = "MODEL")]
    out: PathBuf,
    #[command(flatten)]
    features: FeatureArgs,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Maximum tree depth; unlimited when omitted.
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 1)]
    min_samples_leaf: usize,
    #[arg(long, default_value_t = 2)]
    features_per_split: usize,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, value_name = "MODEL")]
    model: PathBuf,
    /// Report CSV.
    #[arg(long, value_name = "REPORT")]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Write one HTML report per flagged pair into this directory.
    #[arg(long, value_name = "DIR")]
    evidence_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MIN_MATCH)]
    min_match: usize,
    #[command(flatten)]
    features: FeatureArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, value_name = "MODEL")]
    model: PathBuf,
    #[arg(long, value_name = "CSV")]
    labels: PathBuf,
    #[arg(long, conflicts_with = "sweep")]
    threshold: Option<f64>,
    /// Evaluate thresholds 0.00..=1.00 and pick the best one under --target-fpr.
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value_t = DEFAULT_TARGET_FPR)]
    target_fpr: f64,
    /// Machine-readable result.
    #[arg(long, value_name = "FILE", default_value = "eval.json")]
    json: PathBuf,
    #[command(flatten)]
    features: FeatureArgs,
}

#[derive(Args)]
struct EvidenceArgs {
    #[arg(long, value_name = "FILE")]
    a: PathBuf,
    #[arg(long, value_name = "FILE")]
    b: PathBuf,
    #[arg(long, value_name = "FILE")]
    template: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MIN_MATCH)]
    min_match: usize,
    /// Share of a tile that must lie inside template matches to mark it.
    #[arg(long, default_value_t = DEFAULT_OVERLAP_FRACTION)]
    overlap_fraction: f64,
    #[arg(long, value_name = "FILE.html")]
    out: PathBuf,
    #[arg(long, default_value_t = NormalizationProfile::Normalized)]
    profile: NormalizationProfile,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[arg(long, default_value_t = 60)]
    originals: usize,
    #[arg(long, default_value_t = 40)]
    copies: usize,
    /// Comma-separated: rename, comments, insert-comments, delete-comments,
    /// reorder, literals, all.
    #[arg(long, default_value = "all")]
    ops: String,
    /// Mutations applied to each copy.
    #[arg(long, default_value_t = 3)]
    mutations: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

/// Exit 2 for anything the user can fix, 1 for our own failures.
enum Failure {
    Input(String),
    Internal(String),
}

impl From<codeplag::Error> for Failure {
    fn from(e: codeplag::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| input(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load(args: &CorpusArgs) -> Result<Corpus, Failure> {
    let (corpus, warnings) = load_corpus(&args.submissions, args.template.as_deref())?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(corpus)
}

const META_NGRAM: &str = "ngram";
const META_PROFILE: &str = "profile";

fn pipeline_config(args: &FeatureArgs, model: Option<&RandomForestModel>) -> Result<PipelineConfig, Failure> {
    let stored = |key: &str| model.and_then(|m| m.metadata().get(key)).cloned();
    let n = match (args.ngram, stored(META_NGRAM)) {
        (Some(n), _) => n,
        (None, Some(s)) => s
            .parse()
            .map_err(|_| input(format!("model metadata has invalid ngram `{s}`")))?,
        (None, None) => DEFAULT_NGRAM,
    };
    let profile = match (args.profile, stored(META_PROFILE)) {
        (Some(p), _) => p,
        (None, Some(s)) => s.parse().map_err(input)?,
        (None, None) => NormalizationProfile::default(),
    };
    Ok(PipelineConfig {
        ngram: NGramConfig::new(n)?,
        profile,
    })
}

fn check_threshold(name: &str, t: f64) -> CmdResult {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(input(format!("--{name} must be within [0, 1], got {t}")))
    }
}

fn run_train(args: TrainArgs) -> CmdResult {
    let exec = Execution::default();
    let corpus = load(&args.corpus)?;
    let labels = load_labels(&args.labels, &corpus)?;
    let pipeline = pipeline_config(&args.features, None)?;
    let config = TrainConfig {
        num_trees: args.trees,
        max_depth: args.max_depth,
        min_samples_leaf: args.min_samples_leaf,
        features_per_split: args.features_per_split,
        seed: args.seed,
        ..TrainConfig::default()
    };
    config.validate()?;

    let index = SimilarityIndex::build(&corpus, pipeline, exec)?;
    let data = index.labeled_examples(&labels, exec)?;
    let mut model = train_with(&data, &config, exec)?;
    model.set_metadata(META_NGRAM, pipeline.ngram.n().to_string());
    model.set_metadata(META_PROFILE, pipeline.profile.as_str());
    write_file(&args.out, &model.to_json())?;

    let correct = data
        .iter()
        .filter(|e| model.classify(&e.features, DEFAULT_THRESHOLD) == e.label)
        .count();
    println!(
        "trained {} trees on {} pairs ({} plagiarized, {} clean)",
        config.num_trees,
        data.len(),
        labels.count(Label::Plagiarized),
        labels.count(Label::Clean)
    );
    println!("training accuracy: {:.4}", correct as f64 / data.len() as f64);
    println!("model written to {}", args.out.display());
    Ok(())
}

fn run_detect(args: DetectArgs) -> CmdResult {
    check_threshold("threshold", args.threshold)?;
    if args.min_match == 0 {
        return Err(input("--min-match must be at least 1"));
    }
    let exec = Execution::default();
    let model = RandomForestModel::load(&args.model)?;
    let corpus = load(&args.corpus)?;
    let pipeline = pipeline_config(&args.features, Some(&model))?;
    let index = SimilarityIndex::build(&corpus, pipeline, exec)?;
    let rows = detect(&index, &model, args.threshold, exec);
    write_file(&args.out, &rows_to_csv(&rows))?;

    let flagged: Vec<(usize, usize)> = rows
        .iter()
        .filter(|r| r.verdict == Label::Plagiarized)
        .map(|r| (index.index_of(&r.id_a).unwrap(), index.index_of(&r.id_b).unwrap()))
        .collect();
    if let Some(dir) = &args.evidence_dir {
        fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
        let pages = exec.map(&flagged, |&(i, j)| {
            let report = index.evidence(i, j, args.min_match, DEFAULT_OVERLAP_FRACTION);
            render_html(&report, &corpus.submissions[i], &corpus.submissions[j])
                .map(|html| (report_file_name(index.id(i), index.id(j)), html))
        });
        for page in pages {
            let (name, html) = page.map_err(|e| Failure::Internal(e.to_string()))?;
            write_file(&dir.join(name), &html)?;
        }
    }
    println!(
        "scored {} pairs over {} files; {} flagged at threshold {}",
        rows.len(),
        index.len(),
        flagged.len(),
        args.threshold
    );
    Ok(())
}

fn fmt_rate(x: f64) -> String {
    if x.is_nan() {
        "undefined".to_string()
    } else {
        format!("{x:.4}")
    }
}

fn print_report(threshold: f64, r: &EvalReport) {
    println!("threshold            {threshold:.2}");
    println!("                     predicted plag  predicted clean");
    println!("actual plagiarized   {:>14}  {:>15}", r.tp, r.fn_);
    println!("actual clean         {:>14}  {:>15}", r.fp, r.tn);
    println!("balanced accuracy    {}", fmt_rate(r.balanced_accuracy));
    println!("false positive rate  {}", fmt_rate(r.false_positive_rate));
    println!("true positive rate   {}", fmt_rate(r.tpr));
    println!("precision            {}", fmt_rate(r.precision));
}

fn print_sweep(rows: &[SweepRow]) {
    println!("{:>9} {:>6} {:>6} {:>6} {:>6} {:>8} {:>8} {:>8}", "threshold", "tp", "fp", "tn", "fn", "tpr", "fpr", "bal_acc");
    for row in rows {
        let r = &row.report;
        println!(
            "{:>9.2} {:>6} {:>6} {:>6} {:>6} {:>8} {:>8} {:>8}",
            row.threshold,
            r.tp,
            r.fp,
            r.tn,
            r.fn_,
            fmt_rate(r.tpr),
            fmt_rate(r.false_positive_rate),
            fmt_rate(r.balanced_accuracy)
        );
    }
}

fn run_eval(args: EvalArgs) -> CmdResult {
    check_threshold("target-fpr", args.target_fpr)?;
    let threshold = args.threshold.unwrap_or(DEFAULT_THRESHOLD);
    check_threshold("threshold", threshold)?;
    let exec = Execution::default();
    let model = RandomForestModel::load(&args.model)?;
    let corpus = load(&args.corpus)?;
    let labels = load_labels(&args.labels, &corpus)?;
    if labels.count(Label::Plagiarized) == 0 || labels.count(Label::Clean) == 0 {
        return Err(input(format!(
            "{}: labels contain a single class; balanced accuracy is undefined",
            args.labels.display()
        )));
    }
    let pipeline = pipeline_config(&args.features, Some(&model))?;
    let index = SimilarityIndex::build(&corpus, pipeline, exec)?;
    let data = index.labeled_examples(&labels, exec)?;

    let mut extra = serde_json::Map::new();
    let (threshold, report) = if args.sweep {
        let rows = threshold_sweep(&model, &data)?;
        print_sweep(&rows);
        println!();
        let chosen = match select_threshold(&rows, args.target_fpr) {
            Some(row) => {
                println!("best threshold with FPR <= {}: {:.2}", args.target_fpr, row.threshold);
                row
            }
            None => {
                // Fall back to the lowest achievable FPR, preferring higher TPR.
                let row = *rows
                    .iter()
                    .min_by(|a, b| {
                        a.report
                            .false_positive_rate
                            .total_cmp(&b.report.false_positive_rate)
                            .then(b.report.tpr.total_cmp(&a.report.tpr))
                    })
                    .expect("sweep is never empty");
                println!(
                    "no threshold reaches FPR <= {}; using lowest-FPR threshold {:.2}",
                    args.target_fpr, row.threshold
                );
                row
            }
        };
        extra.insert("target_fpr".into(), args.target_fpr.into());
        extra.insert(
            "sweep".into(),
            serde_json::to_value(&rows).map_err(|e| Failure::Internal(e.to_string()))?,
        );
        (chosen.threshold, chosen.report)
    } else {
        (threshold, evaluate(&model, &data, threshold)?)
    };
    print_report(threshold, &report);

    let mut json = match serde_json::to_value(report) {
        Ok(serde_json::Value::Object(map)) => map,
        _ => return Err(Failure::Internal("could not serialize evaluation".into())),
    };
    json.insert("threshold".into(), threshold.into());
    json.extend(extra);
    let text = serde_json::to_string_pretty(&json).map_err(|e| Failure::Internal(e.to_string()))?;
    write_file(&args.json, &(text + "\n"))?;
    Ok(())
}

fn read_source(path: &Path, id: String) -> Result<SourceFile, Failure> {
    let content = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok(SourceFile::new(id, path.display().to_string(), content))
}

fn run_evidence(args: EvidenceArgs) -> CmdResult {
    if args.min_match == 0 {
        return Err(input("--min-match must be at least 1"));
    }
    check_threshold("overlap-fraction", args.overlap_fraction)?;
    let stem = |p: &Path| {
        p.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string())
    };
    let (mut id_a, mut id_b) = (stem(&args.a), stem(&args.b));
    if id_a == id_b {
        id_a = args.a.display().to_string();
        id_b = args.b.display().to_string();
    }
    let a = read_source(&args.a, id_a)?;
    let b = read_source(&args.b, id_b)?;
    let template = match &args.template {
        Some(p) => Some(read_source(p, stem(p))?),
        None => None,
    };

    let sa = stream_of(&a, args.profile);
    let sb = stream_of(&b, args.profile);
    let st = template.as_ref().map(|t| stream_of(t, args.profile));
    let report = build_report(&sa, &sb, st.as_ref(), args.min_match, args.overlap_fraction);
    let html = render_html(&report, &a, &b).map_err(|e| Failure::Internal(e.to_string()))?;
    write_file(&args.out, &html)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "coverage_a: {}", report.coverage_a);
    let _ = writeln!(summary, "coverage_b: {}", report.coverage_b);
    let _ = writeln!(summary, "tiles: {}", report.tiles.len());
    let _ = writeln!(summary, "template tiles: {}", report.template_tiles());
    print!("{summary}");
    Ok(())
}

fn run_synth(args: SynthArgs) -> CmdResult {
    let config = SyntheticConfig {
        num_originals: args.originals,
        num_plagiarized: args.copies,
        mutation_ops: MutationOp::parse_list(&args.ops).map_err(input)?,
        mutations_per_copy: args.mutations,
        seed: args.seed,
    };
    let synth = generate_synthetic(&config)?;
    fs::create_dir_all(&args.out).map_err(|e| input(format!("{}: {e}", args.out.display())))?;
    for file in &synth.corpus.submissions {
        write_file(&args.out.join(format!("{}.pde", file.id)), &file.content)?;
    }
    if let Some(t) = &synth.corpus.template {
        write_file(&args.out.join("template").join("starter.pde"), &t.content)?;
    }
    let labels_path = args.out.join("labels.csv");
    save_labels(&synth.labels, &labels_path)?;
    println!(
        "wrote {} files and {} labels ({} plagiarized) to {}",
        synth.corpus.len(),
        synth.labels.len(),
        synth.labels.count(Label::Plagiarized),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => run_train(a),
        Command::Detect(a) => run_detect(a),
        Command::Eval(a) => run_eval(a),
        Command::Evidence(a) => run_evidence(a),
        Command::Synth(a) => run_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
