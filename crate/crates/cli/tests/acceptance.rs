//! Acceptance suite: one PASS/FAIL line per criterion. Run with
//! `cargo test -p codeplag-cli --test acceptance` (add `--release` for
//! representative timings).

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use codeplag::corpus::{load_corpus, load_labels, save_labels};
use codeplag::evidence::greedy_string_tiling;
use codeplag::forest::{train, train_with, EvalReport, Label, LabeledExample, Node, TrainConfig};
use codeplag::lexer::{ByteSpan, NormalizedStream};
use codeplag::pipeline::{PipelineConfig, SimilarityIndex};
use codeplag::rng::SplitMix64;
use codeplag::synth::{generate_synthetic, MutationOp, SyntheticConfig};
use codeplag::vectorspace::{cosine, fit_tfidf, SparseVector, TermCounts};
use codeplag::{Execution, PairFeatures, SourceFile};
use codeplag_oracles::{best_gini_split, dense_cosine, dense_tfidf, longest_common_substring};

type Check = Result<String, String>;

// Written as `!cond` on purpose so that a NaN metric fails the check.
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const BIN: &str = env!("CARGO_BIN_EXE_codeplag");

fn run(cwd: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(BIN)
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "`codeplag {}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

/// Runs the binary to completion and reports wall time and peak RSS (bytes)
/// for that one child.
fn run_measured(cwd: &Path, args: &[&str]) -> Result<(Duration, u64), String> {
    let start = Instant::now();
    let child = Command::new(BIN)
        .args(args)
        .current_dir(cwd)
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| format!("spawn: {e}"))?;
    let pid = child.id() as libc::pid_t;
    let mut status = 0;
    // SAFETY: rusage is plain data; wait4 fills it for our own child.
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    let rc = unsafe { libc::wait4(pid, &mut status, 0, &mut usage) };
    let elapsed = start.elapsed();
    std::mem::forget(child);
    ensure!(rc == pid, "wait4 failed");
    ensure!(
        libc::WIFEXITED(status) && libc::WEXITSTATUS(status) == 0,
        "`codeplag {}` failed with status {status}",
        args.join(" ")
    );
    // ru_maxrss is in kilobytes on Linux.
    Ok((elapsed, usage.ru_maxrss as u64 * 1024))
}

struct Workspace {
    _tmp: tempfile::TempDir,
    root: PathBuf,
}

impl Workspace {
    fn new() -> Self {
        let tmp = tempfile::TempDir::new().expect("temp dir");
        let root = tmp.path().to_path_buf();
        Workspace { _tmp: tmp, root }
    }

    fn path(&self, rel: &str) -> String {
        self.root.join(rel).display().to_string()
    }
}

/// The synthetic end-to-end run shared by criteria 1, 2 and 8.
struct Trained {
    corpus: String,
    template: String,
    model: String,
}

fn synth_and_train(ws: &Workspace) -> Result<(Trained, String, f64), String> {
    let start = Instant::now();
    let corpus = ws.path("synth");
    run(&ws.root, &["synth", "--out", &corpus, "--originals", "60", "--copies", "40", "--ops", "all", "--seed", "7"])?;
    let template = ws.path("synth/template/starter.pde");

    let (loaded, _) = load_corpus(Path::new(&corpus), Some(Path::new(&template))).map_err(|e| e.to_string())?;
    let labels = load_labels(&ws.root.join("synth/labels.csv"), &loaded).map_err(|e| e.to_string())?;
    let (train_set, test_set) = labels.split(0.7, 7);
    save_labels(&train_set, &ws.root.join("train.csv")).map_err(|e| e.to_string())?;
    save_labels(&test_set, &ws.root.join("test.csv")).map_err(|e| e.to_string())?;

    let model = ws.path("model.json");
    run(&ws.root, &[
        "train", "--submissions", &corpus, "--template", &template,
        "--labels", &ws.path("train.csv"), "--out", &model, "--seed", "42",
    ])?;
    run(&ws.root, &[
        "eval", "--submissions", &corpus, "--template", &template, "--model", &model,
        "--labels", &ws.path("test.csv"), "--sweep", "--target-fpr", "0.01", "--json", &ws.path("eval.json"),
    ])?;
    let json: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(ws.root.join("eval.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let summary = format!(
        "threshold {} bal_acc {} fpr {} (train {} pairs, test {} pairs / {} plagiarized)",
        json["threshold"], json["balanced_accuracy"], json["false_positive_rate"],
        train_set.len(), test_set.len(), test_set.count(Label::Plagiarized)
    );
    let bal = json["balanced_accuracy"].as_f64().ok_or("balanced_accuracy missing")?;
    let fpr = json["false_positive_rate"].as_f64().ok_or("false_positive_rate missing")?;
    let secs = start.elapsed().as_secs_f64();
    ensure!(bal >= 0.90, "balanced accuracy {bal} < 0.90; {summary}");
    ensure!(fpr <= 0.02, "FPR {fpr} > 0.02; {summary}");
    Ok((Trained { corpus, template, model }, summary, secs))
}

fn ac1(ws: &Workspace, state: &mut Option<Trained>) -> Check {
    let (trained, summary, secs) = synth_and_train(ws)?;
    *state = Some(trained);
    ensure!(secs <= 60.0, "took {secs:.1}s > 60s");
    Ok(format!("{summary}; {secs:.1}s"))
}

fn ac2(ws: &Workspace, trained: Option<&Trained>) -> Check {
    let trained = trained.ok_or("needs the model from criterion 1")?;
    let corpus = ws.path("large");
    run(&ws.root, &["synth", "--out", &corpus, "--originals", "331", "--copies", "100", "--seed", "11"])?;
    let files = fs::read_dir(&corpus)
        .map_err(|e| e.to_string())?
        .filter(|e| e.as_ref().is_ok_and(|e| e.path().extension().is_some_and(|x| x == "pde")))
        .count();
    ensure!(files == 431, "expected 431 files, found {files}");

    let report = ws.path("large_report.csv");
    let (elapsed, rss) = run_measured(&ws.root, &[
        "detect", "--submissions", &corpus, "--template", &ws.path("large/template/starter.pde"),
        "--model", &trained.model, "--out", &report, "--evidence-dir", &ws.path("large_evidence"),
    ])?;
    let rows = fs::read_to_string(&report).map_err(|e| e.to_string())?.lines().count() - 1;
    ensure!(rows == 92_665, "report has {rows} rows, expected 92665");
    let mib = rss as f64 / (1024.0 * 1024.0);
    ensure!(elapsed.as_secs_f64() <= 120.0, "detect took {:.1}s", elapsed.as_secs_f64());
    ensure!(rss <= 1 << 30, "peak RSS {mib:.0} MiB > 1 GiB");
    Ok(format!("{rows} pairs in {:.1}s, peak RSS {mib:.0} MiB", elapsed.as_secs_f64()))
}

fn ac3() -> Check {
    let mut rng = SplitMix64::new(3);
    let mut weights = 0usize;
    for case in 0..500 {
        let num_docs = rng.range_inclusive(1, 5);
        let docs: Vec<Vec<(String, u32)>> = (0..num_docs)
            .map(|_| {
                let mut terms = BTreeMap::new();
                for _ in 0..rng.below(9) {
                    terms.insert(format!("t{}", rng.below(20)), rng.range_inclusive(1, 5) as u32);
                }
                terms.into_iter().collect()
            })
            .collect();
        let counts: Vec<TermCounts> = docs.iter().map(|d| d.iter().cloned().collect::<HashMap<_, _>>()).collect();
        let model = fit_tfidf(&counts).map_err(|e| e.to_string())?;
        let vectors: Vec<SparseVector> = counts.iter().map(|c| model.transform(c)).collect();
        let (vocab, dense) = dense_tfidf(&docs);
        ensure!(model.vocab().len() == vocab.len(), "case {case}: vocabulary size differs");
        for (d, (row, v)) in dense.iter().zip(&vectors).enumerate() {
            for (term, &want) in vocab.iter().zip(row) {
                let id = model.vocab().id(term).ok_or(format!("case {case}: `{term}` missing"))?;
                let got = v.get(id);
                ensure!((got - want).abs() <= 1e-9, "case {case} doc {d} term {term}: {got} vs {want}");
                weights += 1;
            }
        }
        for i in 0..num_docs {
            for j in 0..num_docs {
                let (got, want) = (cosine(&vectors[i], &vectors[j]), dense_cosine(&dense[i], &dense[j]));
                ensure!((got - want).abs() <= 1e-9, "case {case} cosine({i},{j}): {got} vs {want}");
            }
        }
    }
    Ok(format!("500 corpora, {weights} weights within 1e-9"))
}

fn random_vector(rng: &mut SplitMix64) -> SparseVector {
    let mut entries = BTreeMap::new();
    for _ in 0..rng.range_inclusive(1, 40) {
        entries.insert(rng.below(60) as u32, 1e-3 + 10.0 * rng.next_f64());
    }
    SparseVector::normalized(entries.into_iter().collect())
}

fn ac4() -> Check {
    let mut rng = SplitMix64::new(4);
    let vectors: Vec<SparseVector> = (0..1000).map(|_| random_vector(&mut rng)).collect();
    let mut pairs = 0;
    for (i, a) in vectors.iter().enumerate() {
        let self_sim = cosine(a, a);
        ensure!((self_sim - 1.0).abs() <= 1e-9, "vector {i}: self-similarity {self_sim}");
        for k in 1..=3 {
            let b = &vectors[(i + k * 7) % vectors.len()];
            let (ab, ba) = (cosine(a, b), cosine(b, a));
            ensure!(ab == ba, "vector {i}: cosine not symmetric ({ab} vs {ba})");
            ensure!((0.0..=1.0).contains(&ab), "vector {i}: cosine {ab} outside [0, 1]");
            pairs += 1;
        }
    }
    ensure!(cosine(&SparseVector::empty(), &vectors[0]) == 0.0, "empty vector similarity is not 0");
    Ok(format!("1000 vectors, {pairs} pairs"))
}

fn example(f: [f64; 3], plag: bool) -> LabeledExample {
    LabeledExample::new(PairFeatures::from(f), if plag { Label::Plagiarized } else { Label::Clean })
}

fn margin_data(n: usize, seed: u64) -> Vec<LabeledExample> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| {
            let plag = rng.chance(0.3);
            let sim_ab = if plag { 0.75 + 0.25 * rng.next_f64() } else { 0.45 * rng.next_f64() };
            example([sim_ab, rng.next_f64(), rng.next_f64()], plag)
        })
        .collect()
}

fn ac5() -> Check {
    // (a) root split against the exhaustive Gini minimizer.
    let mut rng = SplitMix64::new(5);
    let mut datasets = 0;
    while datasets < 200 {
        let n = rng.range_inclusive(2, 6);
        let rows: Vec<([f64; 3], bool)> = (0..n)
            .map(|_| ([0, 1, 2].map(|_| rng.below(9) as f64 / 8.0), rng.chance(0.5)))
            .collect();
        let pos = rows.iter().filter(|r| r.1).count();
        if pos == 0 || pos == n {
            continue;
        }
        datasets += 1;
        let data: Vec<_> = rows.iter().map(|&(f, p)| example(f, p)).collect();
        let config = TrainConfig { num_trees: 1, features_per_split: 3, bootstrap: false, ..TrainConfig::default() };
        let model = train(&data, &config).map_err(|e| e.to_string())?;
        let root = model.trees()[0].nodes[0];
        match (best_gini_split(&rows, 1), root) {
            (None, Node::Leaf { .. }) => {}
            (Some((f, t)), Node::Split { feature, threshold, .. })
                if f == feature && (t - threshold).abs() < 1e-12 => {}
            (want, got) => return Err(format!("dataset {rows:?}: oracle {want:?}, forest root {got:?}")),
        }
    }

    // (b) training accuracy on separable data.
    let data = margin_data(600, 55);
    let config = TrainConfig::default();
    let model = train(&data, &config).map_err(|e| e.to_string())?;
    let correct = data.iter().filter(|e| model.classify(&e.features, 0.5) == e.label).count();
    let accuracy = correct as f64 / data.len() as f64;
    ensure!(accuracy >= 0.99, "training accuracy {accuracy}");

    // (c) byte-identical models: repeated, and across pool sizes.
    let first = train(&data, &config).map_err(|e| e.to_string())?.to_json();
    let second = train(&data, &config).map_err(|e| e.to_string())?.to_json();
    ensure!(first == second, "two runs with the same seed differ");
    let in_pool = |threads: usize| -> Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        pool.install(|| train_with(&data, &config, Execution::Parallel))
            .map(|m| m.to_json())
            .map_err(|e| e.to_string())
    };
    ensure!(in_pool(1)? == first, "1-thread model differs");
    ensure!(in_pool(8)? == first, "8-thread model differs");
    Ok(format!("200 Gini oracles agree; training accuracy {accuracy:.4}; models identical (x2, 1 vs 8 threads)"))
}

fn stream(symbols: &[u32]) -> NormalizedStream {
    NormalizedStream {
        source_id: "s".into(),
        symbols: symbols.iter().map(|s| s.to_string()).collect(),
        origins: (0..symbols.len()).map(|i| ByteSpan::new(i, i + 1)).collect(),
    }
}

/// Maximal runs of `false` in a mark vector.
fn unmarked_runs(marks: &[bool]) -> Vec<std::ops::Range<usize>> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &m) in marks.iter().chain([&true]).enumerate() {
        match (m, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                runs.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    runs
}

fn ac6() -> Check {
    let mut rng = SplitMix64::new(6);
    let mut tiles_seen = 0;
    for case in 0..300 {
        let alphabet = rng.range_inclusive(2, 5) as u32;
        let gen = |rng: &mut SplitMix64| -> Vec<u32> {
            (0..rng.range_inclusive(0, 200)).map(|_| rng.below(alphabet as usize) as u32).collect()
        };
        let (a, b) = (gen(&mut rng), gen(&mut rng));
        let min_match = if case % 2 == 0 { 1 } else { rng.range_inclusive(2, 6) };
        let tiles = greedy_string_tiling(&stream(&a), &stream(&b), min_match);
        tiles_seen += tiles.len();

        let (mut ma, mut mb) = (vec![false; a.len()], vec![false; b.len()]);
        for t in &tiles {
            ensure!(t.length >= min_match, "case {case}: tile shorter than min_match");
            ensure!(a[t.a_range()] == b[t.b_range()], "case {case}: tile {t:?} is not verbatim");
            for i in t.a_range() {
                ensure!(!ma[i], "case {case}: tiles overlap in a at {i}");
                ma[i] = true;
            }
            for i in t.b_range() {
                ensure!(!mb[i], "case {case}: tiles overlap in b at {i}");
                mb[i] = true;
            }
        }
        // Greedy picks the longest run first.
        let longest = tiles.iter().map(|t| t.length).max().unwrap_or(0);
        let lcs = longest_common_substring(&a, &b);
        let expected = if lcs >= min_match { lcs } else { 0 };
        ensure!(longest == expected, "case {case}: first tile {longest}, LCS oracle {lcs}");
        // Nothing of length >= min_match is left untiled.
        for ra in unmarked_runs(&ma) {
            for rb in unmarked_runs(&mb) {
                let rest = longest_common_substring(&a[ra.clone()], &b[rb]);
                ensure!(rest < min_match, "case {case}: untiled common run of length {rest}");
            }
        }
    }
    Ok(format!("300 pairs, {tiles_seen} tiles"))
}

const GAME: &str = r#"int score = 0;
float ballX = 200, ballY = 100;
String banner = "Score: ";

void setup() {
  size(400, 400);
}

void draw() {
  background(30);
  for (int i = 0; i < 5; i++) {
    rect(i * 80, 380, 60, 10);
  }
  if (ballY > height) {
    score = score + 1;
    ballY = 0;
  }
  text(banner + score, 10, 20);
  ellipse(ballX, ballY, 16, 16);
  ballY += 3.5;
}
"#;

fn ac7() -> Check {
    let renamed = GAME
        .replace("score", "pts")
        .replace("ballX", "px")
        .replace("ballY", "py")
        .replace("banner", "label");
    let commented: String = GAME
        .lines()
        .map(|l| format!("{l} // note\n/* block {l:?} */\n"))
        .collect();
    let corpus = codeplag::corpus::Corpus::new(
        vec![
            SourceFile::inline("original", GAME),
            SourceFile::inline("renamed", renamed),
            SourceFile::inline("commented", commented),
        ],
        None,
    )
    .map_err(|e| e.to_string())?;
    let index = SimilarityIndex::build(&corpus, PipelineConfig::default(), Execution::default()).map_err(|e| e.to_string())?;
    for i in 0..3 {
        for j in i + 1..3 {
            let s = index.pair_features(i, j).sim_ab;
            ensure!((s - 1.0).abs() <= 1e-9, "{} vs {}: sim_ab {s}", index.id(i), index.id(j));
        }
    }

    // Same property on generated programs, one mutation kind at a time.
    let mut checked = 3;
    for op in [MutationOp::RenameIdentifiers, MutationOp::InsertComments] {
        let synth = generate_synthetic(&SyntheticConfig {
            num_originals: 20,
            num_plagiarized: 20,
            mutation_ops: vec![op],
            ..SyntheticConfig::default()
        })
        .map_err(|e| e.to_string())?;
        let index = SimilarityIndex::build(&synth.corpus, PipelineConfig::default(), Execution::default())
            .map_err(|e| e.to_string())?;
        for (copy, origin) in &synth.provenance {
            let (i, j) = (index.index_of(copy).unwrap(), index.index_of(origin).unwrap());
            let s = index.pair_features(i, j).sim_ab;
            ensure!((s - 1.0).abs() <= 1e-9, "{op:?} copy {copy} of {origin}: sim_ab {s}");
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs at sim_ab = 1 within 1e-9"))
}

/// Parses `html` strictly and checks mark count and that each pane's text
/// decodes back to the source verbatim.
fn check_page(html: &str, tiles: usize, a: &str, b: &str) -> Result<(), String> {
    let doc = roxmltree::Document::parse_with_options(
        html,
        roxmltree::ParsingOptions { allow_dtd: true, ..Default::default() },
    )
    .map_err(|e| format!("not well-formed: {e}"))?;
    let marks = doc
        .descendants()
        .filter(|n| n.has_tag_name("mark") && n.attribute("class").is_some_and(|c| c.split(' ').any(|x| x == "tile")))
        .count();
    ensure!(marks == 2 * tiles, "{marks} highlight elements for {tiles} tiles");
    let panes: Vec<String> = doc
        .descendants()
        .filter(|n| n.has_tag_name("code"))
        .map(|n| n.descendants().filter(|d| d.is_text()).filter_map(|d| d.text()).collect())
        .collect();
    ensure!(panes.len() == 2, "expected 2 code panes, found {}", panes.len());
    ensure!(panes[0] == a && panes[1] == b, "pane text does not round-trip to the source");
    Ok(())
}

fn ac8(ws: &Workspace, trained: Option<&Trained>) -> Check {
    let trained = trained.ok_or("needs the model from criterion 1")?;
    let evidence = ws.path("evidence");
    run(&ws.root, &[
        "detect", "--submissions", &trained.corpus, "--template", &trained.template,
        "--model", &trained.model, "--out", &ws.path("report.csv"), "--evidence-dir", &evidence,
    ])?;
    let (corpus, _) = load_corpus(Path::new(&trained.corpus), Some(Path::new(&trained.template))).map_err(|e| e.to_string())?;
    let index = SimilarityIndex::build(&corpus, PipelineConfig::default(), Execution::default()).map_err(|e| e.to_string())?;
    let report = fs::read_to_string(ws.root.join("report.csv")).map_err(|e| e.to_string())?;
    let flagged: Vec<(String, String)> = report
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(",plagiarized"))
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().to_string(), f.next().unwrap().to_string())
        })
        .collect();
    ensure!(!flagged.is_empty(), "no flagged pairs to check");
    let pages = fs::read_dir(&evidence).map_err(|e| e.to_string())?.count();
    ensure!(pages == flagged.len(), "{pages} pages for {} flagged pairs", flagged.len());
    let mut total_tiles = 0;
    for (a, b) in &flagged {
        let (i, j) = (index.index_of(a).unwrap(), index.index_of(b).unwrap());
        let tiles = index.evidence(i, j, 8, 0.8).tiles.len();
        total_tiles += tiles;
        let html = fs::read_to_string(Path::new(&evidence).join(format!("{a}__{b}.html"))).map_err(|e| e.to_string())?;
        check_page(&html, tiles, &corpus.submissions[i].content, &corpus.submissions[j].content)
            .map_err(|e| format!("{a}__{b}.html: {e}"))?;
    }

    // Hostile source text through the single-pair command.
    let nasty = "void setup() {\n  String s = \"</code></pre><script>alert('x')</script> & &amp; ]]> <!-- \";\n  char c = '<';\n  if (a < b && b > c) { println(\"\\\"quoted\\\" é ✓\"); }\n}\n";
    fs::write(ws.root.join("x.pde"), nasty).map_err(|e| e.to_string())?;
    fs::write(ws.root.join("y.pde"), format!("// copy\n{nasty}")).map_err(|e| e.to_string())?;
    let out = run(&ws.root, &["evidence", "--a", "x.pde", "--b", "y.pde", "--min-match", "4", "--out", "xy.html"])?;
    let tiles: usize = out
        .lines()
        .find_map(|l| l.strip_prefix("tiles: "))
        .and_then(|v| v.trim().parse().ok())
        .ok_or("evidence did not print a tile count")?;
    ensure!(tiles > 0, "hostile pair produced no tiles");
    let html = fs::read_to_string(ws.root.join("xy.html")).map_err(|e| e.to_string())?;
    check_page(&html, tiles, nasty, &format!("// copy\n{nasty}")).map_err(|e| format!("xy.html: {e}"))?;
    Ok(format!("{} pages ({total_tiles} tiles) + hostile pair well-formed and escaped", flagged.len()))
}

fn ac9() -> Check {
    let mut rng = SplitMix64::new(9);
    for case in 0..100 {
        let n = rng.range_inclusive(2, 400);
        let predictions: Vec<(Label, Label)> = (0..n)
            .map(|_| {
                let truth = if rng.chance(0.3) { Label::Plagiarized } else { Label::Clean };
                let guess = if rng.chance(0.5) { Label::Plagiarized } else { Label::Clean };
                (truth, guess)
            })
            .collect();
        let report = EvalReport::from_predictions(predictions.iter().copied());
        let again = EvalReport::from_counts(report.tp, report.fp, report.tn, report.fn_);
        let same = |x: f64, y: f64| x.to_bits() == y.to_bits();
        ensure!(same(again.balanced_accuracy, report.balanced_accuracy), "case {case}: balanced accuracy differs");
        ensure!(same(again.false_positive_rate, report.false_positive_rate), "case {case}: FPR differs");

        let (tp, fp, tn, fn_) = (report.tp as f64, report.fp as f64, report.tn as f64, report.fn_ as f64);
        let fpr = if fp + tn == 0.0 { f64::NAN } else { fp / (fp + tn) };
        let bal = (tp / (tp + fn_) + tn / (tn + fp)) / 2.0;
        ensure!(same(report.false_positive_rate, fpr), "case {case}: FPR {} vs {fpr}", report.false_positive_rate);
        ensure!(same(report.balanced_accuracy, bal), "case {case}: balanced accuracy {} vs {bal}", report.balanced_accuracy);
        ensure!(report.total() == n as u64, "case {case}: counts do not sum to {n}");
    }
    Ok("100 confusion matrices".into())
}

fn guarded(f: impl FnOnce() -> Check) -> Check {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let ws = Workspace::new();
    let mut trained = None;
    let results: Vec<(u8, &str, Check)> = vec![
        (1, "synthetic end-to-end", guarded(|| ac1(&ws, &mut trained))),
        (2, "431-file throughput", guarded(|| ac2(&ws, trained.as_ref()))),
        (3, "TF-IDF/cosine oracle", guarded(ac3)),
        (4, "cosine properties", guarded(ac4)),
        (5, "forest correctness", guarded(ac5)),
        (6, "tiling soundness and maximality", guarded(ac6)),
        (7, "rename/comment invariance", guarded(ac7)),
        (8, "evidence report", guarded(|| ac8(&ws, trained.as_ref()))),
        (9, "metrics identities", guarded(ac9)),
    ];
    let mut failed = 0;
    for (id, name, result) in &results {
        match result {
            Ok(detail) => println!("PASS {id} {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id} {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
