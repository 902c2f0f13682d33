//! Random-forest classifier over [`PairFeatures`] and the evaluation
//! metrics used to judge it.
//!
//! Trees are CART classifiers grown on bootstrap samples with Gini impurity.
//! All randomness comes from one splitmix64 stream per tree, seeded with
//! `seed ^ tree_index`, so a model is a pure function of the training data
//! order and the [`TrainConfig`], no matter how many threads build it.
//!
//! Per tree, the stream is consumed in this order:
//!
//! 1. `n` bootstrap draws `below(n)` (skipped when bootstrapping is off);
//! 2. for every node that is not stopped early (pure, at `max_depth`, or
//!    smaller than `2 * min_samples_leaf`), a partial Fisher-Yates pass
//!    picking `features_per_split` of the 3 features. Nodes are visited
//!    depth first, left child before right.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::features::{PairFeatures, FEATURE_NAMES};
use crate::rng::SplitMix64;

pub const FORMAT_VERSION: u64 = 1;
pub const NUM_FEATURES: usize = 3;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_TARGET_FPR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Clean,
    Plagiarized,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Clean => "clean",
            Label::Plagiarized => "plagiarized",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "clean" => Ok(Label::Clean),
            "plagiarized" => Ok(Label::Plagiarized),
            other => Err(format!(
                "unknown label `{other}` (expected plagiarized|clean)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: PairFeatures,
    pub label: Label,
}

impl LabeledExample {
    pub fn new(features: PairFeatures, label: Label) -> Self {
        LabeledExample { features, label }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub num_trees: usize,
    /// `None` grows trees until the other stopping rules apply.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: usize,
    pub seed: u64,
    /// Draw a bootstrap sample per tree. Off means every tree sees the
    /// training set as given.
    #[serde(default = "default_bootstrap")]
    pub bootstrap: bool,
}

fn default_bootstrap() -> bool {
    true
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            num_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: 2,
            seed: 42,
            bootstrap: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_trees == 0 {
            return Err(Error::InvalidConfig("num_trees must be at least 1".into()));
        }
        if !(1..=NUM_FEATURES).contains(&self.features_per_split) {
            return Err(Error::InvalidConfig(format!(
                "features_per_split must be in 1..=3, got {}",
                self.features_per_split
            )));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::InvalidConfig(
                "min_samples_leaf must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    /// Samples with `feature <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf { clean: u32, plag: u32 },
}

/// Flat node array; node 0 is the root and children always have larger
/// indices than their parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    fn leaf_for(&self, x: &PairFeatures) -> (u32, u32) {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x.get(feature) <= threshold { left } else { right },
                Node::Leaf { clean, plag } => return (clean, plag),
            }
        }
    }

    /// 2 for a plagiarized vote, 1 for a tied leaf, 0 for clean.
    pub fn half_votes(&self, x: &PairFeatures) -> u32 {
        let (clean, plag) = self.leaf_for(x);
        match plag.cmp(&clean) {
            Ordering::Greater => 2,
            Ordering::Equal => 1,
            Ordering::Less => 0,
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, at: usize) -> usize {
            match t.nodes[at] {
                Node::Split { left, right, .. } => 1 + walk(t, left).max(walk(t, right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(self, 0)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Format("tree has no nodes".into()));
        }
        let mut referenced = vec![false; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Split {
                feature,
                threshold,
                left,
                right,
            } = *node
            {
                if feature >= NUM_FEATURES {
                    return Err(Error::Format(format!("node {i}: feature index {feature}")));
                }
                if !threshold.is_finite() {
                    return Err(Error::Format(format!("node {i}: non-finite threshold")));
                }
                for child in [left, right] {
                    if child <= i || child >= self.nodes.len() || referenced[child] {
                        return Err(Error::Format(format!("node {i}: bad child index {child}")));
                    }
                    referenced[child] = true;
                }
            }
        }
        if referenced.iter().skip(1).any(|r| !r) {
            return Err(Error::Format("tree has unreachable nodes".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForestModel {
    config: TrainConfig,
    trees: Vec<DecisionTree>,
    metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u64,
    config: TrainConfig,
    feature_names: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    trees: Vec<DecisionTree>,
}

/// Exact comparison key for a candidate split. Minimizing weighted Gini is
/// the same as maximizing `sq_l / n_l + sq_r / n_r` where `sq` is the sum of
/// squared class counts on a side; comparing the fractions by
/// cross-multiplication keeps ties exact.
#[derive(Debug, Clone, Copy)]
struct SplitScore {
    num: u128,
    den: u128,
}

impl SplitScore {
    fn new(left: (u64, u64), right: (u64, u64)) -> Self {
        let (cl, pl) = left;
        let (cr, pr) = right;
        let (nl, nr) = ((cl + pl) as u128, (cr + pr) as u128);
        let sq_l = (cl * cl + pl * pl) as u128;
        let sq_r = (cr * cr + pr * pr) as u128;
        SplitScore {
            num: sq_l * nr + sq_r * nl,
            den: nl * nr,
        }
    }

    fn better_than(&self, other: &SplitScore) -> bool {
        self.num * other.den > other.num * self.den
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Split {
    feature: usize,
    threshold: f64,
}

/// Midpoint that still separates `lo` from `hi` under `x <= t`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid < hi {
        mid
    } else {
        lo
    }
}

fn class_counts(data: &[LabeledExample], idx: &[usize]) -> (u64, u64) {
    idx.iter().fold((0, 0), |(c, p), &i| match data[i].label {
        Label::Clean => (c + 1, p),
        Label::Plagiarized => (c, p + 1),
    })
}

/// Best split over `features` (visited in the given order) for the samples
/// `idx`, or `None` when no threshold leaves `min_leaf` samples on each side.
fn best_split(
    data: &[LabeledExample],
    idx: &[usize],
    features: &[usize],
    min_leaf: usize,
) -> Option<Split> {
    let (total_clean, total_plag) = class_counts(data, idx);
    let n = idx.len();
    let mut best: Option<(SplitScore, Split)> = None;
    let mut sorted: Vec<(f64, Label)> = Vec::with_capacity(n);

    for &feature in features {
        sorted.clear();
        sorted.extend(idx.iter().map(|&i| (data[i].features.get(feature), data[i].label)));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

        let (mut cl, mut pl) = (0u64, 0u64);
        for k in 0..n - 1 {
            match sorted[k].1 {
                Label::Clean => cl += 1,
                Label::Plagiarized => pl += 1,
            }
            let (lo, hi) = (sorted[k].0, sorted[k + 1].0);
            if lo == hi {
                continue;
            }
            let left_n = k + 1;
            if left_n < min_leaf || n - left_n < min_leaf {
                continue;
            }
            let score = SplitScore::new((cl, pl), (total_clean - cl, total_plag - pl));
            if best.as_ref().is_none_or(|(s, _)| score.better_than(s)) {
                best = Some((
                    score,
                    Split {
                        feature,
                        threshold: midpoint(lo, hi),
                    },
                ));
            }
        }
    }
    best.map(|(_, s)| s)
}

fn grow_tree(data: &[LabeledExample], config: &TrainConfig, tree_index: u64) -> DecisionTree {
    let mut rng = SplitMix64::for_stream(config.seed, tree_index);
    let n = data.len();
    let sample: Vec<usize> = if config.bootstrap {
        (0..n).map(|_| rng.below(n)).collect()
    } else {
        (0..n).collect()
    };

    let mut nodes = vec![Node::Leaf { clean: 0, plag: 0 }];
    let mut stack = vec![(0usize, sample, 0usize)];
    while let Some((id, idx, depth)) = stack.pop() {
        let (clean, plag) = class_counts(data, &idx);
        let leaf = Node::Leaf {
            clean: clean as u32,
            plag: plag as u32,
        };
        let stop = clean == 0
            || plag == 0
            || config.max_depth.is_some_and(|d| depth >= d)
            || idx.len() < 2 * config.min_samples_leaf;
        if stop {
            nodes[id] = leaf;
            continue;
        }

        let mut features = rng.sample_indices(NUM_FEATURES, config.features_per_split);
        features.sort_unstable();
        let Some(split) = best_split(data, &idx, &features, config.min_samples_leaf) else {
            nodes[id] = leaf;
            continue;
        };

        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| data[i].features.get(split.feature) <= split.threshold);
        let left = nodes.len();
        let right = left + 1;
        nodes.push(leaf);
        nodes.push(leaf);
        nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        stack.push((right, right_idx, depth + 1));
        stack.push((left, left_idx, depth + 1));
    }
    DecisionTree { nodes }
}

pub fn train(data: &[LabeledExample], config: &TrainConfig) -> Result<RandomForestModel> {
    train_with(data, config, Execution::default())
}

/// Trees are independent, so `exec` only changes wall-clock time.
pub fn train_with(
    data: &[LabeledExample],
    config: &TrainConfig,
    exec: Execution,
) -> Result<RandomForestModel> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let all: Vec<usize> = (0..data.len()).collect();
    let (clean, plag) = class_counts(data, &all);
    if clean == 0 || plag == 0 {
        return Err(Error::SingleClassData);
    }
    let trees = exec.map_range(0..config.num_trees, |t| grow_tree(data, config, t as u64));
    Ok(RandomForestModel {
        config: *config,
        trees,
        metadata: BTreeMap::new(),
    })
}

impl RandomForestModel {
    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Free-form string pairs stored alongside the trees, e.g. the feature
    /// extraction settings the model was trained with. Ignored by prediction.
    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn set_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.insert(key.into(), value.into());
    }

    /// Fraction of trees voting plagiarized; a tied leaf counts half a vote.
    /// Always a multiple of `0.5 / num_trees`.
    pub fn predict_proba(&self, x: &PairFeatures) -> f64 {
        let half: u64 = self.trees.iter().map(|t| t.half_votes(x) as u64).sum();
        half as f64 / (2 * self.trees.len()) as f64
    }

    pub fn classify(&self, x: &PairFeatures, threshold: f64) -> Label {
        classify_proba(self.predict_proba(x), threshold)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            config: self.config,
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            metadata: self.metadata.clone(),
            trees: self.trees.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("invalid JSON: {e}")))?;
        match value.get("format_version") {
            Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::Format(format!(
                    "unsupported format version {v} (expected {FORMAT_VERSION})"
                )))
            }
            None => return Err(Error::Format("missing format_version".into())),
        }
        let file: ModelFile =
            serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?;
        if file.feature_names != FEATURE_NAMES {
            return Err(Error::Format(format!(
                "unexpected feature names {:?}",
                file.feature_names
            )));
        }
        file.config
            .validate()
            .map_err(|e| Error::Format(e.to_string()))?;
        if file.trees.len() != file.config.num_trees {
            return Err(Error::Format(format!(
                "config says {} trees, file has {}",
                file.config.num_trees,
                file.trees.len()
            )));
        }
        for tree in &file.trees {
            tree.validate()?;
        }
        Ok(RandomForestModel {
            config: file.config,
            trees: file.trees,
            metadata: file.metadata,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Plagiarized iff `proba >= threshold`.
pub fn classify_proba(proba: f64, threshold: f64) -> Label {
    if proba >= threshold {
        Label::Plagiarized
    } else {
        Label::Clean
    }
}

/// Confusion counts and the rates derived from them. Rates whose
/// denominator is zero are NaN; see [`EvalReport::undefined_rates`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tpr: f64,
    pub tnr: f64,
    pub balanced_accuracy: f64,
    pub false_positive_rate: f64,
    pub precision: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    pub fn from_counts(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        let tpr = ratio(tp, tp + fn_);
        let tnr = ratio(tn, tn + fp);
        EvalReport {
            tp,
            fp,
            tn,
            fn_,
            tpr,
            tnr,
            balanced_accuracy: (tpr + tnr) / 2.0,
            false_positive_rate: ratio(fp, fp + tn),
            precision: ratio(tp, tp + fp),
        }
    }

    pub fn from_predictions(pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
        for (truth, predicted) in pairs {
            match (truth, predicted) {
                (Label::Plagiarized, Label::Plagiarized) => tp += 1,
                (Label::Clean, Label::Plagiarized) => fp += 1,
                (Label::Clean, Label::Clean) => tn += 1,
                (Label::Plagiarized, Label::Clean) => fn_ += 1,
            }
        }
        EvalReport::from_counts(tp, fp, tn, fn_)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Names of rates that could not be computed.
    pub fn undefined_rates(&self) -> Vec<&'static str> {
        [
            ("tpr", self.tpr),
            ("tnr", self.tnr),
            ("balanced_accuracy", self.balanced_accuracy),
            ("false_positive_rate", self.false_positive_rate),
            ("precision", self.precision),
        ]
        .into_iter()
        .filter(|(_, v)| v.is_nan())
        .map(|(name, _)| name)
        .collect()
    }
}

pub fn evaluate(model: &RandomForestModel, data: &[LabeledExample], threshold: f64) -> Result<EvalReport> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(EvalReport::from_predictions(
        data.iter()
            .map(|ex| (ex.label, model.classify(&ex.features, threshold))),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub threshold: f64,
    #[serde(flatten)]
    pub report: EvalReport,
}

/// The 101 thresholds `0.00, 0.01, ..., 1.00`.
pub fn sweep_thresholds() -> impl Iterator<Item = f64> {
    (0..=100).map(|k| k as f64 / 100.0)
}

/// Evaluates every sweep threshold from one pass of forest predictions.
pub fn threshold_sweep(model: &RandomForestModel, data: &[LabeledExample]) -> Result<Vec<SweepRow>> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let scored: Vec<(Label, f64)> = data
        .iter()
        .map(|ex| (ex.label, model.predict_proba(&ex.features)))
        .collect();
    Ok(sweep_scored(&scored))
}

pub fn sweep_scored(scored: &[(Label, f64)]) -> Vec<SweepRow> {
    sweep_thresholds()
        .map(|threshold| SweepRow {
            threshold,
            report: EvalReport::from_predictions(
                scored
                    .iter()
                    .map(|&(truth, p)| (truth, classify_proba(p, threshold))),
            ),
        })
        .collect()
}

/// Highest-recall row with `false_positive_rate <= target_fpr`. Equal recall
/// prefers the lower FPR, then the higher (more conservative) threshold.
pub fn select_threshold(rows: &[SweepRow], target_fpr: f64) -> Option<SweepRow> {
    rows.iter()
        .filter(|r| {
            let fpr = r.report.false_positive_rate;
            !fpr.is_nan() && fpr <= target_fpr && !r.report.tpr.is_nan()
        })
        .max_by(|a, b| {
            a.report
                .tpr
                .total_cmp(&b.report.tpr)
                .then(b.report.false_positive_rate.total_cmp(&a.report.false_positive_rate))
                .then(a.threshold.total_cmp(&b.threshold))
        })
        .copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ex(f: [f64; 3], label: Label) -> LabeledExample {
        LabeledExample::new(f.into(), label)
    }

    fn single_tree() -> TrainConfig {
        TrainConfig {
            num_trees: 1,
            features_per_split: 3,
            bootstrap: false,
            ..TrainConfig::default()
        }
    }

    fn two_examples() -> Vec<LabeledExample> {
        vec![
            ex([0.9, 0.0, 0.0], Label::Plagiarized),
            ex([0.1, 0.0, 0.0], Label::Clean),
        ]
    }

    #[test]
    fn rejects_degenerate_data() {
        let cfg = TrainConfig::default();
        assert!(matches!(train(&[], &cfg), Err(Error::EmptyData)));
        let all_plag = vec![ex([0.9, 0.0, 0.0], Label::Plagiarized); 4];
        assert!(matches!(train(&all_plag, &cfg), Err(Error::SingleClassData)));
    }

    #[test]
    fn rejects_bad_config() {
        let data = two_examples();
        for cfg in [
            TrainConfig { num_trees: 0, ..TrainConfig::default() },
            TrainConfig { features_per_split: 0, ..TrainConfig::default() },
            TrainConfig { features_per_split: 4, ..TrainConfig::default() },
            TrainConfig { min_samples_leaf: 0, ..TrainConfig::default() },
        ] {
            assert!(matches!(train(&data, &cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn two_example_tree_splits_at_midpoint() {
        let model = train(&two_examples(), &single_tree()).unwrap();
        let tree = &model.trees()[0];
        assert_eq!(
            tree.nodes[0],
            Node::Split {
                feature: 0,
                threshold: 0.5,
                left: 1,
                right: 2
            }
        );
        assert_eq!(tree.nodes[1], Node::Leaf { clean: 1, plag: 0 });
        assert_eq!(tree.nodes[2], Node::Leaf { clean: 0, plag: 1 });
        assert_eq!(model.predict_proba(&[0.95, 0.0, 0.0].into()), 1.0);
        assert_eq!(model.predict_proba(&[0.05, 0.0, 0.0].into()), 0.0);
    }

    #[test]
    fn vote_arithmetic() {
        let leaf = |clean, plag| DecisionTree {
            nodes: vec![Node::Leaf { clean, plag }],
        };
        let model = RandomForestModel {
            config: TrainConfig { num_trees: 4, ..TrainConfig::default() },
            trees: vec![leaf(0, 3), leaf(1, 2), leaf(5, 0), leaf(2, 1)],
            metadata: BTreeMap::new(),
        };
        let x = PairFeatures::default();
        assert_eq!(model.predict_proba(&x), 0.5);

        let all = RandomForestModel {
            config: TrainConfig { num_trees: 2, ..TrainConfig::default() },
            trees: vec![leaf(0, 1), leaf(0, 4)],
            metadata: BTreeMap::new(),
        };
        assert_eq!(all.predict_proba(&x), 1.0);

        let tied = RandomForestModel {
            config: TrainConfig { num_trees: 2, ..TrainConfig::default() },
            trees: vec![leaf(2, 2), leaf(0, 4)],
            metadata: BTreeMap::new(),
        };
        assert_eq!(tied.predict_proba(&x), 0.75);
    }

    #[test]
    fn classify_boundary_is_inclusive() {
        assert_eq!(classify_proba(0.7, 0.5), Label::Plagiarized);
        assert_eq!(classify_proba(0.5, 0.5), Label::Plagiarized);
        assert_eq!(classify_proba(0.7, 0.9), Label::Clean);
    }

    #[test]
    fn eval_report_examples() {
        use Label::*;
        let r = EvalReport::from_predictions([
            (Plagiarized, Plagiarized),
            (Plagiarized, Clean),
            (Clean, Clean),
            (Clean, Clean),
        ]);
        assert_eq!((r.tpr, r.tnr, r.balanced_accuracy, r.false_positive_rate), (0.5, 1.0, 0.75, 0.0));

        let r = EvalReport::from_predictions([(Plagiarized, Clean), (Clean, Clean)]);
        assert_eq!((r.tpr, r.tnr, r.balanced_accuracy), (0.0, 1.0, 0.5));

        let r = EvalReport::from_predictions([(Plagiarized, Plagiarized), (Clean, Clean)]);
        assert_eq!((r.balanced_accuracy, r.false_positive_rate), (1.0, 0.0));
    }

    #[test]
    fn eval_flags_zero_denominators() {
        let r = EvalReport::from_counts(0, 0, 5, 0);
        assert!(r.tpr.is_nan());
        assert!(r.balanced_accuracy.is_nan());
        assert_eq!(r.undefined_rates(), vec!["tpr", "balanced_accuracy", "precision"]);
    }

    #[test]
    fn evaluate_requires_data() {
        let model = train(&two_examples(), &single_tree()).unwrap();
        assert!(matches!(evaluate(&model, &[], 0.5), Err(Error::EmptyData)));
        let r = evaluate(&model, &two_examples(), 0.5).unwrap();
        assert_eq!(r.balanced_accuracy, 1.0);
    }

    #[test]
    fn sweep_has_101_rows_and_selects_within_target() {
        let scored = vec![
            (Label::Plagiarized, 0.9),
            (Label::Plagiarized, 0.4),
            (Label::Clean, 0.3),
            (Label::Clean, 0.05),
        ];
        let rows = sweep_scored(&scored);
        assert_eq!(rows.len(), 101);
        assert_eq!(rows[0].threshold, 0.0);
        assert_eq!(rows[100].threshold, 1.0);
        let best = select_threshold(&rows, 0.0).unwrap();
        // Full recall with zero FPR needs 0.31..=0.40; the highest wins.
        assert_eq!(best.threshold, 0.4);
        assert_eq!(best.report.tpr, 1.0);
        assert_eq!(best.report.fp, 0);
    }

    #[test]
    fn depth_limit_and_min_leaf_respected() {
        let mut rng = SplitMix64::new(5);
        let data: Vec<_> = (0..60)
            .map(|_| {
                let f = [rng.next_f64(), rng.next_f64(), rng.next_f64()];
                let label = if rng.chance(0.5) { Label::Plagiarized } else { Label::Clean };
                ex(f, label)
            })
            .collect();
        let cfg = TrainConfig {
            num_trees: 5,
            max_depth: Some(3),
            min_samples_leaf: 4,
            ..TrainConfig::default()
        };
        let model = train(&data, &cfg).unwrap();
        for tree in model.trees() {
            assert!(tree.depth() <= 3);
            for node in &tree.nodes {
                if let Node::Leaf { clean, plag } = node {
                    assert!(clean + plag >= 4);
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_errors() {
        let model = train(&two_examples(), &TrainConfig { num_trees: 7, ..TrainConfig::default() }).unwrap();
        let text = model.to_json();
        assert!(text.contains("\"format_version\": 1"));
        let back = RandomForestModel::from_json(&text).unwrap();
        assert_eq!(back, model);
        assert!(!text.contains("metadata"));

        let mut tagged = model.clone();
        tagged.set_metadata("ngram", "4");
        let back = RandomForestModel::from_json(&tagged.to_json()).unwrap();
        assert_eq!(back.metadata().get("ngram").map(String::as_str), Some("4"));

        let truncated = &text[..text.len() / 2];
        assert!(matches!(RandomForestModel::from_json(truncated), Err(Error::Format(_))));

        let v9 = text.replacen("\"format_version\": 1", "\"format_version\": 9", 1);
        match RandomForestModel::from_json(&v9) {
            Err(Error::Format(msg)) => assert!(msg.contains('9'), "{msg}"),
            other => panic!("expected format error, got {other:?}"),
        }

        let bad_child = text.replacen("\"left\": 1", "\"left\": 0", 1);
        if bad_child != text {
            assert!(RandomForestModel::from_json(&bad_child).is_err());
        }
    }

    proptest! {
        #[test]
        fn proba_is_multiple_of_half_vote(
            seed in any::<u64>(),
            trees in 1usize..12,
            xs in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), 1..20),
        ) {
            let mut rng = SplitMix64::new(seed);
            let mut data: Vec<_> = (0..30)
                .map(|_| ex([rng.next_f64(), rng.next_f64(), rng.next_f64()],
                    if rng.chance(0.4) { Label::Plagiarized } else { Label::Clean }))
                .collect();
            data[0].label = Label::Plagiarized;
            data[1].label = Label::Clean;
            let model = train(&data, &TrainConfig { num_trees: trees, seed, ..TrainConfig::default() }).unwrap();
            for (a, b, c) in xs {
                let p = model.predict_proba(&[a, b, c].into());
                prop_assert!((0.0..=1.0).contains(&p));
                let units = p * (2 * trees) as f64;
                prop_assert!((units - units.round()).abs() < 1e-9);
            }
        }

        #[test]
        fn report_identities(tp in 0u64..1000, fp in 0u64..1000, tn in 0u64..1000, fn_ in 0u64..1000) {
            let r = EvalReport::from_counts(tp, fp, tn, fn_);
            prop_assert_eq!(r.total(), tp + fp + tn + fn_);
            if tp + fn_ > 0 && tn + fp > 0 {
                prop_assert_eq!(r.balanced_accuracy, (r.tpr + r.tnr) / 2.0);
                prop_assert!((0.0..=1.0).contains(&r.balanced_accuracy));
            }
            if fp + tn > 0 {
                prop_assert_eq!(r.false_positive_rate, fp as f64 / (fp + tn) as f64);
            }
        }
    }
}
