//! End-to-end scoring of a corpus: vectorize every submission, score
//! pairs, classify, and build evidence for flagged pairs.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::{Corpus, LabelSet};
use crate::error::{Error, Result};
use crate::evidence::{build_report, EvidenceReport};
use crate::exec::Execution;
use crate::features::{extract_pair_features, PairFeatures};
use crate::forest::{Label, LabeledExample, RandomForestModel};
use crate::lexer::{stream_of, NormalizationProfile, NormalizedStream};
use crate::vectorspace::{extract_ngrams, fit_tfidf, NGramConfig, SparseVector, TfidfModel};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineConfig {
    pub ngram: NGramConfig,
    pub profile: NormalizationProfile,
}

/// Vectorized corpus. IDF is fitted on all submissions plus the template.
#[derive(Debug, Clone)]
pub struct SimilarityIndex {
    ids: Vec<String>,
    streams: Vec<NormalizedStream>,
    vectors: Vec<SparseVector>,
    template_stream: Option<NormalizedStream>,
    template_vector: SparseVector,
    model: TfidfModel,
}

impl SimilarityIndex {
    pub fn build(corpus: &Corpus, config: PipelineConfig, exec: Execution) -> Result<Self> {
        let streams = exec.map(&corpus.submissions, |f| stream_of(f, config.profile));
        let template_stream = corpus
            .template
            .as_ref()
            .map(|t| stream_of(t, config.profile));

        let mut counts = exec.map(&streams, |s| extract_ngrams(s, config.ngram));
        let template_counts = template_stream
            .as_ref()
            .map(|s| extract_ngrams(s, config.ngram));
        if let Some(tc) = &template_counts {
            counts.push(tc.clone());
        }
        let model = fit_tfidf(&counts)?;
        if template_counts.is_some() {
            counts.pop();
        }
        let vectors = exec.map(&counts, |c| model.transform(c));
        let template_vector = template_counts
            .map(|c| model.transform(&c))
            .unwrap_or_default();

        Ok(SimilarityIndex {
            ids: corpus.submissions.iter().map(|s| s.id.clone()).collect(),
            streams,
            vectors,
            template_stream,
            template_vector,
            model,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub fn stream(&self, i: usize) -> &NormalizedStream {
        &self.streams[i]
    }

    pub fn vector(&self, i: usize) -> &SparseVector {
        &self.vectors[i]
    }

    pub fn template_stream(&self) -> Option<&NormalizedStream> {
        self.template_stream.as_ref()
    }

    pub fn template_vector(&self) -> &SparseVector {
        &self.template_vector
    }

    pub fn tfidf(&self) -> &TfidfModel {
        &self.model
    }

    pub fn pair_features(&self, i: usize, j: usize) -> PairFeatures {
        extract_pair_features(&self.vectors[i], &self.vectors[j], &self.template_vector)
    }

    /// Features for every labeled pair, in label-set order. Ids must exist
    /// in the index.
    pub fn labeled_examples(&self, labels: &LabelSet, exec: Execution) -> Result<Vec<LabeledExample>> {
        let pairs: Vec<(usize, usize, Label)> = labels
            .iter()
            .map(|((a, b), &l)| {
                let ia = self.index_of(a).ok_or_else(|| Error::InvalidConfig(format!("unknown id `{a}`")))?;
                let ib = self.index_of(b).ok_or_else(|| Error::InvalidConfig(format!("unknown id `{b}`")))?;
                Ok((ia, ib, l))
            })
            .collect::<Result<_>>()?;
        Ok(exec.map(&pairs, |&(i, j, l)| LabeledExample::new(self.pair_features(i, j), l)))
    }

    /// Tiles and template marks for one pair, with its features attached.
    pub fn evidence(&self, i: usize, j: usize, min_match: usize, overlap_fraction: f64) -> EvidenceReport {
        build_report(
            &self.streams[i],
            &self.streams[j],
            self.template_stream.as_ref(),
            min_match,
            overlap_fraction,
        )
        .with_scores(self.pair_features(i, j))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionRow {
    pub id_a: String,
    pub id_b: String,
    pub sim_ab: f64,
    pub sim_at: f64,
    pub sim_bt: f64,
    pub probability: f64,
    pub verdict: Label,
}

impl DetectionRow {
    pub fn features(&self) -> PairFeatures {
        PairFeatures::new(self.sim_ab, self.sim_at, self.sim_bt)
    }
}

/// Probability descending, then `(id_a, id_b)` ascending.
pub fn report_order(a: &DetectionRow, b: &DetectionRow) -> Ordering {
    b.probability
        .total_cmp(&a.probability)
        .then_with(|| a.id_a.cmp(&b.id_a))
        .then_with(|| a.id_b.cmp(&b.id_b))
}

/// Scores all `n choose 2` pairs and returns them in report order.
pub fn detect(
    index: &SimilarityIndex,
    model: &RandomForestModel,
    threshold: f64,
    exec: Execution,
) -> Vec<DetectionRow> {
    let n = index.len();
    let per_row = exec.map_range(0..n, |i| {
        (i + 1..n)
            .map(|j| {
                let f = index.pair_features(i, j);
                let probability = model.predict_proba(&f);
                DetectionRow {
                    id_a: index.id(i).to_string(),
                    id_b: index.id(j).to_string(),
                    sim_ab: f.sim_ab,
                    sim_at: f.sim_at,
                    sim_bt: f.sim_bt,
                    probability,
                    verdict: crate::forest::classify_proba(probability, threshold),
                }
            })
            .collect::<Vec<_>>()
    });
    let mut rows: Vec<DetectionRow> = per_row.into_iter().flatten().collect();
    rows.sort_by(report_order);
    rows
}

/// All pair features without classification, in canonical pair order.
pub fn all_pair_features(index: &SimilarityIndex, exec: Execution) -> Vec<PairFeatures> {
    let n = index.len();
    exec.map_range(0..n, |i| {
        (i + 1..n)
            .map(|j| index.pair_features(i, j))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

pub const REPORT_HEADER: &str = "id_a,id_b,sim_ab,sim_at,sim_bt,probability,verdict";

fn csv_field(s: &str, out: &mut String) {
    if s.contains([',', '"', '\n', '\r']) {
        out.push('"');
        out.push_str(&s.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(s);
    }
}

/// Report CSV. Floats use the shortest representation that round-trips.
pub fn rows_to_csv(rows: &[DetectionRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        csv_field(&r.id_a, &mut out);
        out.push(',');
        csv_field(&r.id_b, &mut out);
        let _ = writeln!(
            out,
            ",{},{},{},{},{}",
            r.sim_ab, r.sim_at, r.sim_bt, r.probability, r.verdict
        );
    }
    out
}
