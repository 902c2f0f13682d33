//! TF-IDF vectors over symbol n-grams, and cosine similarity.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexer::NormalizedStream;

/// Joins the symbols of one n-gram. U+241F (SYMBOL FOR UNIT SEPARATOR) never
/// occurs inside a normalized symbol, so ("ab","c") and ("a","bc") differ.
pub const NGRAM_SEPARATOR: char = '\u{241F}';

pub const DEFAULT_NGRAM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NGramConfig {
    n: usize,
}

impl NGramConfig {
    pub fn new(n: usize) -> Result<Self> {
        if (1..=10).contains(&n) {
            Ok(NGramConfig { n })
        } else {
            Err(Error::InvalidConfig(format!(
                "n-gram length must be in 1..=10, got {n}"
            )))
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl Default for NGramConfig {
    fn default() -> Self {
        NGramConfig { n: DEFAULT_NGRAM }
    }
}

/// n-gram → occurrence count for one document.
pub type TermCounts = HashMap<String, u32>;

pub fn extract_ngrams(stream: &NormalizedStream, config: NGramConfig) -> TermCounts {
    let n = config.n();
    let mut counts = TermCounts::new();
    if stream.symbols.len() < n {
        return counts;
    }
    let sep = NGRAM_SEPARATOR.to_string();
    for window in stream.symbols.windows(n) {
        *counts.entry(window.join(&sep)).or_insert(0) += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    term_ids: HashMap<String, u32>,
    doc_freq: Vec<u32>,
    num_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.doc_freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_freq.is_empty()
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.term_ids.get(term).copied()
    }

    pub fn doc_freq(&self, id: u32) -> u32 {
        self.doc_freq[id as usize]
    }
}

/// Fitted IDF weights. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    vocab: Vocabulary,
    idf: Vec<f64>,
}

/// Smoothed inverse document frequency, `ln((1+N)/(1+df)) + 1`.
pub fn smoothed_idf(num_docs: usize, doc_freq: u32) -> f64 {
    ((1.0 + num_docs as f64) / (1.0 + doc_freq as f64)).ln() + 1.0
}

pub fn fit_tfidf<C>(corpus: &[C]) -> Result<TfidfModel>
where
    C: std::borrow::Borrow<TermCounts>,
{
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    // Sorted so ids do not depend on hash iteration order.
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for doc in corpus {
        for (term, &count) in doc.borrow() {
            if count > 0 {
                *df.entry(term.as_str()).or_insert(0) += 1;
            }
        }
    }
    let num_docs = corpus.len();
    let mut term_ids = HashMap::with_capacity(df.len());
    let mut doc_freq = Vec::with_capacity(df.len());
    let mut idf = Vec::with_capacity(df.len());
    for (id, (term, freq)) in df.into_iter().enumerate() {
        term_ids.insert(term.to_string(), id as u32);
        doc_freq.push(freq);
        idf.push(smoothed_idf(num_docs, freq));
    }
    Ok(TfidfModel {
        vocab: Vocabulary {
            term_ids,
            doc_freq,
            num_docs,
        },
        idf,
    })
}

impl TfidfModel {
    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn idf(&self, id: u32) -> f64 {
        self.idf[id as usize]
    }

    pub fn idf_of(&self, term: &str) -> Option<f64> {
        self.vocab.id(term).map(|id| self.idf(id))
    }

    /// Raw-count TF times IDF, L2-normalized. Out-of-vocabulary terms are
    /// dropped.
    pub fn transform(&self, counts: &TermCounts) -> SparseVector {
        let entries: Vec<(u32, f64)> = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .filter_map(|(term, &c)| self.vocab.id(term).map(|id| (id, c as f64 * self.idf(id))))
            .collect();
        SparseVector::normalized(entries)
    }
}

/// L2-normalized sparse vector, entries sorted by term id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn empty() -> Self {
        SparseVector::default()
    }

    /// Builds a unit vector from raw weights. Zero and non-finite weights are
    /// dropped; duplicate ids are summed. An all-zero input gives the empty
    /// vector.
    pub fn normalized(mut entries: Vec<(u32, f64)>) -> Self {
        entries.retain(|&(_, w)| w.is_finite() && w != 0.0);
        entries.sort_by_key(|&(id, _)| id);
        entries.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
        let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return SparseVector::empty();
        }
        for e in &mut entries {
            e.1 /= norm;
        }
        entries.retain(|&(_, w)| w != 0.0);
        SparseVector { entries }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn get(&self, id: u32) -> f64 {
        self.entries
            .binary_search_by_key(&id, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
    }
}

/// Dot product of two unit vectors, clamped to `[0, 1]`. Empty vectors
/// have similarity 0 with everything.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (mut i, mut j) = (0, 0);
    let (ea, eb) = (a.entries(), b.entries());
    let mut dot = 0.0;
    while i < ea.len() && j < eb.len() {
        match ea[i].0.cmp(&eb[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += ea[i].1 * eb[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    dot.clamp(0.0, 1.0)
}
