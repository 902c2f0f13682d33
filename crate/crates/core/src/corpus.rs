//! Submission directories, pair enumeration and label files.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::forest::Label;
use crate::lexer::SourceFile;
use crate::rng::SplitMix64;

pub const SUBMISSION_EXTENSIONS: &[&str] = &["pde", "java"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub submissions: Vec<SourceFile>,
    pub template: Option<SourceFile>,
}

/// A file skipped during loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadWarning {
    pub path: PathBuf,
    pub reason: String,
}

impl std::fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: skipped ({})", self.path.display(), self.reason)
    }
}

impl Corpus {
    /// Sorts submissions by id and rejects duplicates.
    pub fn new(mut submissions: Vec<SourceFile>, template: Option<SourceFile>) -> Result<Self> {
        submissions.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = submissions.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateId(w[0].id.clone()));
        }
        Ok(Corpus {
            submissions,
            template,
        })
    }

    pub fn len(&self) -> usize {
        self.submissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.submissions.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.submissions
            .binary_search_by(|s| s.id.as_str().cmp(id))
            .ok()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.submissions.iter().map(|s| s.id.as_str())
    }
}

fn read_source(path: &Path, id: String) -> Result<std::result::Result<SourceFile, LoadWarning>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(match String::from_utf8(bytes) {
        Ok(content) => Ok(SourceFile::new(id, path.display().to_string(), content)),
        Err(e) => Err(LoadWarning {
            path: path.to_path_buf(),
            reason: format!("not valid UTF-8: {}", e.utf8_error()),
        }),
    })
}

/// Reads every `.pde`/`.java` file directly inside `dir` (no recursion).
/// Files that are not UTF-8 are skipped and reported as warnings.
pub fn load_corpus(dir: &Path, template: Option<&Path>) -> Result<(Corpus, Vec<LoadWarning>)> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let is_file = entry.file_type().map_err(|e| Error::io(&path, e))?.is_file();
        let ext_ok = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| SUBMISSION_EXTENSIONS.contains(&e));
        if !is_file || !ext_ok {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
            warnings.push(LoadWarning {
                path: path.clone(),
                reason: "file name is not valid UTF-8".into(),
            });
            continue;
        };
        match read_source(&path, id)? {
            Ok(f) => files.push(f),
            Err(w) => warnings.push(w),
        }
    }
    warnings.sort_by(|a, b| a.path.cmp(&b.path));
    if files.len() < 2 {
        return Err(Error::NoSubmissions {
            dir: dir.to_path_buf(),
            found: files.len(),
        });
    }

    let template = match template {
        None => None,
        Some(path) => {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("template")
                .to_string();
            match read_source(path, id)? {
                Ok(f) => Some(f),
                Err(w) => {
                    return Err(Error::io(
                        path,
                        std::io::Error::new(std::io::ErrorKind::InvalidData, w.reason),
                    ))
                }
            }
        }
    };
    Ok((Corpus::new(files, template)?, warnings))
}

/// Lexicographically ordered id pair.
pub fn canonical_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// All `n choose 2` unordered pairs, canonical and sorted.
pub fn enumerate_pairs(corpus: &Corpus) -> Vec<(String, String)> {
    let ids: Vec<&str> = corpus.ids().collect();
    enumerate_index_pairs(ids.len())
        .map(|(i, j)| (ids[i].to_string(), ids[j].to_string()))
        .collect()
}

/// Index pairs `(i, j)` with `i < j` in lexicographic order. Since corpus
/// submissions are sorted by id this is also the canonical id-pair order.
pub fn enumerate_index_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

pub fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Ground truth for submission pairs, keyed by canonical pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelSet {
    labels: BTreeMap<(String, String), Label>,
}

impl LabelSet {
    pub fn new() -> Self {
        LabelSet::default()
    }

    /// Inserts under the canonical key; returns the previous label, if any.
    pub fn insert(&mut self, a: &str, b: &str, label: Label) -> Option<Label> {
        self.labels.insert(canonical_pair(a, b), label)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<Label> {
        self.labels.get(&canonical_pair(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &Label)> {
        self.labels.iter()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.values().filter(|&&l| l == label).count()
    }

    /// Deterministic split: shuffles the (sorted) pairs with `seed` and puts
    /// the first `round(train_fraction * n)` into the first set.
    pub fn split(&self, train_fraction: f64, seed: u64) -> (LabelSet, LabelSet) {
        let mut entries: Vec<_> = self.labels.iter().collect();
        SplitMix64::new(seed).shuffle(&mut entries);
        let cut = ((train_fraction.clamp(0.0, 1.0) * entries.len() as f64).round()) as usize;
        let collect = |part: &[(&(String, String), &Label)]| LabelSet {
            labels: part.iter().map(|(k, v)| ((*k).clone(), **v)).collect(),
        };
        (collect(&entries[..cut]), collect(&entries[cut..]))
    }

    /// Keeps every plagiarized pair and at most `max_ratio` times as many
    /// clean pairs, chosen with `seed`. With no plagiarized pairs the set is
    /// returned unchanged.
    pub fn subsample_clean(&self, max_ratio: usize, seed: u64) -> LabelSet {
        let plag = self.count(Label::Plagiarized);
        let clean: Vec<_> = self
            .labels
            .iter()
            .filter(|(_, &l)| l == Label::Clean)
            .map(|(k, _)| k)
            .collect();
        let cap = plag.saturating_mul(max_ratio);
        if plag == 0 || clean.len() <= cap {
            return self.clone();
        }
        let keep: HashSet<&(String, String)> = SplitMix64::new(seed)
            .sample_indices(clean.len(), cap)
            .into_iter()
            .map(|i| clean[i])
            .collect();
        LabelSet {
            labels: self
                .labels
                .iter()
                .filter(|(k, &l)| l == Label::Plagiarized || keep.contains(k))
                .map(|(k, &l)| (k.clone(), l))
                .collect(),
        }
    }
}

impl FromIterator<((String, String), Label)> for LabelSet {
    fn from_iter<T: IntoIterator<Item = ((String, String), Label)>>(iter: T) -> Self {
        let mut set = LabelSet::new();
        for ((a, b), l) in iter {
            set.insert(&a, &b, l);
        }
        set
    }
}

pub const LABELS_HEADER: [&str; 3] = ["id_a", "id_b", "label"];

/// Parses a labels CSV (`id_a,id_b,label`) against `corpus`. Line numbers
/// in errors are 1-based file lines.
pub fn load_labels(path: &Path, corpus: &Corpus) -> Result<LabelSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != LABELS_HEADER {
        return Err(Error::MalformedRow {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header `id_a,id_b,label`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut labels = LabelSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let malformed = |reason: String| Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            reason,
        };
        if record.len() != 3 {
            return Err(malformed(format!("expected 3 fields, found {}", record.len())));
        }
        let (a, b) = (&record[0], &record[1]);
        if a == b {
            return Err(malformed(format!("pair of `{a}` with itself")));
        }
        let label: Label = record[2].parse().map_err(malformed)?;
        for id in [a, b] {
            if corpus.index_of(id).is_none() {
                return Err(Error::UnknownId {
                    path: path.to_path_buf(),
                    line,
                    id: id.to_string(),
                });
            }
        }
        if let Some(prev) = labels.insert(a, b, label) {
            if prev != label {
                return Err(Error::ConflictingLabel {
                    path: path.to_path_buf(),
                    line,
                    a: a.to_string(),
                    b: b.to_string(),
                });
            }
        }
    }
    Ok(labels)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            reason: format!("{other:?}"),
        },
    }
}

pub fn labels_to_csv(labels: &LabelSet) -> String {
    let mut out = String::from("id_a,id_b,label\n");
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for ((a, b), l) in labels.iter() {
        w.write_record([a.as_str(), b.as_str(), l.as_str()])
            .expect("writing to memory");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input"));
    out
}

pub fn save_labels(labels: &LabelSet, path: &Path) -> Result<()> {
    std::fs::write(path, labels_to_csv(labels)).map_err(|e| Error::io(path, e))
}
