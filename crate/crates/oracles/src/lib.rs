//! Reference implementations written for clarity rather than speed. They
//! share no code with `codeplag` so that agreement between the two means
//! something.

use std::collections::BTreeSet;

/// Dense TF-IDF over documents given as `(term, count)` lists.
///
/// Returns the sorted vocabulary and one L2-normalized row per document.
/// Weight is `count * (ln((1 + N) / (1 + df)) + 1)`.
pub fn dense_tfidf(docs: &[Vec<(String, u32)>]) -> (Vec<String>, Vec<Vec<f64>>) {
    let vocab: Vec<String> = docs
        .iter()
        .flat_map(|d| d.iter().filter(|(_, c)| *c > 0).map(|(t, _)| t.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = docs.len() as f64;
    let count = |doc: &Vec<(String, u32)>, term: &str| -> f64 {
        doc.iter()
            .filter(|(t, _)| t == term)
            .map(|(_, c)| *c as f64)
            .sum()
    };
    let idf: Vec<f64> = vocab
        .iter()
        .map(|term| {
            let df = docs.iter().filter(|d| count(d, term) > 0.0).count() as f64;
            ((1.0 + n) / (1.0 + df)).ln() + 1.0
        })
        .collect();
    let rows = docs
        .iter()
        .map(|doc| {
            let raw: Vec<f64> = vocab
                .iter()
                .zip(&idf)
                .map(|(term, w)| count(doc, term) * w)
                .collect();
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                raw
            } else {
                raw.iter().map(|x| x / norm).collect()
            }
        })
        .collect();
    (vocab, rows)
}

/// Plain dot-product cosine over dense rows, 0 when either row is all zero.
pub fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn gini(rows: &[&([f64; 3], bool)]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let n = rows.len() as f64;
    let p = rows.iter().filter(|r| r.1).count() as f64 / n;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// Exhaustive weighted-Gini minimizer over every feature and every midpoint
/// between consecutive distinct values. `true` marks the positive class.
///
/// Candidates within `1e-12` of the best impurity count as ties and are
/// resolved by lowest feature, then lowest threshold. Splits leaving fewer
/// than `min_leaf` rows on a side are skipped.
pub fn best_gini_split(rows: &[([f64; 3], bool)], min_leaf: usize) -> Option<(usize, f64)> {
    let mut candidates: Vec<(f64, usize, f64)> = Vec::new();
    for feature in 0..3 {
        let mut values: Vec<f64> = rows.iter().map(|r| r.0[feature]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let threshold = (w[0] + w[1]) / 2.0;
            let (left, right): (Vec<_>, Vec<_>) =
                rows.iter().partition(|r| r.0[feature] <= threshold);
            if left.len() < min_leaf || right.len() < min_leaf {
                continue;
            }
            let n = rows.len() as f64;
            let impurity = left.len() as f64 / n * gini(&left) + right.len() as f64 / n * gini(&right);
            candidates.push((impurity, feature, threshold));
        }
    }
    let best = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .filter(|c| c.0 <= best + 1e-12)
        .min_by(|x, y| x.1.cmp(&y.1).then(x.2.total_cmp(&y.2)))
        .map(|(_, f, t)| (f, t))
}

/// Length of the longest common contiguous run, by the textbook DP.
pub fn longest_common_substring<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    let mut best = 0;
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            if a[i - 1] == b[j - 1] {
                table[i][j] = table[i - 1][j - 1] + 1;
                best = best.max(table[i][j]);
            }
        }
    }
    best
}
