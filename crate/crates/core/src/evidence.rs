//! Visual evidence for a flagged pair: greedy string tiling over the
//! normalized symbol streams, template marking, and a side-by-side HTML
//! rendering with the matched regions highlighted.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::PairFeatures;
use crate::lexer::{ByteSpan, NormalizedStream, SourceFile};

pub const DEFAULT_MIN_MATCH: usize = 8;
pub const DEFAULT_OVERLAP_FRACTION: f64 = 0.8;

/// One matched run: `a.symbols[a_start..a_start + length]` equals
/// `b.symbols[b_start..b_start + length]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tile {
    pub a_start: usize,
    pub b_start: usize,
    pub length: usize,
    pub a_bytes: ByteSpan,
    pub b_bytes: ByteSpan,
    pub template_derived: bool,
}

impl Tile {
    pub fn a_range(&self) -> std::ops::Range<usize> {
        self.a_start..self.a_start + self.length
    }

    pub fn b_range(&self) -> std::ops::Range<usize> {
        self.b_start..self.b_start + self.length
    }
}

/// Maps both streams onto a shared integer alphabet.
fn intern(a: &NormalizedStream, b: &NormalizedStream) -> (Vec<u32>, Vec<u32>) {
    fn map<'s>(s: &'s NormalizedStream, table: &mut HashMap<&'s str, u32>) -> Vec<u32> {
        s.symbols
            .iter()
            .map(|sym| {
                let next = table.len() as u32;
                *table.entry(sym.as_str()).or_insert(next)
            })
            .collect()
    }
    let mut table = HashMap::new();
    let ia = map(a, &mut table);
    let ib = map(b, &mut table);
    (ia, ib)
}

/// Longest run of equal, unmarked symbols as `(a_start, b_start, length)`.
/// Ties go to the smallest `a_start`, then the smallest `b_start`.
fn longest_unmarked_run(
    a: &[u32],
    b: &[u32],
    a_marked: &[bool],
    b_marked: &[bool],
) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for i in 0..a.len() {
        cur[0] = 0;
        for j in 0..b.len() {
            cur[j + 1] = if !a_marked[i] && !b_marked[j] && a[i] == b[j] {
                prev[j] + 1
            } else {
                0
            };
            let len = cur[j + 1];
            if len > 0 {
                let (sa, sb) = (i + 1 - len, j + 1 - len);
                if len > best.2 || (len == best.2 && (sa, sb) < (best.0, best.1)) {
                    best = (sa, sb, len);
                }
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

fn byte_span(stream: &NormalizedStream, start: usize, len: usize) -> ByteSpan {
    ByteSpan::new(stream.origins[start].start, stream.origins[start + len - 1].end)
}

/// Greedy string tiling: repeatedly take the longest common run of unmarked
/// symbols, mark it, and stop once the longest remaining run is shorter than
/// `min_match`. Tiles come back sorted by `a_start`.
pub fn greedy_string_tiling(
    a: &NormalizedStream,
    b: &NormalizedStream,
    min_match: usize,
) -> Vec<Tile> {
    let min_match = min_match.max(1);
    let (sa, sb) = intern(a, b);
    let mut a_marked = vec![false; sa.len()];
    let mut b_marked = vec![false; sb.len()];
    let mut tiles = Vec::new();
    loop {
        let (pa, pb, len) = longest_unmarked_run(&sa, &sb, &a_marked, &b_marked);
        if len < min_match {
            break;
        }
        a_marked[pa..pa + len].iter_mut().for_each(|m| *m = true);
        b_marked[pb..pb + len].iter_mut().for_each(|m| *m = true);
        tiles.push(Tile {
            a_start: pa,
            b_start: pb,
            length: len,
            a_bytes: byte_span(a, pa, len),
            b_bytes: byte_span(b, pb, len),
            template_derived: false,
        });
    }
    tiles.sort_by_key(|t| t.a_start);
    tiles
}

fn coverage_mask(len: usize, ranges: impl Iterator<Item = std::ops::Range<usize>>) -> Vec<bool> {
    let mut mask = vec![false; len];
    for r in ranges {
        for i in r {
            if i < len {
                mask[i] = true;
            }
        }
    }
    mask
}

/// Flags pair tiles that mostly sit inside starter code. `a_vs_t` are tiles
/// between A and the template (A on their a-side), likewise `b_vs_t` for B.
/// A tile is template-derived when at least `overlap_fraction` of its symbols
/// on *both* sides are covered by template tiles.
pub fn mark_template(
    tiles: &[Tile],
    a_vs_t: &[Tile],
    b_vs_t: &[Tile],
    overlap_fraction: f64,
) -> Vec<Tile> {
    let a_end = tiles.iter().map(|t| t.a_range().end).max().unwrap_or(0);
    let b_end = tiles.iter().map(|t| t.b_range().end).max().unwrap_or(0);
    let a_mask = coverage_mask(a_end, a_vs_t.iter().map(Tile::a_range));
    let b_mask = coverage_mask(b_end, b_vs_t.iter().map(Tile::a_range));
    let covered = |mask: &[bool], r: std::ops::Range<usize>| r.filter(|&i| mask[i]).count();

    tiles
        .iter()
        .map(|t| {
            let need = overlap_fraction * t.length as f64;
            let in_a = covered(&a_mask, t.a_range()) as f64;
            let in_b = covered(&b_mask, t.b_range()) as f64;
            Tile {
                template_derived: t.length > 0 && in_a >= need && in_b >= need,
                ..*t
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceReport {
    pub pair: (String, String),
    pub tiles: Vec<Tile>,
    /// Fraction of A's symbols inside some tile.
    pub coverage_a: f64,
    pub coverage_b: f64,
    pub min_match: usize,
    /// Pair features shown in the report header, when known.
    pub scores: Option<PairFeatures>,
}

fn coverage(tiles: &[Tile], total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        tiles.iter().map(|t| t.length).sum::<usize>() as f64 / total as f64
    }
}

impl EvidenceReport {
    pub fn new(a: &NormalizedStream, b: &NormalizedStream, mut tiles: Vec<Tile>, min_match: usize) -> Self {
        tiles.sort_by_key(|t| t.a_start);
        EvidenceReport {
            pair: (a.source_id.clone(), b.source_id.clone()),
            coverage_a: coverage(&tiles, a.len()),
            coverage_b: coverage(&tiles, b.len()),
            tiles,
            min_match,
            scores: None,
        }
    }

    pub fn with_scores(mut self, scores: PairFeatures) -> Self {
        self.scores = Some(scores);
        self
    }

    pub fn template_tiles(&self) -> usize {
        self.tiles.iter().filter(|t| t.template_derived).count()
    }
}

/// Tiles A against B and, when a template stream is given, marks the tiles
/// that come from the template.
pub fn build_report(
    a: &NormalizedStream,
    b: &NormalizedStream,
    template: Option<&NormalizedStream>,
    min_match: usize,
    overlap_fraction: f64,
) -> EvidenceReport {
    let mut tiles = greedy_string_tiling(a, b, min_match);
    if let Some(t) = template {
        let a_vs_t = greedy_string_tiling(a, t, min_match);
        let b_vs_t = greedy_string_tiling(b, t, min_match);
        tiles = mark_template(&tiles, &a_vs_t, &b_vs_t, overlap_fraction);
    }
    EvidenceReport::new(a, b, tiles, min_match)
}

/// Evidence file name for a pair.
pub fn report_file_name(id_a: &str, id_b: &str) -> String {
    format!("{id_a}__{id_b}.html")
}

pub fn escape_html(text: &str, out: &mut String) {
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
}

fn escaped(text: &str) -> String {
    let mut s = String::with_capacity(text.len());
    escape_html(text, &mut s);
    s
}

const PALETTE: &[&str] = &[
    "#ffd54f", "#81d4fa", "#a5d6a7", "#f48fb1", "#ce93d8", "#ffab91", "#80cbc4", "#e6ee9c",
];

const STYLE: &str = "\
body{font-family:sans-serif;margin:1em;background:#fafafa;color:#222}\
header{margin-bottom:1em}\
table.scores{border-collapse:collapse}\
table.scores td,table.scores th{border:1px solid #ccc;padding:2px 8px;text-align:right}\
.panes{display:flex;gap:1em}\
.pane{flex:1;min-width:0;border:1px solid #ccc;background:#fff}\
.pane h2{font-size:1em;margin:0;padding:4px 8px;background:#eee;border-bottom:1px solid #ccc}\
pre{margin:0;padding:8px;overflow-x:auto;font-size:12px;line-height:1.4}\
mark.tile{border-radius:2px;padding:0}\
mark.template{background:#e0e0e0 !important;color:#777;outline:1px dashed #999}\
.legend span{display:inline-block;margin-right:1em}";

/// Emits `content` with every span in `marks` wrapped in a `<mark>`.
/// `marks` holds `(span, tile_index, template_derived)` and must be
/// non-overlapping.
fn render_pane(
    content: &str,
    file: &str,
    mut marks: Vec<(ByteSpan, usize, bool)>,
    out: &mut String,
) -> Result<()> {
    for &(span, _, _) in &marks {
        if span.end > content.len()
            || span.start > span.end
            || !content.is_char_boundary(span.start)
            || !content.is_char_boundary(span.end)
        {
            return Err(Error::SpanOutOfRange {
                file: file.to_string(),
                start: span.start,
                end: span.end,
                len: content.len(),
            });
        }
    }
    marks.sort_by_key(|m| m.0.start);
    let mut cursor = 0;
    for (span, index, template) in marks {
        escape_html(&content[cursor..span.start], out);
        let color = PALETTE[index % PALETTE.len()];
        if template {
            let _ = write!(
                out,
                "<mark class=\"tile template\" data-tile=\"{index}\" title=\"match {index} (template code)\">"
            );
        } else {
            let _ = write!(
                out,
                "<mark class=\"tile\" data-tile=\"{index}\" title=\"match {index}\" style=\"background:{color}\">"
            );
        }
        escape_html(&content[span.start..span.end], out);
        out.push_str("</mark>");
        cursor = span.end;
    }
    escape_html(&content[cursor..], out);
    Ok(())
}

/// Self-contained side-by-side HTML document (also well-formed XML) with
/// one `<mark>` per tile per side. Matching tiles share `data-tile` and color;
/// template-derived tiles use a muted style.
pub fn render_html(report: &EvidenceReport, a: &SourceFile, b: &SourceFile) -> Result<String> {
    let mut pane_a = String::with_capacity(a.content.len() + 64 * report.tiles.len());
    let mut pane_b = String::with_capacity(b.content.len() + 64 * report.tiles.len());
    render_pane(
        &a.content,
        &a.id,
        report
            .tiles
            .iter()
            .enumerate()
            .map(|(i, t)| (t.a_bytes, i, t.template_derived))
            .collect(),
        &mut pane_a,
    )?;
    render_pane(
        &b.content,
        &b.id,
        report
            .tiles
            .iter()
            .enumerate()
            .map(|(i, t)| (t.b_bytes, i, t.template_derived))
            .collect(),
        &mut pane_b,
    )?;

    let (ida, idb) = (escaped(&report.pair.0), escaped(&report.pair.1));
    let mut html = String::with_capacity(pane_a.len() + pane_b.len() + 4096);
    html.push_str("<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\" lang=\"en\">\n<head>\n");
    html.push_str("<meta charset=\"utf-8\"/>\n");
    let _ = writeln!(html, "<title>Overlap: {ida} vs {idb}</title>");
    let _ = writeln!(html, "<style>{STYLE}</style>\n</head>\n<body>\n<header>");
    let _ = writeln!(html, "<h1>{ida} vs {idb}</h1>");
    html.push_str("<table class=\"scores\">\n");
    let _ = writeln!(
        html,
        "<tr><th>coverage {ida}</th><td>{:.1}%</td></tr>",
        report.coverage_a * 100.0
    );
    let _ = writeln!(
        html,
        "<tr><th>coverage {idb}</th><td>{:.1}%</td></tr>",
        report.coverage_b * 100.0
    );
    let _ = writeln!(
        html,
        "<tr><th>matches</th><td>{} ({} from template, min length {})</td></tr>",
        report.tiles.len(),
        report.template_tiles(),
        report.min_match
    );
    if let Some(s) = report.scores {
        let _ = writeln!(html, "<tr><th>similarity {ida} / {idb}</th><td>{:.4}</td></tr>", s.sim_ab);
        let _ = writeln!(html, "<tr><th>similarity {ida} / template</th><td>{:.4}</td></tr>", s.sim_at);
        let _ = writeln!(html, "<tr><th>similarity {idb} / template</th><td>{:.4}</td></tr>", s.sim_bt);
    }
    html.push_str("</table>\n<p class=\"legend\"><span>Colored: shared code</span><span>Grey, dashed: also present in the template</span></p>\n</header>\n");
    html.push_str("<div class=\"panes\">\n");
    for (id, path, pane) in [(&ida, &a.path, &pane_a), (&idb, &b.path, &pane_b)] {
        let _ = write!(
            html,
            "<section class=\"pane\">\n<h2>{id} <small>{}</small></h2>\n<pre><code>",
            escaped(path)
        );
        html.push_str(pane);
        html.push_str("</code></pre>\n</section>\n");
    }
    html.push_str("</div>\n</body>\n</html>\n");
    Ok(html)
}
