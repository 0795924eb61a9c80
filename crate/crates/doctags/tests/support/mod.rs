//! Random generators and independent reference implementations shared by
//! the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use doctags_core::geometry::BBox;
use doctags_core::metrics::Tree;
use doctags_core::{Block, BlockKind, CellRole, CodeLang, Document, GridCell, LocBox, Page, PictureClass, TableGrid};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const WORDS: &[&str] = &[
    "the", "cat", "sat", "on", "a", "mat", "Table", "Figure", "3.14", "x<y", "a&b", "b>c", "é",
    "Σ", "naïve", "loc_3", "nl", "fcel", "\"quoted\"", "it's", "2024", "-", "(1)", "über", "日本",
];

pub fn words(rng: &mut StdRng, min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

pub fn loc(rng: &mut StdRng) -> LocBox {
    let (a, b) = (rng.gen_range(0..=500u16), rng.gen_range(0..=500u16));
    let (c, d) = (rng.gen_range(0..=500u16), rng.gen_range(0..=500u16));
    LocBox::new(a.min(b), c.min(d), a.max(b), c.max(d))
}

fn maybe_loc(rng: &mut StdRng, block: Block) -> Block {
    if rng.gen_bool(0.7) {
        block.at(loc(rng))
    } else {
        block
    }
}

/// Random valid grid up to `max_rows` x `max_cols` with spans and header
/// roles.
pub fn grid(rng: &mut StdRng, max_rows: usize, max_cols: usize) -> TableGrid {
    let rows = rng.gen_range(1..=max_rows);
    let cols = rng.gen_range(1..=max_cols);
    let mut cells = vec![vec![GridCell::covered(); cols]; rows];
    let mut taken = vec![vec![false; cols]; rows];
    for r in 0..rows {
        for c in 0..cols {
            if taken[r][c] {
                continue;
            }
            let mut col_span = 1;
            let want_cols = if rng.gen_bool(0.25) { rng.gen_range(1..=3) } else { 1 };
            while col_span < want_cols && c + col_span < cols && !taken[r][c + col_span] {
                col_span += 1;
            }
            let want_rows = if rng.gen_bool(0.25) { rng.gen_range(1..=3) } else { 1 };
            let mut row_span = 1;
            while row_span < want_rows
                && r + row_span < rows
                && (c..c + col_span).all(|cc| !taken[r + row_span][cc])
            {
                row_span += 1;
            }
            for row in taken.iter_mut().skip(r).take(row_span) {
                for slot in row.iter_mut().skip(c).take(col_span) {
                    *slot = true;
                }
            }
            let text = if rng.gen_bool(0.2) { String::new() } else { words(rng, 1, 3) };
            let role = match rng.gen_range(0..10) {
                0 | 1 => CellRole::ColumnHeader,
                2 => CellRole::RowHeader,
                3 => CellRole::SectionRow,
                _ => CellRole::Body,
            };
            cells[r][c] = GridCell::text(text).with_role(role).with_span(row_span, col_span);
        }
    }
    TableGrid::from_rows(cells).expect("generator builds valid grids")
}

fn caption(rng: &mut StdRng) -> Block {
    let text = words(rng, 1, 6);
    maybe_loc(rng, Block::with_text(BlockKind::Caption, text))
}

fn verbatim(rng: &mut StdRng) -> String {
    let lines = rng.gen_range(1..=3);
    (0..lines)
        .map(|i| {
            let indent = if i > 0 && rng.gen_bool(0.5) { "    " } else { "" };
            format!("{indent}{}", words(rng, 1, 4))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn block(rng: &mut StdRng, kind: BlockKind, picture_tables: bool) -> Block {
    let block = match kind {
        BlockKind::Code => {
            let langs: Vec<CodeLang> = CodeLang::ALL.iter().copied().filter(|l| *l != CodeLang::Unknown).collect();
            let lang = if rng.gen_bool(0.8) { Some(*langs.choose(rng).unwrap()) } else { None };
            Block::code(lang, verbatim(rng))
        }
        BlockKind::Formula => Block::with_text(kind, format!(" {} ", verbatim(rng))),
        BlockKind::Picture => {
            let mut b = Block::new(kind);
            let n = rng.gen_range(0..=3);
            b.picture_classes = PictureClass::ALL.choose_multiple(rng, n).copied().collect();
            if picture_tables && rng.gen_bool(0.3) {
                let mut table = block(rng, BlockKind::Otsl, false);
                table.children.clear();
                b = b.child(table);
            }
            if rng.gen_bool(0.5) {
                b = b.child(caption(rng));
            }
            b
        }
        BlockKind::Otsl => {
            let mut b = Block::table(grid(rng, 4, 4));
            if rng.gen_bool(0.5) {
                b = b.child(caption(rng));
            }
            b
        }
        BlockKind::DocumentIndex => {
            if rng.gen_bool(0.5) {
                let mut b = Block::new(kind);
                b.table = Some(grid(rng, 4, 3));
                b
            } else {
                Block::with_text(kind, words(rng, 1, 8))
            }
        }
        BlockKind::OrderedList | BlockKind::UnorderedList => {
            let mut b = Block::new(kind);
            for _ in 0..rng.gen_range(0..=4) {
                let item = Block::with_text(BlockKind::ListItem, words(rng, 0, 6));
                b = b.child(maybe_loc(rng, item));
            }
            b
        }
        _ => Block::with_text(kind, words(rng, 0, 10)),
    };
    maybe_loc(rng, block)
}

/// Random valid document. With `picture_tables` a picture may nest a table.
pub fn document(rng: &mut StdRng, picture_tables: bool) -> Document {
    let pages = rng.gen_range(1..=3);
    let pages = (0..pages)
        .map(|_| {
            let n = rng.gen_range(0..=6);
            Page::new(
                (0..n)
                    .map(|_| {
                        let kind = *BlockKind::ALL.choose(rng).unwrap();
                        block(rng, kind, picture_tables)
                    })
                    .collect(),
            )
        })
        .collect();
    Document { pages }
}

/// Document holding every block kind at least once.
pub fn every_kind(rng: &mut StdRng) -> Document {
    let blocks = BlockKind::ALL.iter().map(|&k| block(rng, k, false)).collect();
    Document::single_page(blocks)
}

/// Applies 1 to 4 random byte-level edits and repairs the result into UTF-8.
pub fn mutate(rng: &mut StdRng, source: &str) -> String {
    const SNIPPETS: &[&[u8]] = &[
        b"<", b">", b"/", b"</", b"<text>", b"</text>", b"<loc_", b"<loc_12>", b"<nl>", b"<fcel>",
        b"<lcel>", b"<ucel>", b"<xcel>", b"<otsl>", b"</otsl>", b"<caption>", b"<page_break>",
        b"<doctag>", b"</doctag>", b"<_C_>", b"&", b"&amp", b"\xff", b" ",
    ];
    let mut bytes = source.as_bytes().to_vec();
    for _ in 0..rng.gen_range(1..=4) {
        let len = bytes.len();
        match rng.gen_range(0..7) {
            0 if len > 0 => {
                let at = rng.gen_range(0..len);
                let n = rng.gen_range(1..=(len - at).min(16));
                bytes.drain(at..at + n);
            }
            1 => {
                let at = rng.gen_range(0..=len);
                bytes.insert(at, rng.gen());
            }
            2 => {
                let at = rng.gen_range(0..=len);
                let s = SNIPPETS.choose(rng).unwrap();
                bytes.splice(at..at, s.iter().copied());
            }
            3 if len > 0 => {
                let at = rng.gen_range(0..len);
                bytes[at] = rng.gen();
            }
            4 if len > 0 => {
                let at = rng.gen_range(0..len);
                bytes.truncate(at);
            }
            5 if len > 1 => {
                let a = rng.gen_range(0..len);
                let b = rng.gen_range(a..len.min(a + 40));
                let segment = bytes[a..=b].to_vec();
                let copies = rng.gen_range(2..=12);
                for _ in 0..copies {
                    bytes.extend_from_slice(&segment);
                }
            }
            _ if len > 1 => {
                let a = rng.gen_range(0..len);
                let b = rng.gen_range(0..len);
                bytes.swap(a, b);
            }
            _ => bytes.push(b'<'),
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

/// Random ordered tree with `size` nodes over a small label alphabet.
pub fn tree(rng: &mut StdRng, size: usize, alphabet: u8) -> Tree<u8> {
    let label = rng.gen_range(0..alphabet);
    let mut remaining = size - 1;
    let mut children = Vec::new();
    while remaining > 0 {
        let n = rng.gen_range(1..=remaining);
        children.push(tree(rng, n, alphabet));
        remaining -= n;
    }
    Tree::node(label, children)
}

/// Ordered forest edit distance by direct recursion on rightmost roots,
/// memoized on the printed forests. Unit insert and delete costs.
pub fn brute_force_ted<L: std::fmt::Debug>(a: &Tree<L>, b: &Tree<L>, rename: &dyn Fn(&L, &L) -> f64) -> f64 {
    fn key<L: std::fmt::Debug>(f: &[&Tree<L>]) -> String {
        fn write<L: std::fmt::Debug>(t: &Tree<L>, out: &mut String) {
            out.push_str(&format!("{:?}(", t.label));
            for c in &t.children {
                write(c, out);
            }
            out.push(')');
        }
        let mut s = String::new();
        for t in f {
            write(t, &mut s);
        }
        s
    }
    fn size<L>(f: &[&Tree<L>]) -> usize {
        f.iter().map(|t| t.size()).sum()
    }
    fn go<'t, L: std::fmt::Debug>(
        f: &[&'t Tree<L>],
        g: &[&'t Tree<L>],
        rename: &dyn Fn(&L, &L) -> f64,
        memo: &mut HashMap<(String, String), f64>,
    ) -> f64 {
        if f.is_empty() {
            return size(g) as f64;
        }
        if g.is_empty() {
            return size(f) as f64;
        }
        let k = (key(f), key(g));
        if let Some(&v) = memo.get(&k) {
            return v;
        }
        let v = f.last().unwrap();
        let w = g.last().unwrap();
        let mut f_minus_v: Vec<&Tree<L>> = f[..f.len() - 1].to_vec();
        f_minus_v.extend(v.children.iter());
        let mut g_minus_w: Vec<&Tree<L>> = g[..g.len() - 1].to_vec();
        g_minus_w.extend(w.children.iter());
        let v_children: Vec<&Tree<L>> = v.children.iter().collect();
        let w_children: Vec<&Tree<L>> = w.children.iter().collect();
        let delete = go(&f_minus_v, g, rename, memo) + 1.0;
        let insert = go(f, &g_minus_w, rename, memo) + 1.0;
        let matched = go(&v_children, &w_children, rename, memo)
            + rename(&v.label, &w.label)
            + go(&f[..f.len() - 1], &g[..g.len() - 1], rename, memo);
        let best = delete.min(insert).min(matched);
        memo.insert(k, best);
        best
    }
    go(&[a], &[b], rename, &mut HashMap::new())
}

/// Sentence BLEU with clipped n-gram counts, an epsilon floor on zero
/// precisions and orders longer than the prediction skipped.
pub fn reference_bleu(pred: &str, gt: &str, max_n: usize) -> f64 {
    let p: Vec<&str> = pred.split_whitespace().collect();
    let g: Vec<&str> = gt.split_whitespace().collect();
    if p.is_empty() {
        return if g.is_empty() { 1.0 } else { 0.0 };
    }
    let counts = |toks: &[&str], n: usize| {
        let mut m: HashMap<Vec<String>, usize> = HashMap::new();
        if toks.len() >= n {
            for w in toks.windows(n) {
                *m.entry(w.iter().map(|s| s.to_string()).collect()).or_default() += 1;
            }
        }
        m
    };
    let mut log_sum = 0.0;
    let mut orders = 0;
    for n in 1..=max_n {
        if p.len() < n {
            break;
        }
        let pc = counts(&p, n);
        let gc = counts(&g, n);
        let total = (p.len() + 1 - n) as f64;
        let clipped: usize = pc.iter().map(|(k, v)| (*v).min(*gc.get(k).unwrap_or(&0))).sum();
        let precision = (clipped as f64 / total).max(1e-9);
        log_sum += precision.ln();
        orders += 1;
    }
    let geo = (log_sum / orders as f64).exp();
    let bp = if p.len() < g.len() {
        (1.0 - g.len() as f64 / p.len() as f64).exp()
    } else {
        1.0
    };
    geo * bp
}

pub struct RefDetection {
    pub image: usize,
    pub class: usize,
    pub bbox: BBox,
    pub score: f64,
}

fn ref_iou(a: &BBox, b: &BBox) -> f64 {
    let w = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let h = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = w * h;
    let union = (a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// COCO-style mAP[0.5:0.95] following the reference evaluator's layout:
/// per image and class greedy matching, then a cumulative precision/recall
/// curve with a monotone envelope looked up at 101 recall thresholds via
/// left binary search. Classes without ground truth are excluded.
pub fn reference_map(preds: &[RefDetection], gts: &[RefDetection], classes: usize) -> f64 {
    let thresholds: Vec<f64> = (0..10).map(|i| 0.5 + 0.05 * i as f64).collect();
    let rec_thrs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let mut aps = Vec::new();
    for class in 0..classes {
        let g: Vec<&RefDetection> = gts.iter().filter(|d| d.class == class).collect();
        if g.is_empty() {
            continue;
        }
        let mut d: Vec<&RefDetection> = preds.iter().filter(|d| d.class == class).collect();
        d.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());
        let mut per_threshold = Vec::new();
        for &t in &thresholds {
            let mut used = vec![false; g.len()];
            let mut tps = Vec::with_capacity(d.len());
            for det in &d {
                let mut best = t.min(1.0 - 1e-10);
                let mut m: Option<usize> = None;
                for (gi, gt) in g.iter().enumerate() {
                    if used[gi] || gt.image != det.image {
                        continue;
                    }
                    let v = ref_iou(&det.bbox, &gt.bbox);
                    if v < best {
                        continue;
                    }
                    best = v;
                    m = Some(gi);
                }
                if let Some(gi) = m {
                    used[gi] = true;
                }
                tps.push(m.is_some());
            }
            let (mut tp, mut fp) = (0.0, 0.0);
            let mut rc = Vec::new();
            let mut pr = Vec::new();
            for &hit in &tps {
                if hit {
                    tp += 1.0
                } else {
                    fp += 1.0
                }
                rc.push(tp / g.len() as f64);
                pr.push(tp / (tp + fp));
            }
            for i in (1..pr.len()).rev() {
                if pr[i] > pr[i - 1] {
                    pr[i - 1] = pr[i];
                }
            }
            let mut q = 0.0;
            for &r in &rec_thrs {
                let idx = rc.partition_point(|&x| x < r);
                if idx < pr.len() {
                    q += pr[idx];
                }
            }
            per_threshold.push(q / rec_thrs.len() as f64);
        }
        aps.push(per_threshold.iter().sum::<f64>() / per_threshold.len() as f64);
    }
    if aps.is_empty() {
        f64::NAN
    } else {
        aps.iter().sum::<f64>() / aps.len() as f64
    }
}

/// Earliest start, then shortest period, of a tail loop with at least
/// `min_repeats` copies; returns the cut index `start + period`.
pub fn brute_force_repetition<T: PartialEq>(tokens: &[T], min_repeats: usize, max_period: usize) -> Option<usize> {
    let n = tokens.len();
    for start in 0..n {
        for period in 1..=max_period {
            if n - start < min_repeats * period {
                continue;
            }
            if (start + period..n).all(|i| tokens[i] == tokens[i - period]) {
                return Some(start + period);
            }
        }
    }
    None
}
