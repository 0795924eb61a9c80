//! Batch evaluation of predictions against ground truth.
//!
//! Items are paired by id, scored in parallel and reported in ground truth
//! manifest order. An item whose payload cannot be read or interpreted is
//! recorded with an error and counted as skipped.

use std::collections::{BTreeMap, BTreeSet};

use doctags_core::export::{to_markdown, MarkdownOptions};
use doctags_core::geometry::{decode_loc, evaluate_map, BBox, Detection, MapReport};
use doctags_core::latex::normalize;
use doctags_core::metrics::{teds, text_score};
use doctags_core::otsl::{grid_to_html, html_to_grid, parse_html_table, HtmlNode};
use doctags_core::{parse_lenient, BlockKind, Diagnostic, Document};
use rayon::prelude::*;
use serde::Serialize;

use crate::codes;
use crate::json::from_json;
use crate::labels::LabelMap;
use crate::manifest::{Entry, Format, Manifest};
use crate::policy::LoadedPolicy;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

type DetectionPair = (Vec<Detection>, Vec<Detection>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Text,
    Table,
    Layout,
    Formula,
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub task: Task,
    pub policy: LoadedPolicy,
    pub labels: LabelMap,
}

impl EvalConfig {
    pub fn new(task: Task) -> Self {
        EvalConfig {
            task,
            policy: LoadedPolicy::builtin(),
            labels: LabelMap::builtin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemError {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemRecord {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<BTreeMap<&'static str, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ItemError>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub task: Task,
    pub items: Vec<ItemRecord>,
    /// Mean of each score over the items that were scored. For layout,
    /// `map` is computed over all detections at once.
    pub aggregate: BTreeMap<&'static str, f64>,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<MapReport>,
    pub diagnostics: Vec<Diagnostic>,
}

fn item_error(diagnostic: Diagnostic) -> ItemError {
    ItemError {
        code: diagnostic.code,
        message: diagnostic.message,
    }
}

fn unsupported(format: Format, task: Task) -> Diagnostic {
    Diagnostic::error(
        codes::FORMAT_UNSUPPORTED,
        format!("{format:?} payloads cannot be used for the {task:?} task"),
    )
}

fn document(entry: &Entry, payload: &str) -> Result<Document, Diagnostic> {
    match entry.format() {
        Format::Doctags => Ok(parse_lenient(payload).0),
        Format::Json => from_json(payload).map_err(|mut d| d.remove(0)),
        other => Err(unsupported(other, Task::Text)),
    }
}

/// Pairs the two manifests by id. Both must list the same ids, each once.
pub fn pair<'a>(pred: &'a Manifest, gt: &'a Manifest) -> Result<Vec<(&'a Entry, &'a Entry)>, Diagnostic> {
    let mut by_id = BTreeMap::new();
    for entry in &pred.entries {
        if by_id.insert(entry.id.as_str(), entry).is_some() {
            return Err(Diagnostic::error(
                codes::ID_MISMATCH,
                format!("id `{}` appears twice in the prediction manifest", entry.id),
            ));
        }
    }
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::with_capacity(gt.entries.len());
    for entry in &gt.entries {
        if !seen.insert(entry.id.as_str()) {
            return Err(Diagnostic::error(
                codes::ID_MISMATCH,
                format!("id `{}` appears twice in the ground truth manifest", entry.id),
            ));
        }
        let Some(p) = by_id.remove(entry.id.as_str()) else {
            return Err(Diagnostic::error(
                codes::ID_MISMATCH,
                format!("id `{}` has no prediction", entry.id),
            ));
        };
        pairs.push((p, entry));
    }
    if let Some(extra) = by_id.keys().next() {
        return Err(Diagnostic::error(
            codes::ID_MISMATCH,
            format!("prediction `{extra}` has no ground truth"),
        ));
    }
    Ok(pairs)
}

pub fn evaluate(pred: &Manifest, gt: &Manifest, config: &EvalConfig) -> Result<Report, Diagnostic> {
    let pairs = pair(pred, gt)?;
    let (items, layout) = match config.task {
        Task::Layout => {
            let loaded: Vec<Result<DetectionPair, Diagnostic>> = pairs
                .par_iter()
                .map(|(p, g)| {
                    let preds = detections(p, &pred.base, &config.labels, true)?;
                    let truths = detections(g, &gt.base, &config.labels, false)?;
                    Ok((preds, truths))
                })
                .collect();
            let classes = config.labels.class_names();
            let mut all_preds = Vec::new();
            let mut all_truths = Vec::new();
            let items: Vec<ItemRecord> = pairs
                .iter()
                .zip(loaded)
                .map(|((_, g), result)| match result {
                    Ok((preds, truths)) => {
                        let single = evaluate_map(&preds, &truths, &classes);
                        let mut scores = BTreeMap::new();
                        if let Some(map) = single.map {
                            scores.insert("map", map);
                        }
                        all_preds.extend(preds);
                        all_truths.extend(truths);
                        ItemRecord {
                            id: g.id.clone(),
                            scores: Some(scores),
                            error: None,
                        }
                    }
                    Err(e) => ItemRecord {
                        id: g.id.clone(),
                        scores: None,
                        error: Some(item_error(e)),
                    },
                })
                .collect();
            (items, Some(evaluate_map(&all_preds, &all_truths, &classes)))
        }
        _ => {
            let items = pairs
                .par_iter()
                .map(|(p, g)| {
                    let outcome = score_pair(p, &pred.base, g, &gt.base, config);
                    match outcome {
                        Ok(scores) => ItemRecord {
                            id: g.id.clone(),
                            scores: Some(scores),
                            error: None,
                        },
                        Err(e) => ItemRecord {
                            id: g.id.clone(),
                            scores: None,
                            error: Some(item_error(e)),
                        },
                    }
                })
                .collect();
            (items, None)
        }
    };

    let skipped = items.iter().filter(|i| i.error.is_some()).count();
    let mut aggregate = mean_scores(&items);
    let mut diagnostics = Vec::new();
    if let Some(report) = &layout {
        aggregate.remove("map");
        if let Some(map) = report.map {
            aggregate.insert("map", map);
        }
        diagnostics.extend(report.diagnostics.iter().cloned());
    }
    Ok(Report {
        schema_version: REPORT_SCHEMA_VERSION,
        task: config.task,
        items,
        aggregate,
        skipped,
        policy_sha256: (config.task == Task::Formula).then(|| config.policy.sha256.clone()),
        layout,
        diagnostics,
    })
}

fn mean_scores(items: &[ItemRecord]) -> BTreeMap<&'static str, f64> {
    let mut sums: BTreeMap<&'static str, (f64, usize)> = BTreeMap::new();
    for scores in items.iter().filter_map(|i| i.scores.as_ref()) {
        for (&name, &value) in scores {
            let slot = sums.entry(name).or_insert((0.0, 0));
            slot.0 += value;
            slot.1 += 1;
        }
    }
    sums.into_iter().map(|(k, (sum, n))| (k, sum / n as f64)).collect()
}

fn score_pair(
    pred: &Entry,
    pred_base: &std::path::Path,
    gt: &Entry,
    gt_base: &std::path::Path,
    config: &EvalConfig,
) -> Result<BTreeMap<&'static str, f64>, Diagnostic> {
    let p = pred.payload(pred_base)?;
    let g = gt.payload(gt_base)?;
    let mut scores = BTreeMap::new();
    match config.task {
        Task::Text | Task::Formula => {
            let (p, g) = if config.task == Task::Text {
                (plain_text(pred, &p)?, plain_text(gt, &g)?)
            } else {
                let policy = &config.policy.policy;
                (normalize(&formula_source(pred, &p)?, policy), normalize(&formula_source(gt, &g)?, policy))
            };
            let s = text_score(&p, &g);
            scores.insert("edit_distance", s.edit_distance);
            scores.insert("precision", s.precision);
            scores.insert("recall", s.recall);
            scores.insert("f1", s.f1);
            scores.insert("bleu", s.bleu);
        }
        Task::Table => {
            let p = table_html(pred, &p)?;
            let g = table_html(gt, &g)?;
            scores.insert("teds", teds(&p, &g, false)?);
            scores.insert("teds_structure", teds(&p, &g, true)?);
        }
        Task::Layout => unreachable!("layout is scored over the whole batch"),
    }
    Ok(scores)
}

/// Text as compared by the text task: DocTags and JSON documents are
/// exported to Markdown first.
fn plain_text(entry: &Entry, payload: &str) -> Result<String, Diagnostic> {
    match entry.format() {
        Format::Markdown | Format::Text => Ok(payload.to_string()),
        Format::Doctags | Format::Json => Ok(to_markdown(&document(entry, payload)?, MarkdownOptions::default())),
        other => Err(unsupported(other, Task::Text)),
    }
}

fn formula_source(entry: &Entry, payload: &str) -> Result<String, Diagnostic> {
    match entry.format() {
        Format::Latex | Format::Text => Ok(payload.to_string()),
        Format::Doctags | Format::Json => {
            let doc = document(entry, payload)?;
            let formulas: Vec<&str> = doc
                .blocks()
                .filter(|b| b.kind == BlockKind::Formula)
                .map(|b| b.text.as_str())
                .collect();
            Ok(formulas.join("\n"))
        }
        other => Err(unsupported(other, Task::Formula)),
    }
}

/// The first table of the payload, laid out on a grid and rendered back so
/// that equivalent markup compares equal.
fn table_html(entry: &Entry, payload: &str) -> Result<HtmlNode, Diagnostic> {
    let grid = match entry.format() {
        Format::Html => html_to_grid(&parse_html_table(payload)?)?.0,
        Format::Doctags | Format::Json => {
            let doc = document(entry, payload)?;
            let found = doc
                .blocks()
                .find(|b| b.kind == BlockKind::Otsl)
                .and_then(|b| b.table.clone());
            found.ok_or_else(|| {
                Diagnostic::error(
                    doctags_core::diagnostic::codes::TABLE_MISSING,
                    format!("entry `{}` contains no table", entry.id),
                )
            })?
        }
        other => return Err(unsupported(other, Task::Table)),
    };
    Ok(grid_to_html(&grid))
}

fn detections(entry: &Entry, base: &std::path::Path, labels: &LabelMap, predicted: bool) -> Result<Vec<Detection>, Diagnostic> {
    if let Some(records) = &entry.detections {
        return Ok(records
            .iter()
            .map(|r| Detection {
                label: labels.canonical(&r.label).to_string(),
                page: entry.id.clone(),
                bbox: BBox::new(r.bbox[0], r.bbox[1], r.bbox[2], r.bbox[3]),
                score: if predicted { Some(r.score.unwrap_or(1.0)) } else { None },
            })
            .collect());
    }
    let payload = entry.payload(base)?;
    let doc = document(entry, &payload)?;
    let (Some(width), Some(height)) = (entry.page_width, entry.page_height) else {
        return Err(Diagnostic::error(
            codes::MANIFEST_INVALID,
            format!("entry `{}` needs page_width and page_height", entry.id),
        ));
    };
    let mut out = Vec::new();
    for (n, page) in doc.pages.iter().enumerate() {
        let page_id = if doc.pages.len() == 1 {
            entry.id.clone()
        } else {
            format!("{}#{}", entry.id, n)
        };
        for block in page.blocks.iter().flat_map(|b| b.walk()) {
            let (Some(loc), Some(class)) = (block.loc, labels.class_of_kind(block.kind)) else {
                continue;
            };
            let pixel = decode_loc(loc, width, height).map_err(|e| Diagnostic::error(codes::MANIFEST_INVALID, e.to_string()))?;
            out.push(Detection {
                label: class.to_string(),
                page: page_id.clone(),
                bbox: pixel.bbox,
                score: predicted.then_some(1.0),
            });
        }
    }
    Ok(out)
}
