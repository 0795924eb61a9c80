//! COCO-style mean average precision over IoU thresholds 0.50:0.05:0.95.
//!
//! Predictions are matched to ground truth per class and per page, greedily
//! in descending score order, one-to-one. Each threshold yields a
//! precision/recall curve whose monotone envelope is sampled at 101 recall
//! points; the class AP is the mean over thresholds and the mAP is the mean
//! over classes that have ground truth.
//!
//! Equal scores are ordered by page id and then box coordinates, so the
//! result does not depend on input order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{iou, BBox};
use crate::diagnostic::{codes, Diagnostic};

pub const IOU_THRESHOLDS: [f64; 10] = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];
pub const RECALL_POINTS: usize = 101;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Detection {
    pub label: String,
    /// Page (image) the detection belongs to.
    pub page: String,
    pub bbox: BBox,
    /// Confidence for predictions; `None` for ground truth.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub score: Option<f64>,
}

impl Detection {
    pub fn truth(label: impl Into<String>, page: impl Into<String>, bbox: BBox) -> Self {
        Detection {
            label: label.into(),
            page: page.into(),
            bbox,
            score: None,
        }
    }

    pub fn predicted(label: impl Into<String>, page: impl Into<String>, bbox: BBox, score: f64) -> Self {
        Detection {
            label: label.into(),
            page: page.into(),
            bbox,
            score: Some(score),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClassAp {
    pub label: String,
    pub ground_truth: usize,
    pub predictions: usize,
    /// Mean AP over thresholds; `None` when the class has no ground truth.
    pub ap: Option<f64>,
    /// AP at each entry of [`IOU_THRESHOLDS`].
    pub ap_per_threshold: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MapReport {
    pub per_class: Vec<ClassAp>,
    /// Mean of the class APs that are defined; `None` if no class has
    /// ground truth.
    pub map: Option<f64>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn evaluate_map(preds: &[Detection], gts: &[Detection], classes: &[&str]) -> MapReport {
    let mut diagnostics = Vec::new();
    let known: BTreeSet<&str> = classes.iter().copied().collect();
    let mut unknown = BTreeSet::new();
    for d in preds.iter().chain(gts) {
        if !known.contains(d.label.as_str()) {
            unknown.insert(d.label.as_str());
        }
    }
    for label in unknown {
        diagnostics.push(Diagnostic::warning(
            codes::UNKNOWN_CLASS,
            format!("detections labelled `{label}` ignored"),
        ));
    }
    let unscored = preds.iter().filter(|d| d.score.is_none()).count();
    if unscored > 0 {
        diagnostics.push(Diagnostic::warning(
            codes::MISSING_SCORE,
            format!("{unscored} prediction(s) without a score ignored"),
        ));
    }

    let per_class: Vec<ClassAp> = classes
        .iter()
        .map(|&label| class_ap(label, preds, gts))
        .collect();
    let defined: Vec<f64> = per_class.iter().filter_map(|c| c.ap).collect();
    let map = if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    };
    MapReport {
        per_class,
        map,
        diagnostics,
    }
}

fn class_ap(label: &str, preds: &[Detection], gts: &[Detection]) -> ClassAp {
    let mut truth: BTreeMap<&str, Vec<BBox>> = BTreeMap::new();
    for g in gts.iter().filter(|g| g.label == label) {
        truth.entry(g.page.as_str()).or_default().push(g.bbox);
    }
    let n_truth: usize = truth.values().map(Vec::len).sum();

    let mut ranked: Vec<(&Detection, f64)> = preds
        .iter()
        .filter(|p| p.label == label)
        .filter_map(|p| p.score.map(|s| (p, s)))
        .collect();
    ranked.sort_by(|(a, sa), (b, sb)| {
        sb.total_cmp(sa)
            .then_with(|| a.page.cmp(&b.page))
            .then_with(|| cmp_box(&a.bbox, &b.bbox))
    });

    if n_truth == 0 {
        return ClassAp {
            label: label.into(),
            ground_truth: 0,
            predictions: ranked.len(),
            ap: None,
            ap_per_threshold: Vec::new(),
        };
    }

    let ap_per_threshold: Vec<f64> = IOU_THRESHOLDS
        .iter()
        .map(|&threshold| {
            let mut used: BTreeMap<&str, Vec<bool>> = truth
                .iter()
                .map(|(page, boxes)| (*page, vec![false; boxes.len()]))
                .collect();
            let hits: Vec<bool> = ranked
                .iter()
                .map(|(pred, _)| {
                    let Some(boxes) = truth.get(pred.page.as_str()) else {
                        return false;
                    };
                    let taken = used.get_mut(pred.page.as_str()).expect("same keys");
                    let mut best: Option<(usize, f64)> = None;
                    for (i, gt) in boxes.iter().enumerate() {
                        if taken[i] {
                            continue;
                        }
                        let overlap = iou(&pred.bbox, gt);
                        if overlap >= threshold && best.is_none_or(|(_, b)| overlap > b) {
                            best = Some((i, overlap));
                        }
                    }
                    match best {
                        Some((i, _)) => {
                            taken[i] = true;
                            true
                        }
                        None => false,
                    }
                })
                .collect();
            interpolated_ap(&hits, n_truth)
        })
        .collect();

    let ap = ap_per_threshold.iter().sum::<f64>() / ap_per_threshold.len() as f64;
    ClassAp {
        label: label.into(),
        ground_truth: n_truth,
        predictions: ranked.len(),
        ap: Some(ap),
        ap_per_threshold,
    }
}

fn cmp_box(a: &BBox, b: &BBox) -> Ordering {
    a.x1.total_cmp(&b.x1)
        .then_with(|| a.y1.total_cmp(&b.y1))
        .then_with(|| a.x2.total_cmp(&b.x2))
        .then_with(|| a.y2.total_cmp(&b.y2))
}

/// 101-point interpolated AP for a ranked list of hit/miss outcomes.
fn interpolated_ap(hits: &[bool], n_truth: usize) -> f64 {
    let mut recall = Vec::with_capacity(hits.len());
    let mut precision = Vec::with_capacity(hits.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    for &hit in hits {
        if hit {
            tp += 1;
        } else {
            fp += 1;
        }
        recall.push(tp as f64 / n_truth as f64);
        precision.push(tp as f64 / (tp + fp) as f64);
    }
    for i in (1..precision.len()).rev() {
        if precision[i] > precision[i - 1] {
            precision[i - 1] = precision[i];
        }
    }
    let mut total = 0.0;
    let mut cursor = 0;
    for k in 0..RECALL_POINTS {
        let point = k as f64 * 0.01;
        while cursor < recall.len() && recall[cursor] < point {
            cursor += 1;
        }
        if cursor < recall.len() {
            total += precision[cursor];
        }
    }
    total / RECALL_POINTS as f64
}
