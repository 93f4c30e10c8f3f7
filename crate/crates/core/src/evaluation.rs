//! IR metrics over ranked link lists.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::AnswerSet;
use crate::error::{Error, Result};
use crate::rerank::TopK;
use crate::similarity::RankedList;

/// Recall levels 0.1, 0.2, ..., 1.0.
pub const RECALL_LEVELS: usize = 10;

/// Precision and recall of a set of retrieved `(source, target)` links.
/// Precision of an empty retrieval is 0.
pub fn precision_recall(
    retrieved: &BTreeSet<(String, String)>,
    gold: &AnswerSet,
) -> Result<(f64, f64)> {
    if gold.is_empty() {
        return Err(Error::EmptyGoldSet);
    }
    let correct = retrieved
        .iter()
        .filter(|(s, t)| gold.contains(s, t))
        .count() as f64;
    let precision = if retrieved.is_empty() {
        0.0
    } else {
        correct / retrieved.len() as f64
    };
    Ok((precision, correct / gold.len() as f64))
}

/// Sum of precision at every relevant rank, divided by `|gold|`. Gold items
/// missing from the list contribute nothing.
pub fn average_precision(ranked: &RankedList, gold: &BTreeSet<String>) -> Result<f64> {
    if gold.is_empty() {
        return Err(Error::EmptyGoldSet);
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (r, e) in ranked.entries.iter().enumerate() {
        if gold.contains(&e.id) {
            hits += 1;
            sum += hits as f64 / (r + 1) as f64;
        }
    }
    Ok(sum / gold.len() as f64)
}

fn gold_of(answers: &AnswerSet, source: &str) -> BTreeSet<String> {
    answers.targets_of(source).map(String::from).collect()
}

/// Mean AP over sources that have at least one gold link, summed in
/// ascending source-id order.
pub fn mean_average_precision(
    lists: &BTreeMap<String, RankedList>,
    answers: &AnswerSet,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut q = 0usize;
    for (source, list) in lists {
        let gold = gold_of(answers, source);
        if gold.is_empty() {
            continue;
        }
        sum += average_precision(list, &gold)?;
        q += 1;
    }
    if q == 0 {
        return Err(Error::NoEvaluableSources);
    }
    Ok(sum / q as f64)
}

/// `(1 + b^2) p r / (b^2 p + r)`, or 0 when the denominator vanishes.
pub fn f_beta(p: f64, r: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * p + r;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / denom
    }
}

/// Interpolated precision at recall 0.1..=1.0 for a relevance sequence in
/// rank order: at level `L`, the best precision over all cutoffs whose
/// recall reaches `L`, or 0 if none does.
fn interpolated<I: IntoIterator<Item = bool>>(relevance: I, total_gold: usize) -> [f64; RECALL_LEVELS] {
    let mut precision = Vec::new();
    let mut hits_at = Vec::new();
    let mut hits = 0usize;
    for (k, rel) in relevance.into_iter().enumerate() {
        hits += usize::from(rel);
        precision.push(hits as f64 / (k + 1) as f64);
        hits_at.push(hits);
    }
    // suffix maxima: best precision at any cutoff >= k
    let mut best_from = precision.clone();
    for k in (0..best_from.len().saturating_sub(1)).rev() {
        best_from[k] = best_from[k].max(best_from[k + 1]);
    }
    let mut out = [0.0; RECALL_LEVELS];
    for (i, slot) in out.iter_mut().enumerate() {
        let level = i + 1;
        // recall >= level/10, compared in integers
        if let Some(k) = hits_at.iter().position(|&h| h * RECALL_LEVELS >= level * total_gold) {
            *slot = best_from[k];
        }
    }
    out
}

/// Interpolated precision of one ranked list at the ten recall levels.
pub fn precision_at_recall_levels(
    ranked: &RankedList,
    gold: &BTreeSet<String>,
) -> Result<[f64; RECALL_LEVELS]> {
    if gold.is_empty() {
        return Err(Error::EmptyGoldSet);
    }
    Ok(interpolated(
        ranked.entries.iter().map(|e| gold.contains(&e.id)),
        gold.len(),
    ))
}

/// Corpus-level curve: every `(source, target)` pair of every list pooled
/// into one ranking by score (ties by source id, then target id) and scored
/// against the whole answer set.
pub fn pooled_precision_at_recall_levels(
    lists: &BTreeMap<String, RankedList>,
    answers: &AnswerSet,
) -> Result<[f64; RECALL_LEVELS]> {
    if answers.is_empty() {
        return Err(Error::EmptyGoldSet);
    }
    let mut pooled: Vec<(&str, &str, f64)> = lists
        .iter()
        .flat_map(|(s, l)| l.entries.iter().map(move |e| (s.as_str(), e.id.as_str(), e.score)))
        .collect();
    pooled.sort_by(|a, b| {
        b.2.total_cmp(&a.2)
            .then_with(|| a.0.as_bytes().cmp(b.0.as_bytes()))
            .then_with(|| a.1.as_bytes().cmp(b.1.as_bytes()))
    });
    Ok(interpolated(
        pooled.iter().map(|(s, t, _)| answers.contains(s, t)),
        answers.len(),
    ))
}

/// Per-source metrics. `ap` and `recall_at_k` are `None` for sources
/// without gold links.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceMetrics {
    pub ap: Option<f64>,
    pub precision_at_k: f64,
    pub recall_at_k: Option<f64>,
}

/// MAP and the P-R curve are computed on the full reordered lists;
/// precision, recall and F-scores on the top-k cut.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_sa: BTreeMap<String, SourceMetrics>,
    pub map: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f2: f64,
    pub pr_curve: [f64; RECALL_LEVELS],
}

pub fn evaluate(
    lists: &BTreeMap<String, RankedList>,
    answers: &AnswerSet,
    top_k: TopK,
) -> Result<EvalReport> {
    let mut per_sa = BTreeMap::new();
    let mut retrieved = BTreeSet::new();
    for (source, list) in lists {
        let gold = gold_of(answers, source);
        let cut = list.top(top_k.apply(list.len()));
        let hits = cut.iter().filter(|e| gold.contains(&e.id)).count() as f64;
        for e in cut {
            retrieved.insert((source.clone(), e.id.clone()));
        }
        let metrics = SourceMetrics {
            ap: if gold.is_empty() {
                None
            } else {
                Some(average_precision(list, &gold)?)
            },
            precision_at_k: if cut.is_empty() { 0.0 } else { hits / cut.len() as f64 },
            recall_at_k: (!gold.is_empty()).then(|| hits / gold.len() as f64),
        };
        per_sa.insert(source.clone(), metrics);
    }
    let (precision, recall) = precision_recall(&retrieved, answers)?;
    Ok(EvalReport {
        per_sa,
        map: mean_average_precision(lists, answers)?,
        precision,
        recall,
        f1: f_beta(precision, recall, 1.0),
        f2: f_beta(precision, recall, 2.0),
        pr_curve: pooled_precision_at_recall_levels(lists, answers)?,
    })
}
