//! Classification metrics over parallel gold/predicted label slices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Micro-averaged F1 over single-label predictions. With exactly one
/// prediction per sample every error is both a false positive and a
/// false negative, so this equals accuracy; it is reported as micro-F1
/// for comparability with multi-label setups.
pub fn micro_f1(gold: &[String], pred: &[String]) -> Result<f64> {
    if gold.len() != pred.len() {
        return Err(Error::Validation(format!(
            "gold has {} labels, predictions have {}",
            gold.len(),
            pred.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Validation("cannot score zero samples".into()));
    }
    let tp = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    let fp = gold.len() - tp;
    let f_n = fp;
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + f_n) as f64;
    if precision + recall == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub support: usize,
    pub correct: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Most frequent wrong prediction for this gold label, if any.
    pub top_confusion: Option<(String, usize)>,
}

/// Per-label precision/recall/F1 with confusion summaries, keyed by gold
/// label in sorted order.
pub fn per_class_metrics(gold: &[String], pred: &[String]) -> Result<BTreeMap<String, ClassMetrics>> {
    if gold.len() != pred.len() {
        return Err(Error::Validation(format!(
            "gold has {} labels, predictions have {}",
            gold.len(),
            pred.len()
        )));
    }
    let mut support: BTreeMap<&str, usize> = BTreeMap::new();
    let mut predicted: BTreeMap<&str, usize> = BTreeMap::new();
    let mut correct: BTreeMap<&str, usize> = BTreeMap::new();
    let mut confusions: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for (g, p) in gold.iter().zip(pred) {
        *support.entry(g).or_default() += 1;
        *predicted.entry(p).or_default() += 1;
        if g == p {
            *correct.entry(g).or_default() += 1;
        } else {
            *confusions.entry(g).or_default().entry(p).or_default() += 1;
        }
    }
    let mut out = BTreeMap::new();
    for (label, &sup) in &support {
        let tp = correct.get(label).copied().unwrap_or(0);
        let pred_n = predicted.get(label).copied().unwrap_or(0);
        let precision = if pred_n == 0 {
            0.0
        } else {
            tp as f64 / pred_n as f64
        };
        let recall = tp as f64 / sup as f64;
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        let top_confusion = confusions.get(label).and_then(|m| {
            m.iter()
                .max_by_key(|(name, &n)| (n, std::cmp::Reverse(*name)))
                .map(|(name, &n)| (name.to_string(), n))
        });
        out.insert(
            label.to_string(),
            ClassMetrics {
                support: sup,
                correct: tp,
                precision,
                recall,
                f1,
                top_confusion,
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_predictions_score_one() {
        let g = labels(&["a", "b", "a"]);
        assert_eq!(micro_f1(&g, &g).unwrap(), 1.0);
    }

    #[test]
    fn micro_f1_equals_accuracy_for_single_label() {
        let g = labels(&["a", "a", "b", "c"]);
        let p = labels(&["a", "b", "b", "b"]);
        assert!((micro_f1(&g, &p).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_error() {
        let g = labels(&["a", "b"]);
        let p = labels(&["a"]);
        assert!(micro_f1(&g, &p).is_err());
        assert!(per_class_metrics(&g, &p).is_err());
    }

    #[test]
    fn per_class_counts_and_confusions() {
        let g = labels(&["a", "a", "a", "b"]);
        let p = labels(&["a", "b", "b", "b"]);
        let m = per_class_metrics(&g, &p).unwrap();
        let a = &m["a"];
        assert_eq!(a.support, 3);
        assert_eq!(a.correct, 1);
        assert_eq!(a.top_confusion, Some(("b".to_string(), 2)));
        let b = &m["b"];
        assert_eq!(b.support, 1);
        assert!((b.precision - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(b.recall, 1.0);
    }
}
