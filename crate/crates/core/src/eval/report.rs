//! Human-readable and machine-readable error breakdowns per intent.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::metrics::per_class_metrics;
use super::pipeline::EvalReport;

/// One evaluated utterance: what the child said, what the recognizer
/// heard, and how the NLU labelled it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRow {
    pub transcription: String,
    pub asr_output: String,
    pub gold_intent: String,
    pub predicted_intent: String,
}

/// Per-utterance rows from an evaluation that kept its transcripts.
pub fn transcript_rows(report: &EvalReport) -> Result<Vec<TranscriptRow>> {
    let n = report.gold_intents.len();
    if n == 0 {
        return Err(Error::Validation(
            "evaluation report carries no transcripts".into(),
        ));
    }
    if report.predicted_intents.len() != n
        || report.reference_texts.len() != n
        || report.asr_texts.len() != n
    {
        return Err(Error::Validation(
            "evaluation report transcript lists are out of sync".into(),
        ));
    }
    Ok((0..n)
        .map(|i| TranscriptRow {
            transcription: report.reference_texts[i].clone(),
            asr_output: report.asr_texts[i].clone(),
            gold_intent: report.gold_intents[i].clone(),
            predicted_intent: report.predicted_intents[i].clone(),
        })
        .collect())
}

/// Keep only rows the model got wrong.
pub fn mispredicted_rows(rows: &[TranscriptRow]) -> Vec<TranscriptRow> {
    rows.iter()
        .filter(|r| r.gold_intent != r.predicted_intent)
        .cloned()
        .collect()
}

/// Aligned text table of transcript rows for terminal output.
pub fn format_transcript_table(rows: &[TranscriptRow]) -> String {
    let text_w = rows
        .iter()
        .flat_map(|r| [r.transcription.len(), r.asr_output.len()])
        .max()
        .unwrap_or(13)
        .max(13);
    let intent_w = rows
        .iter()
        .flat_map(|r| [r.gold_intent.len(), r.predicted_intent.len()])
        .max()
        .unwrap_or(4)
        .max(9);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<text_w$}  {:<text_w$}  {:<intent_w$}  {}\n",
        "transcription", "asr output", "gold", "predicted"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<text_w$}  {:<text_w$}  {:<intent_w$}  {}\n",
            row.transcription, row.asr_output, row.gold_intent, row.predicted_intent
        ));
    }
    out
}

/// One JSON object per transcript row.
pub fn save_transcript_rows(rows: &[TranscriptRow], path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub intent: String,
    pub support: usize,
    pub correct: usize,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_confusion: Option<(String, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
    pub overall_accuracy: f64,
}

/// Per-intent error rows, most frequent gold intent first (ties broken
/// alphabetically so output is stable).
pub fn error_report(gold: &[String], pred: &[String]) -> Result<ErrorReport> {
    let metrics = per_class_metrics(gold, pred)?;
    let mut rows: Vec<ErrorRow> = metrics
        .into_iter()
        .map(|(intent, m)| ErrorRow {
            intent,
            support: m.support,
            correct: m.correct,
            accuracy: m.recall,
            top_confusion: m.top_confusion,
        })
        .collect();
    rows.sort_by(|a, b| b.support.cmp(&a.support).then(a.intent.cmp(&b.intent)));
    let total: usize = rows.iter().map(|r| r.support).sum();
    let correct: usize = rows.iter().map(|r| r.correct).sum();
    Ok(ErrorReport {
        rows,
        overall_accuracy: if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        },
    })
}

/// Fixed-width text table for terminal output.
pub fn format_error_table(report: &ErrorReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<18} {:>7} {:>8} {:>9}  {}\n",
        "intent", "support", "correct", "accuracy", "top confusion"
    ));
    for row in &report.rows {
        let confusion = row
            .top_confusion
            .as_ref()
            .map(|(name, n)| format!("{name} ({n})"))
            .unwrap_or_else(|| "-".to_string());
        out.push_str(&format!(
            "{:<18} {:>7} {:>8} {:>8.1}%  {}\n",
            row.intent,
            row.support,
            row.correct,
            row.accuracy * 100.0,
            confusion
        ));
    }
    out.push_str(&format!(
        "overall accuracy: {:.1}% over {} samples\n",
        report.overall_accuracy * 100.0,
        report.rows.iter().map(|r| r.support).sum::<usize>()
    ));
    out
}

/// One JSON object per row, in table order.
pub fn save_error_report(report: &ErrorReport, path: &Path) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for row in &report.rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rows_sorted_by_support_then_name() {
        let gold = labels(&["b", "b", "a", "a", "c", "c", "c"]);
        let pred = labels(&["b", "a", "a", "a", "c", "c", "b"]);
        let report = error_report(&gold, &pred).unwrap();
        let order: Vec<&str> = report.rows.iter().map(|r| r.intent.as_str()).collect();
        assert_eq!(order, vec!["c", "a", "b"]);
        assert_eq!(report.rows[0].top_confusion, Some(("b".to_string(), 1)));
        assert!((report.overall_accuracy - 5.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn table_mentions_every_intent() {
        let gold = labels(&["x", "y"]);
        let pred = labels(&["x", "x"]);
        let report = error_report(&gold, &pred).unwrap();
        let table = format_error_table(&report);
        assert!(table.contains("x") && table.contains("y"));
        assert!(table.contains("overall accuracy"));
    }

    #[test]
    fn transcript_rows_zip_report_fields() {
        let report = EvalReport {
            condition: "wer-0.30".into(),
            measured_wer: 0.3,
            intent_micro_f1: 0.5,
            num_utterances: 2,
            per_intent: Default::default(),
            gold_intents: labels(&["affirm", "deny"]),
            predicted_intents: labels(&["affirm", "affirm"]),
            reference_texts: labels(&["yes please", "no thanks"]),
            asr_texts: labels(&["yes police", "oh thanks"]),
            dm: None,
        };
        let rows = transcript_rows(&report).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].transcription, "no thanks");
        assert_eq!(rows[1].asr_output, "oh thanks");
        let wrong = mispredicted_rows(&rows);
        assert_eq!(wrong.len(), 1);
        assert_eq!(wrong[0].gold_intent, "deny");
        let table = format_transcript_table(&rows);
        assert!(table.starts_with("transcription"));
        assert!(table.contains("yes police"));
        // stripped report has no transcripts to tabulate
        assert!(transcript_rows(&report.without_transcripts()).is_err());
    }

    #[test]
    fn jsonl_roundtrip() {
        let gold = labels(&["x", "y", "y"]);
        let pred = labels(&["x", "y", "x"]);
        let report = error_report(&gold, &pred).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("errors.jsonl");
        save_error_report(&report, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let rows: Vec<ErrorRow> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(rows, report.rows);
    }
}
