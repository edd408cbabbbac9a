//! Metrics, end-to-end pipeline evaluation, and error reporting.

mod metrics;
mod pipeline;
mod report;

pub use metrics::{micro_f1, per_class_metrics, ClassMetrics};
pub use pipeline::{
    run_condition, summarize_e2e, DmEvalReport, E2eSummary, EvalReport, PipelineCondition,
};
pub use report::{
    error_report, format_error_table, format_transcript_table, mispredicted_rows,
    save_error_report, save_transcript_rows, transcript_rows, ErrorReport, ErrorRow,
    TranscriptRow,
};
