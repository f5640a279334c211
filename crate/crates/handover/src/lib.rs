//! Scenario files, JSONL traces, batch runs and the summary table for the
//! handover simulator in `handover_core`.

pub mod batch;
pub mod scenario_file;
pub mod trace_io;
