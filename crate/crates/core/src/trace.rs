//! Line-delimited JSON traces. Every line is one [`TraceRecord`] with object
//! keys in sorted order, so traces of identical runs are byte-identical.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::engine::{HaltReason, Trace};
use crate::error::TraceError;
use crate::fssp::{sync_from_states, SyncReport};
use crate::rule::StateId;
use crate::symbol::{CellId, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub id: CellId,
    pub state: StateId,
    /// Absent on steps a sampled trace did not snapshot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contents: Option<Vec<(Symbol, u32)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceRecord {
    pub step_index: u64,
    pub cells: Vec<CellRecord>,
    /// Set on the final record of a run that halted on its own.
    pub halted: bool,
    /// Present on the final record only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sync: Option<SyncReport>,
}

/// Flattens a recorded run into trace records; `report` goes on the last one.
pub fn records(trace: &Trace, report: &SyncReport) -> Vec<TraceRecord> {
    let last = trace.records.len().saturating_sub(1);
    trace
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let cells = r
                .states
                .iter()
                .map(|(&id, state)| CellRecord {
                    id,
                    state: state.clone(),
                    contents: r
                        .snapshot
                        .as_ref()
                        .and_then(|s| s.cell(id))
                        .map(|c| c.contents.iter().map(|(sym, n)| (sym.clone(), n)).collect()),
                })
                .collect();
            TraceRecord {
                step_index: r.step_index,
                cells,
                halted: i == last && trace.halt == HaltReason::Halted,
                sync: (i == last).then(|| report.clone()),
            }
        })
        .collect()
}

/// One record as a single JSON line with sorted keys.
pub fn to_line(record: &TraceRecord) -> String {
    // serde_json's map type is ordered by key
    let value = serde_json::to_value(record).expect("trace records are plain data");
    value.to_string()
}

pub fn write_trace<W: Write>(mut out: W, records: &[TraceRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", to_line(r))?;
    }
    out.flush()
}

/// Parses a trace, rejecting malformed lines and non-increasing step indices.
/// Blank lines are skipped.
pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceRecord>, TraceError> {
    let mut out: Vec<TraceRecord> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TraceRecord =
            serde_json::from_str(&line).map_err(|e| TraceError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })?;
        if out
            .last()
            .is_some_and(|prev| prev.step_index >= record.step_index)
        {
            return Err(TraceError::NotIncreasing {
                line: i + 1,
                step: record.step_index,
            });
        }
        out.push(record);
    }
    if out.is_empty() {
        return Err(TraceError::Empty);
    }
    Ok(out)
}

/// Recomputes the firing verdict from the records alone. A trace whose last
/// record is not marked halted counts as incomplete.
pub fn check_records(records: &[TraceRecord]) -> SyncReport {
    let states: Vec<(u64, std::collections::BTreeMap<CellId, StateId>)> = records
        .iter()
        .map(|r| {
            (
                r.step_index,
                r.cells.iter().map(|c| (c.id, c.state.clone())).collect(),
            )
        })
        .collect();
    let halted = records.last().is_some_and(|r| r.halted);
    sync_from_states(states.iter().map(|(s, m)| (*s, m)), halted)
}
