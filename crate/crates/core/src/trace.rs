//! Input traces, deterministic replay and snapshot logs.
//!
//! A trace is JSON lines: a header object followed by one raw input event per
//! line. A snapshot log holds one `{"eventIndex":n,"snapshot":{..}}` per line,
//! where `n` counts processed events and 0 is the initial state.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::ChartSpec;
use crate::config::{ConfigError, EngineConfig};
use crate::data::Dataset;
use crate::engine::{Engine, EngineError};
use crate::gesture::{ProtocolError, RawInputEvent};
use crate::snapshot::Canon;

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("trace is empty; expected a header line")]
    MissingHeader,
    #[error("unsupported trace version {0}")]
    Version(u32),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("event {event_index}: {error}")]
    Protocol { event_index: usize, error: ProtocolError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub v: u32,
    /// Informational reference to the chart spec the trace was recorded on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    /// Engine config keys overriding the base configuration.
    #[serde(default)]
    pub config: serde_json::Map<String, serde_json::Value>,
}

impl Default for TraceHeader {
    fn default() -> Self {
        Self {
            v: TRACE_VERSION,
            spec: None,
            data: None,
            config: serde_json::Map::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InputTrace {
    pub header: TraceHeader,
    pub events: Vec<RawInputEvent>,
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_default()
}

impl InputTrace {
    pub fn new(header: TraceHeader, events: Vec<RawInputEvent>) -> Self {
        Self { header, events }
    }

    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(TraceError::MissingHeader)?;
        let header: TraceHeader = serde_json::from_str(first).map_err(|e| TraceError::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        if header.v != TRACE_VERSION {
            return Err(TraceError::Version(header.v));
        }
        let events = lines
            .map(|(i, line)| {
                serde_json::from_str(line).map_err(|e| TraceError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { header, events })
    }

    pub fn to_text(&self) -> String {
        let mut out = to_json_line(&self.header);
        out.push('\n');
        for e in &self.events {
            out.push_str(&to_json_line(e));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotPolicy {
    /// The initial snapshot plus one after every event.
    Event,
    /// The initial snapshot plus one whenever the snapshot changes.
    #[default]
    Change,
    /// A single snapshot after the last event.
    Final,
}

impl FromStr for SnapshotPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "event" => Ok(Self::Event),
            "change" => Ok(Self::Change),
            "final" => Ok(Self::Final),
            other => Err(format!("unknown snapshot policy `{other}` (expected event, change or final)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotEntry {
    pub event_index: usize,
    /// Canonical snapshot text.
    pub snapshot: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SnapshotLog {
    pub entries: Vec<SnapshotEntry>,
}

impl SnapshotLog {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "{{\"eventIndex\":{},\"snapshot\":{}}}", e.event_index, e.snapshot);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut entries: Vec<SnapshotEntry> = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let err = |message: String| TraceError::Parse { line: i + 1, message };
            let value: serde_json::Value = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
            let event_index = value
                .get("eventIndex")
                .and_then(serde_json::Value::as_u64)
                .ok_or_else(|| err("missing eventIndex".into()))? as usize;
            let snapshot = value.get("snapshot").ok_or_else(|| err("missing snapshot".into()))?;
            if entries.last().is_some_and(|prev| prev.event_index >= event_index) {
                return Err(err("eventIndex must be strictly increasing".into()));
            }
            entries.push(SnapshotEntry {
                event_index,
                snapshot: Canon::from_json(snapshot).to_text(),
            });
        }
        Ok(Self { entries })
    }

    pub fn last(&self) -> Option<&SnapshotEntry> {
        self.entries.last()
    }
}

/// Builds a fresh engine for `trace`, applying the header's config overrides
/// on top of `base`.
pub fn engine_for(spec: &ChartSpec, data: &Dataset, trace: &InputTrace, base: &EngineConfig) -> Result<Engine, TraceError> {
    let mut config = base.clone();
    config.apply_json(&trace.header.config)?;
    Ok(Engine::new(spec.clone(), data.clone(), config)?)
}

/// Feeds every event of `trace` to `engine`, recording snapshots per `policy`.
/// A protocol error halts replay and reports the 1-based event index.
pub fn replay_events(engine: &mut Engine, events: &[RawInputEvent], policy: SnapshotPolicy) -> Result<SnapshotLog, TraceError> {
    let mut entries = vec![SnapshotEntry {
        event_index: 0,
        snapshot: engine.snapshot().to_text(),
    }];
    for (i, e) in events.iter().enumerate() {
        engine.try_process_raw(e).map_err(|error| TraceError::Protocol {
            event_index: i + 1,
            error,
        })?;
        let take = match policy {
            SnapshotPolicy::Event => true,
            SnapshotPolicy::Change | SnapshotPolicy::Final => false,
        };
        let snapshot = engine.snapshot().to_text();
        let changed = entries.last().is_some_and(|last| last.snapshot != snapshot);
        if take || (policy == SnapshotPolicy::Change && changed) {
            entries.push(SnapshotEntry {
                event_index: i + 1,
                snapshot,
            });
        }
    }
    if policy == SnapshotPolicy::Final {
        entries = vec![SnapshotEntry {
            event_index: events.len(),
            snapshot: engine.snapshot().to_text(),
        }];
    }
    Ok(SnapshotLog { entries })
}

/// Replays `trace` on a fresh engine and returns the log and the final engine.
pub fn replay(
    spec: &ChartSpec,
    data: &Dataset,
    trace: &InputTrace,
    base: &EngineConfig,
    policy: SnapshotPolicy,
) -> Result<(SnapshotLog, Engine), TraceError> {
    let mut engine = engine_for(spec, data, trace, base)?;
    let log = replay_events(&mut engine, &trace.events, policy)?;
    Ok((log, engine))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Identical,
    /// The first differing line (1-based) and, when it can be read from
    /// either file, the event index recorded on it.
    Differs { line: usize, event_index: Option<usize> },
}

/// Byte-compares two snapshot logs and locates the first divergence.
pub fn compare_logs(actual: &str, golden: &str) -> Verdict {
    if actual == golden {
        return Verdict::Identical;
    }
    let a: Vec<&str> = actual.lines().collect();
    let g: Vec<&str> = golden.lines().collect();
    let line = (0..a.len().max(g.len()))
        .find(|&i| a.get(i) != g.get(i))
        .unwrap_or(a.len().min(g.len()));
    let index_of = |l: Option<&&str>| {
        l.and_then(|l| serde_json::from_str::<serde_json::Value>(l).ok())
            .and_then(|v| v.get("eventIndex").and_then(serde_json::Value::as_u64))
            .map(|n| n as usize)
    };
    let event_index = index_of(g.get(line)).or_else(|| index_of(a.get(line)));
    Verdict::Differs {
        line: line + 1,
        event_index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    #[test]
    fn trace_round_trip() {
        let mut header = TraceHeader::default();
        header.config.insert("tapMaxMs".into(), serde_json::json!(250));
        let trace = InputTrace::new(
            header,
            vec![
                RawInputEvent::down(0, 1, Point::new(1.0, 2.5)),
                RawInputEvent::up(40, 1, Point::new(1.0, 2.5)),
                RawInputEvent::motion(50, [0.0, 0.5, 9.81]),
                RawInputEvent::menu(60, "history.undo"),
                RawInputEvent::flush(400),
            ],
        );
        let text = trace.to_text();
        assert_eq!(InputTrace::parse(&text).unwrap(), trace);
        assert_eq!(InputTrace::parse(&text).unwrap().to_text(), text);
    }

    #[test]
    fn trace_errors() {
        assert!(matches!(InputTrace::parse(""), Err(TraceError::MissingHeader)));
        assert!(matches!(InputTrace::parse("{\"v\":2}"), Err(TraceError::Version(2))));
        assert!(matches!(
            InputTrace::parse("{\"v\":1}\n{\"t\":0,\"kind\":\"wave\"}"),
            Err(TraceError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn log_round_trip_and_ordering() {
        let text = "{\"eventIndex\":0,\"snapshot\":{\"a\":1.5,\"b\":[1,2]}}\n{\"eventIndex\":3,\"snapshot\":{\"a\":2}}\n";
        let log = SnapshotLog::parse(text).unwrap();
        assert_eq!(log.to_text(), text);
        assert!(SnapshotLog::parse("{\"eventIndex\":2,\"snapshot\":{}}\n{\"eventIndex\":2,\"snapshot\":{}}").is_err());
    }

    #[test]
    fn compare_reports_first_divergence() {
        let a = "{\"eventIndex\":0,\"snapshot\":{}}\n{\"eventIndex\":4,\"snapshot\":{\"x\":1}}\n";
        let b = "{\"eventIndex\":0,\"snapshot\":{}}\n{\"eventIndex\":4,\"snapshot\":{\"x\":2}}\n";
        assert_eq!(compare_logs(a, a), Verdict::Identical);
        assert_eq!(
            compare_logs(a, b),
            Verdict::Differs {
                line: 2,
                event_index: Some(4)
            }
        );
        assert_eq!(
            compare_logs(a, "{\"eventIndex\":0,\"snapshot\":{}}\n"),
            Verdict::Differs {
                line: 2,
                event_index: Some(4)
            }
        );
    }
}
