//! Episode traces: everything a run did, one JSON record per line.
//!
//! The first line is a header (level, agent, seed, parameters); the
//! rest are tick and decision records in the order they happened. All
//! evaluation reads these logs, never live simulator state, so a stored
//! trace is the complete record of an episode.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Vec3;

use super::AgentParams;

/// Identifies the episode and pins every knob that shaped it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub level_id: String,
    /// Metric-config token (for example `openness` or `all`) or
    /// `random` for the control agent.
    pub agent: String,
    pub seed: u64,
    /// Eye position at spawn, after snapping to walkable ground.
    pub spawn: Vec3,
    pub params: AgentParams,
}

/// State at the end of one 0.1 s tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub time: f64,
    pub position: Vec3,
    pub heading_deg: f64,
    /// Ids of objects visible from the end-of-tick pose.
    pub visible: Vec<String>,
}

/// One navigation decision, taken at the start of a tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub time: f64,
    /// Chosen fan slot (0..36, bearing = slot * 10 degrees).
    pub direction: usize,
    /// The chosen direction's interest score. Absent for the random
    /// control agent, which scores nothing.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub motivation: Option<f64>,
    /// Id of the object being navigated towards, when the decision
    /// committed to one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub object: Option<String>,
}

/// A tick or decision, in simulation order.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Tick(TickRecord),
    Decision(DecisionRecord),
}

/// A complete episode: header plus the chronological event stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceLog {
    pub header: TraceHeader,
    pub events: Vec<TraceEvent>,
}

#[derive(Serialize)]
#[serde(tag = "rec", rename_all = "snake_case")]
enum LineOut<'a> {
    Header(&'a TraceHeader),
    Tick(&'a TickRecord),
    Decision(&'a DecisionRecord),
}

#[derive(Deserialize)]
#[serde(tag = "rec", rename_all = "snake_case")]
enum LineIn {
    Header(TraceHeader),
    Tick(TickRecord),
    Decision(DecisionRecord),
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace io: {0}")]
    Io(#[from] io::Error),
    #[error("trace line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("trace is empty")]
    Empty,
    #[error("trace line {0}: expected the header on line 1 only")]
    MisplacedHeader(usize),
}

impl TraceLog {
    pub fn ticks(&self) -> impl Iterator<Item = &TickRecord> {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Tick(t) => Some(t),
            TraceEvent::Decision(_) => None,
        })
    }

    pub fn decisions(&self) -> impl Iterator<Item = &DecisionRecord> {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Decision(d) => Some(d),
            TraceEvent::Tick(_) => None,
        })
    }

    /// Serializes to JSON lines. Field order is fixed by the record
    /// structs, so equal logs serialize to equal bytes.
    pub fn write_jsonl(&self, mut w: impl Write) -> io::Result<()> {
        let mut line = serde_json::to_string(&LineOut::Header(&self.header))?;
        line.push('\n');
        w.write_all(line.as_bytes())?;
        for event in &self.events {
            let out = match event {
                TraceEvent::Tick(t) => LineOut::Tick(t),
                TraceEvent::Decision(d) => LineOut::Decision(d),
            };
            let mut line = serde_json::to_string(&out)?;
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn read_jsonl(reader: impl BufRead) -> Result<Self, TraceError> {
        let mut header = None;
        let mut events = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: LineIn = serde_json::from_str(&line)
                .map_err(|source| TraceError::Json { line: i + 1, source })?;
            match parsed {
                LineIn::Header(h) if header.is_none() && events.is_empty() => header = Some(h),
                LineIn::Header(_) => return Err(TraceError::MisplacedHeader(i + 1)),
                LineIn::Tick(t) => events.push(TraceEvent::Tick(t)),
                LineIn::Decision(d) => events.push(TraceEvent::Decision(d)),
            }
        }
        let header = header.ok_or(TraceError::Empty)?;
        Ok(TraceLog { header, events })
    }
}
