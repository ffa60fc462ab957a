//! Line-delimited JSON traces: one record per executed round, then one final
//! record carrying the run report.
//!
//! Record `r` describes round `r`: its missing edge, the configuration at the
//! end of the round and the events of the round. Starting positions are the
//! report's `placements`.

use std::io::{BufRead, Write};

use bhs_core::sim::StepInfo;
use bhs_core::world::WorldState;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub agent: usize,
    pub state: String,
    pub node: u32,
    pub round: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub algo: String,
    pub comm: String,
    pub n: u32,
    pub bh: u32,
    /// Start node of each agent.
    pub placements: Vec<u32>,
    pub adversary: String,
    pub seed: u64,
    pub horizon: u64,
    /// Rounds executed.
    pub rounds: u32,
    /// Round of the first termination.
    pub termination_round: Option<u32>,
    pub moves: u64,
    pub agent_moves: Vec<u32>,
    pub survivors: Vec<usize>,
    pub answers: Vec<AnswerRecord>,
    /// `correct`, `incorrect`, `none` or `horizon`.
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSnapshot {
    pub id: usize,
    pub role: String,
    pub state: String,
    pub node: u32,
    pub alive: bool,
    pub pebble: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Event {
    Meeting { a: usize, b: usize },
    Termination { agent: usize },
    Death { agent: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub missing: Option<u32>,
    /// Group orderings passed to the simulator, if any.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elect: Vec<usize>,
    pub agents: Vec<AgentSnapshot>,
    pub pebbles: Vec<u32>,
    pub events: Vec<Event>,
}

impl RoundRecord {
    /// Record of the round that produced `world`.
    pub fn capture(world: &WorldState, info: &StepInfo, elect: Vec<usize>) -> Self {
        let agents = world
            .agents
            .iter()
            .map(|a| AgentSnapshot {
                id: a.id,
                role: a.mem.role.name().into(),
                state: a.mem.state.name().into(),
                node: a.node,
                alive: a.alive,
                pebble: a.mem.carrying > 0,
            })
            .collect();
        let mut events: Vec<Event> = info.meetings.iter().map(|&(a, b)| Event::Meeting { a, b }).collect();
        events.extend(info.terminated.iter().map(|&agent| Event::Termination { agent }));
        events.extend(info.died.iter().map(|&agent| Event::Death { agent }));
        RoundRecord {
            round: world.round - 1,
            missing: info.presence.missing.map(|e| e.0),
            elect,
            agents,
            pebbles: world.pebbles.iter().map(|p| p.node).collect(),
            events,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalRecord {
    pub report: RunReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub rounds: Vec<RoundRecord>,
    pub report: RunReport,
}

pub fn write_record<W: Write + ?Sized, T: Serialize>(out: &mut W, rec: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, rec)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn malformed(line: usize, reason: impl Into<String>) -> HarnessError {
    HarnessError::MalformedTrace { line, reason: reason.into() }
}

/// Read a whole trace, checking that rounds are contiguous from 0 and that
/// exactly one final record ends it.
pub fn read_trace<R: BufRead>(input: R) -> Result<Trace> {
    let mut rounds = Vec::new();
    let mut report = None;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if report.is_some() {
            return Err(malformed(no, "record after the final record"));
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| malformed(no, e.to_string()))?;
        if value.get("report").is_some() {
            let f: FinalRecord = serde_json::from_value(value).map_err(|e| malformed(no, e.to_string()))?;
            report = Some(f.report);
            continue;
        }
        let r: RoundRecord = serde_json::from_value(value).map_err(|e| malformed(no, e.to_string()))?;
        if r.round as usize != rounds.len() {
            return Err(malformed(no, format!("round {} where {} was expected", r.round, rounds.len())));
        }
        rounds.push(r);
    }
    let report = report.ok_or_else(|| malformed(0, "no final record"))?;
    Ok(Trace { rounds, report })
}

pub fn read_trace_file(path: &std::path::Path) -> Result<Trace> {
    read_trace(std::io::BufReader::new(std::fs::File::open(path)?))
}
