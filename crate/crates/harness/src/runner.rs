//! Single runs: configuration, execution, report and trace.

use std::io::Write;
use std::path::Path;

use bhs_core::adversary::{Schedule, Strategy, StrategyAdversary};
use bhs_core::algo::{Algo, AlgorithmId};
use bhs_core::comm::{CommKind, CommModel};
use bhs_core::sim::{self, StopRule, Verdict};

use crate::error::{HarnessError, Result};
use crate::schedule;
use crate::trace::{write_record, AnswerRecord, FinalRecord, RoundRecord, RunReport, Trace};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algo: AlgorithmId,
    /// Defaults to the algorithm's usual model.
    pub comm: Option<CommKind>,
    pub n: u32,
    pub bh: u32,
    /// Defaults to [`default_starts`].
    pub starts: Option<Vec<u32>>,
    pub strategy: Strategy,
    /// Adversary descriptor written to the report.
    pub label: String,
    /// Group orderings per round.
    pub elect: Vec<Vec<usize>>,
    pub seed: u64,
    /// Defaults to the algorithm's horizon.
    pub horizon: Option<u64>,
    pub stop: StopRule,
}

impl RunConfig {
    pub fn new(algo: AlgorithmId, n: u32, bh: u32) -> Self {
        RunConfig {
            algo,
            comm: None,
            n,
            bh,
            starts: None,
            strategy: Strategy::Static,
            label: "static".into(),
            elect: Vec::new(),
            seed: 0,
            horizon: None,
            stop: StopRule::AllDone,
        }
    }

    /// Set the adversary from `NAME[:param]`; `scripted:PATH` loads a
    /// schedule file and its elect sidecar. Uses the current seed.
    pub fn with_adversary(mut self, desc: &str) -> Result<Self> {
        if let Some(path) = desc.strip_prefix("scripted:") {
            let (sched, elect) = schedule::load(Path::new(path))?;
            self.strategy = Strategy::Scripted(sched);
            self.elect = elect;
        } else {
            self.strategy =
                Strategy::parse(desc, self.seed).ok_or_else(|| HarnessError::usage(format!("unknown adversary {desc:?}")))?;
        }
        self.label = desc.into();
        Ok(self)
    }

    pub fn instance(&self) -> Algo {
        Algo::new(self.algo, self.n)
    }

    pub fn comm_model(&self) -> CommModel {
        CommModel::new(self.comm.unwrap_or(self.algo.default_comm()), !self.algo.anonymous())
    }

    pub fn start_nodes(&self) -> Vec<u32> {
        self.starts.clone().unwrap_or_else(|| default_starts(self.algo, self.n, self.bh))
    }

    pub fn horizon_value(&self) -> u64 {
        self.horizon.unwrap_or_else(|| self.instance().default_horizon())
    }
}

/// Node 0 for colocated teams; three nodes a third of the ring apart,
/// starting just after the black hole, for scattered teams.
pub fn default_starts(algo: AlgorithmId, n: u32, bh: u32) -> Vec<u32> {
    if algo.colocated() {
        vec![0]
    } else {
        (0..3).map(|k| (bh + 1 + k * (n / 3)) % n).collect()
    }
}

/// Run `cfg`, streaming a trace to `trace` if given.
pub fn execute(cfg: &RunConfig, mut trace: Option<&mut dyn Write>) -> Result<RunReport> {
    let algo = cfg.instance();
    let world = sim::setup(&algo, cfg.bh, &cfg.start_nodes(), cfg.comm_model())?;
    let placements: Vec<u32> = world.agents.iter().map(|a| a.start).collect();
    let horizon = cfg.horizon_value();
    let mut adv = StrategyAdversary::new(cfg.strategy.clone());
    let elect_at = |r: u32| cfg.elect.get(r as usize).cloned().unwrap_or_default();
    let mut sink_err = None;
    let out = sim::run(&algo, world, &mut adv, horizon, cfg.stop, &elect_at, |w, info| {
        if let (Some(t), None) = (trace.as_deref_mut(), &sink_err) {
            let rec = RoundRecord::capture(w, info, elect_at(w.round - 1));
            if let Err(e) = write_record(t, &rec) {
                sink_err = Some(e);
            }
        }
    })?;
    if let Some(e) = sink_err {
        return Err(e);
    }
    let verdict = match out.verdict {
        Verdict::None if out.horizon_reached => "horizon",
        v => v.name(),
    };
    let report = RunReport {
        algo: cfg.algo.name().into(),
        comm: out.world.comm.kind.name().into(),
        n: cfg.n,
        bh: cfg.bh,
        placements,
        adversary: cfg.label.clone(),
        seed: cfg.seed,
        horizon,
        rounds: out.world.round,
        termination_round: out.answers.iter().map(|a| a.round).min(),
        moves: out.moves,
        agent_moves: out.world.agents.iter().map(|a| a.moves).collect(),
        survivors: out.world.agents.iter().filter(|a| a.alive).map(|a| a.id).collect(),
        answers: out
            .answers
            .iter()
            .map(|a| AnswerRecord { agent: a.agent, state: a.state.name().into(), node: a.node, round: a.round })
            .collect(),
        verdict: verdict.into(),
    };
    if let Some(t) = trace {
        write_record(t, &FinalRecord { report: report.clone() })?;
        t.flush()?;
    }
    Ok(report)
}

/// Configuration that re-runs `trace` with its missing-edge column as a
/// scripted schedule, keeping the original adversary label and seed.
pub fn replay_config(trace: &Trace) -> Result<RunConfig> {
    let r = &trace.report;
    let algo = AlgorithmId::parse(&r.algo).ok_or_else(|| HarnessError::usage(format!("unknown algorithm {:?}", r.algo)))?;
    let comm = CommKind::parse(&r.comm).ok_or_else(|| HarnessError::usage(format!("unknown model {:?}", r.comm)))?;
    let mut distinct = r.placements.clone();
    distinct.dedup();
    let starts = if distinct.len() == 1 { distinct } else { r.placements.clone() };
    Ok(RunConfig {
        comm: Some(comm),
        starts: Some(starts),
        strategy: Strategy::Scripted(Schedule(
            trace.rounds.iter().map(|x| x.missing.map(bhs_core::ring::EdgeId)).collect(),
        )),
        label: r.adversary.clone(),
        elect: trace.rounds.iter().map(|x| x.elect.clone()).collect(),
        seed: r.seed,
        horizon: Some(r.horizon),
        ..RunConfig::new(algo, r.n, r.bh)
    })
}
