//! Parameter sweeps written as CSV.
//!
//! Columns, in order: `algo,n,bh,adversary,seed,rounds,moves,verdict,error`.
//! `rounds` is the round of the first termination, or the rounds executed if
//! nobody terminated. A cell that cannot run has verdict `error`, empty
//! `rounds`/`moves` and the message in `error`.

use std::io::{Read, Write};

use bhs_core::algo::AlgorithmId;
use bhs_core::comm::CommKind;
use bhs_core::sim::StopRule;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::runner::{execute, RunConfig};

pub const COLUMNS: [&str; 9] = ["algo", "n", "bh", "adversary", "seed", "rounds", "moves", "verdict", "error"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub algo: String,
    pub n: u32,
    pub bh: u32,
    pub adversary: String,
    pub seed: u64,
    pub rounds: Option<u32>,
    pub moves: Option<u64>,
    pub verdict: String,
    pub error: String,
}

/// Black hole positions of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BhSpec {
    Node(u32),
    /// `num * n / den`, e.g. `3n/4`.
    Frac { num: u32, den: u32 },
    /// Every node a team can be deployed against.
    All,
}

impl BhSpec {
    pub fn parse(s: &str) -> Option<BhSpec> {
        if s == "all" {
            return Some(BhSpec::All);
        }
        if let Ok(v) = s.parse() {
            return Some(BhSpec::Node(v));
        }
        let (head, den) = s.split_once("n/")?;
        let num = if head.is_empty() { 1 } else { head.parse().ok()? };
        let den: u32 = den.parse().ok()?;
        (den > 0).then_some(BhSpec::Frac { num, den })
    }

    fn nodes(self, algo: AlgorithmId, n: u32) -> Vec<u32> {
        match self {
            BhSpec::Node(v) => vec![v],
            BhSpec::Frac { num, den } => vec![((num as u64 * n as u64) / den as u64) as u32],
            BhSpec::All if algo.colocated() => (1..n).collect(),
            BhSpec::All => (0..n).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub algos: Vec<AlgorithmId>,
    pub ns: Vec<u32>,
    pub bhs: Vec<BhSpec>,
    pub adversaries: Vec<String>,
    pub seeds: Vec<u64>,
    pub comm: Option<CommKind>,
    pub horizon: Option<u64>,
    /// Keep only the worst row per (algorithm, n, seed).
    pub worst: bool,
}

impl Grid {
    pub fn new(algos: Vec<AlgorithmId>, ns: Vec<u32>) -> Self {
        Grid {
            algos,
            ns,
            bhs: vec![BhSpec::Frac { num: 1, den: 2 }],
            adversaries: vec!["static".into()],
            seeds: vec![0],
            comm: None,
            horizon: None,
            worst: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub algo: AlgorithmId,
    pub n: u32,
    pub bh: u32,
    pub adversary: String,
    pub seed: u64,
}

pub fn cells(grid: &Grid) -> Vec<Cell> {
    let mut out = Vec::new();
    for &algo in &grid.algos {
        for &n in &grid.ns {
            let mut bhs: Vec<u32> = grid.bhs.iter().flat_map(|b| b.nodes(algo, n)).collect();
            let mut seen = Vec::new();
            bhs.retain(|b| if seen.contains(b) { false } else { seen.push(*b); true });
            for &bh in &bhs {
                for adversary in &grid.adversaries {
                    for &seed in &grid.seeds {
                        out.push(Cell { algo, n, bh, adversary: adversary.clone(), seed });
                    }
                }
            }
        }
    }
    out
}

pub fn run_cell(grid: &Grid, cell: &Cell) -> Row {
    let mut row = Row {
        algo: cell.algo.name().into(),
        n: cell.n,
        bh: cell.bh,
        adversary: cell.adversary.clone(),
        seed: cell.seed,
        rounds: None,
        moves: None,
        verdict: "error".into(),
        error: String::new(),
    };
    let mut cfg = RunConfig::new(cell.algo, cell.n, cell.bh);
    cfg.seed = cell.seed;
    cfg.comm = grid.comm;
    cfg.horizon = grid.horizon;
    cfg.stop = StopRule::FirstTermination;
    match cfg.with_adversary(&cell.adversary).and_then(|c| execute(&c, None)) {
        Ok(rep) => {
            row.rounds = Some(rep.termination_round.unwrap_or(rep.rounds));
            row.moves = Some(rep.moves);
            row.verdict = rep.verdict;
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

/// Run every cell in parallel; rows come back in cell order.
pub fn sweep(grid: &Grid) -> Vec<Row> {
    let rows: Vec<Row> = cells(grid).par_iter().map(|c| run_cell(grid, c)).collect();
    if grid.worst {
        worst_rows(rows)
    } else {
        rows
    }
}

/// One row per (algorithm, n, seed): a row that is not correct if any, else
/// the one with the most rounds. Ties keep the earliest.
pub fn worst_rows(rows: Vec<Row>) -> Vec<Row> {
    let mut out: Vec<Row> = Vec::new();
    let rank = |r: &Row| (r.verdict != "correct", r.rounds.unwrap_or(0));
    for row in rows {
        match out.iter_mut().find(|w| w.algo == row.algo && w.n == row.n && w.seed == row.seed) {
            Some(w) if rank(&row) > rank(w) => *w = row,
            Some(_) => {}
            None => out.push(row),
        }
    }
    out
}

/// Header first, even with no rows.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut rdr = csv::Reader::from_reader(input);
    if rdr.headers()?.iter().ne(COLUMNS) {
        return Err(HarnessError::usage("unexpected CSV columns"));
    }
    Ok(rdr.deserialize().collect::<std::result::Result<Vec<Row>, _>>()?)
}
