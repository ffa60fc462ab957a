//! Communication models: presence sensing, colocated payload exchange,
//! pebbles and whiteboards, plus symmetry breaking among colocated agents.

use alloc::vec::Vec;

use crate::error::Error;
use crate::kernel::{Role, State};

/// Interaction mechanisms, weakest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommKind {
    Vision,
    F2F,
    Pebble,
    Whiteboard,
}

impl CommKind {
    pub fn name(self) -> &'static str {
        match self {
            CommKind::Vision => "vision",
            CommKind::F2F => "f2f",
            CommKind::Pebble => "pebble",
            CommKind::Whiteboard => "whiteboard",
        }
    }

    pub fn parse(s: &str) -> Option<CommKind> {
        match s {
            "vision" => Some(CommKind::Vision),
            "f2f" => Some(CommKind::F2F),
            "pebble" => Some(CommKind::Pebble),
            "whiteboard" => Some(CommKind::Whiteboard),
            _ => None,
        }
    }

    /// Pebbles and whiteboards live in the environment.
    pub fn exogenous(self) -> bool {
        matches!(self, CommKind::Pebble | CommKind::Whiteboard)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CommModel {
    pub kind: CommKind,
    pub identity_visibility: bool,
}

impl CommModel {
    pub fn new(kind: CommKind, identity_visibility: bool) -> Self {
        CommModel { kind, identity_visibility }
    }

    pub fn payloads(&self) -> bool {
        self.kind != CommKind::Vision
    }

    /// A whiteboard can hold a mark, so pebble operations are available in
    /// both exogenous models.
    pub fn pebbles(&self) -> bool {
        self.kind.exogenous()
    }

    pub fn boards(&self) -> bool {
        self.kind == CommKind::Whiteboard
    }
}

/// Whiteboard capacity in bits: `8 * ceil(log2 n)`.
pub fn whiteboard_capacity_bits(n: u32) -> u32 {
    8 * ceil_log2(n)
}

pub fn ceil_log2(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

/// Constant-size record exchanged between colocated agents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Payload {
    pub role: Role,
    pub state: State,
    /// Leader's count of meetings with the Retroguard.
    pub meets_retro: u32,
    /// Sender's displacement from its start.
    pub pos: i32,
    /// Displacement (sender frame) of the first unexplored node of the dangerous sector.
    pub target: i32,
}

/// Deliver every other party's payload to each party.
pub fn exchange(model: &CommModel, parties: &[(usize, Payload)]) -> Result<Vec<(usize, Vec<Payload>)>, Error> {
    if !model.payloads() {
        return Err(Error::VisionNoPayload);
    }
    Ok(parties
        .iter()
        .map(|&(id, _)| {
            let others = parties.iter().filter(|(o, _)| *o != id).map(|(_, p)| *p).collect();
            (id, others)
        })
        .collect())
}

/// Total order over contending colocated agents; the first is the winner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutexOutcome {
    pub ordering: Vec<usize>,
}

impl MutexOutcome {
    pub fn winner(&self) -> usize {
        self.ordering[0]
    }
}

#[derive(Clone, Copy, Debug)]
pub enum ElectMode<'a> {
    /// Order by arrival token (agent index); stable across reruns.
    Deterministic,
    /// Positions into the contender list, supplied by the checker.
    Adversarial(&'a [usize]),
}

pub fn elect(agents: &[usize], mode: ElectMode<'_>) -> Result<MutexOutcome, Error> {
    if agents.len() < 2 {
        return Err(Error::SingleAgent);
    }
    let ordering = match mode {
        ElectMode::Deterministic => {
            let mut v = agents.to_vec();
            v.sort_unstable();
            v
        }
        ElectMode::Adversarial(perm) => {
            let mut seen = [false; 32];
            if perm.len() != agents.len() {
                return Err(Error::SingleAgent);
            }
            for &p in perm {
                if p >= agents.len() || seen[p] {
                    return Err(Error::SingleAgent);
                }
                seen[p] = true;
            }
            perm.iter().map(|&p| agents[p]).collect()
        }
    };
    Ok(MutexOutcome { ordering })
}

/// The `index`-th permutation of `0..k` in lexicographic order.
pub fn nth_permutation(k: usize, mut index: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..k).collect();
    let mut out = Vec::with_capacity(k);
    let mut fact: usize = (1..k).product::<usize>().max(1);
    for remaining in (1..=k).rev() {
        let pick = index / fact;
        index %= fact;
        out.push(pool.remove(pick));
        if remaining > 1 {
            fact /= remaining - 1;
        }
    }
    out
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product::<usize>().max(1)
}
