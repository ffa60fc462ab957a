//! The three search algorithms and the feasibility table.

mod cdo;
mod cp;
mod gl;

use alloc::vec;
use alloc::vec::Vec;

use crate::comm::CommKind;
use crate::error::Error;
use crate::kernel::{AgentMem, Effects, Entry, Percept, Program, Role, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    /// Three colocated agents, Vision.
    Cp,
    /// Three colocated agents, pebbles, sectors of `ceil(sqrt n)` nodes.
    Cdo,
    /// Three scattered anonymous agents, pebbles.
    Gl,
}

impl AlgorithmId {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::Cp => "cp",
            AlgorithmId::Cdo => "cdo",
            AlgorithmId::Gl => "gl",
        }
    }

    pub fn parse(s: &str) -> Option<AlgorithmId> {
        match s {
            "cp" => Some(AlgorithmId::Cp),
            "cdo" => Some(AlgorithmId::Cdo),
            "gl" => Some(AlgorithmId::Gl),
            _ => None,
        }
    }

    pub fn default_comm(self) -> CommKind {
        match self {
            AlgorithmId::Cp => CommKind::Vision,
            AlgorithmId::Cdo | AlgorithmId::Gl => CommKind::Pebble,
        }
    }

    pub fn colocated(self) -> bool {
        !matches!(self, AlgorithmId::Gl)
    }

    pub fn anonymous(self) -> bool {
        matches!(self, AlgorithmId::Gl)
    }
}

/// Deployment and capability of a team.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Setting {
    pub comm: CommKind,
    pub colocated: bool,
    pub anonymous: bool,
}

/// Reject the settings in which no three-agent algorithm exists.
pub fn validate_setting(s: &Setting) -> Result<(), Error> {
    if s.comm.exogenous() {
        return Ok(());
    }
    if !s.colocated {
        return Err(Error::InfeasibleSetting { reason: "scattered agents with endogenous communication" });
    }
    if s.anonymous {
        return Err(Error::InfeasibleSetting { reason: "anonymous colocated agents with endogenous communication" });
    }
    Ok(())
}

/// Check that `id` may run in `setting`.
pub fn check_algorithm(id: AlgorithmId, s: &Setting) -> Result<(), Error> {
    validate_setting(s)?;
    match id {
        AlgorithmId::Cp | AlgorithmId::Cdo => {
            if !s.colocated {
                return Err(Error::InfeasibleSetting { reason: "algorithm requires colocated agents" });
            }
            if s.anonymous {
                return Err(Error::InfeasibleSetting { reason: "algorithm requires distinct identifiers" });
            }
            if id == AlgorithmId::Cdo && !s.comm.exogenous() {
                return Err(Error::InfeasibleSetting { reason: "algorithm requires pebbles" });
            }
        }
        AlgorithmId::Gl => {
            if !s.comm.exogenous() {
                return Err(Error::InfeasibleSetting { reason: "algorithm requires pebbles" });
            }
        }
    }
    Ok(())
}

/// `ceil(sqrt(n))`.
pub fn sector_size(n: u32) -> u32 {
    let mut s = 1;
    while s * s < n {
        s += 1;
    }
    s
}

/// An algorithm instantiated for a ring size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Algo {
    pub id: AlgorithmId,
    pub n: u32,
    pub s: u32,
    /// Team without the Retroguard (pendulum only).
    pub two_agent: bool,
}

impl Algo {
    pub fn new(id: AlgorithmId, n: u32) -> Self {
        Algo { id, n, s: sector_size(n), two_agent: false }
    }

    /// Pendulum with the Retroguard removed.
    pub fn two_agent_cp(n: u32) -> Self {
        Algo { two_agent: true, ..Algo::new(AlgorithmId::Cp, n) }
    }

    pub fn team(&self) -> Vec<Role> {
        match self.id {
            AlgorithmId::Cp if self.two_agent => vec![Role::Leader, Role::Avanguard],
            AlgorithmId::Cp | AlgorithmId::Cdo => vec![Role::Leader, Role::Avanguard, Role::Retroguard],
            AlgorithmId::Gl => vec![Role::Anon; 3],
        }
    }

    pub fn default_horizon(&self) -> u64 {
        let n = self.n as u64;
        match self.id {
            AlgorithmId::Cp | AlgorithmId::Gl => 25 * n * n,
            AlgorithmId::Cdo => 50 * isqrt(n * n * n) + 50 * n,
        }
    }
}

/// `floor(n^1.5)` computed as the integer square root of `n^3`.
fn isqrt(x: u64) -> u64 {
    let mut r = 0u64;
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

impl Program for Algo {
    fn observe(&self, m: &mut AgentMem, p: &Percept) {
        match self.id {
            AlgorithmId::Cp => {}
            AlgorithmId::Cdo => cdo::observe(self, m, p),
            AlgorithmId::Gl => gl::observe(m, p),
        }
    }

    fn enter(&self, m: &mut AgentMem, p: &Percept, fx: &mut Effects) -> Entry {
        match self.id {
            AlgorithmId::Cp => cp::enter(self, m),
            AlgorithmId::Cdo => cdo::enter(self, m, p),
            AlgorithmId::Gl => gl::enter(self, m, p, fx),
        }
    }

    fn guard(&self, m: &AgentMem, p: &Percept, fx: &Effects, mid_cycle: bool) -> Option<State> {
        match self.id {
            AlgorithmId::Cp => cp::guard(self, m, p),
            AlgorithmId::Cdo => cdo::guard(self, m, p, fx, mid_cycle),
            AlgorithmId::Gl => gl::guard(self, m, p, fx, mid_cycle),
        }
    }

    fn can_terminate(&self, m: &AgentMem) -> bool {
        match m.role {
            Role::Avanguard | Role::Retroguard => false,
            Role::Leader | Role::MLeader => true,
            Role::Anon | Role::Explorer | Role::Follower => self.id == AlgorithmId::Gl,
        }
    }

    fn removes_mark(&self, m: &AgentMem, arrived: bool) -> bool {
        match self.id {
            AlgorithmId::Gl => gl::removes_mark(self, m, arrived),
            _ => m.unmarking(arrived),
        }
    }
}

/// Role and state taken by each member of a symmetry-breaking group, in
/// election order.
pub fn sync_roles(kind: crate::kernel::SyncKind, size: usize) -> &'static [(Role, State)] {
    use crate::kernel::SyncKind;
    match (kind, size) {
        (SyncKind::Two, 2) => &[(Role::Explorer, State::Explore), (Role::Follower, State::WaitFollower)],
        (SyncKind::BreakSymmetry, 2) => &[(Role::MLeader, State::Go), (Role::Retroguard, State::Init)],
        (SyncKind::BreakSymmetry, 3) => {
            &[(Role::Leader, State::Init), (Role::Avanguard, State::Init), (Role::Retroguard, State::Init)]
        }
        // Singletons and oversized pairs fall back to walking on.
        (SyncKind::Two, 1) => &[(Role::Anon, State::Init)],
        (SyncKind::BreakSymmetry, 1) => &[(Role::Anon, State::Forward)],
        (SyncKind::Two, _) => &[(Role::Explorer, State::Explore), (Role::Follower, State::WaitFollower), (Role::Follower, State::WaitFollower)],
        _ => &[(Role::Leader, State::Init), (Role::Avanguard, State::Init), (Role::Retroguard, State::Init)],
    }
}
