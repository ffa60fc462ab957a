//! Execution engine for guarded `Explore` / `CautiousExplore` automata.
//!
//! An agent program is a set of states; each non-terminal state runs entry
//! statements and then an invocation `Explore(dir | p1: s1; ...)`. Every round
//! the guards are evaluated in order on the round's snapshot; a satisfied
//! guard moves the agent to its target state, whose entry statements run at
//! once (reading the counters of the invocation being left) before the new
//! invocation starts and its guards are evaluated on the same snapshot.

use alloc::vec::Vec;

use crate::comm::Payload;
use crate::error::Error;
use crate::ring::Dir;

pub const MAX_TRANSITIONS: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Leader,
    Avanguard,
    Retroguard,
    Anon,
    Explorer,
    Follower,
    MLeader,
}

pub const ROLE_COUNT: usize = 7;

impl Role {
    pub const ALL: [Role; ROLE_COUNT] = [
        Role::Leader,
        Role::Avanguard,
        Role::Retroguard,
        Role::Anon,
        Role::Explorer,
        Role::Follower,
        Role::MLeader,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Leader => "Leader",
            Role::Avanguard => "Avanguard",
            Role::Retroguard => "Retroguard",
            Role::Anon => "Anon",
            Role::Explorer => "Explorer",
            Role::Follower => "Follower",
            Role::MLeader => "MLeader",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        Role::ALL.iter().copied().find(|r| r.name() == s)
    }
}

macro_rules! states {
    ($($s:ident),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum State { $($s),* }

        impl State {
            pub const ALL: &'static [State] = &[$(State::$s),*];

            pub fn name(self) -> &'static str {
                match self { $(State::$s => stringify!($s)),* }
            }
        }
    };
}

states!(
    Init, NewNode, Return, Move, Bounce, Cautious, SearchLeader, Detection1, Return1, Detection2, Detection,
    TerminateA, TerminateR, TerminateAD, Wait, Two, Copy, EndPhase1, Terminate, Explore, Back, MoveForward,
    WaitFollower, Follow, InitP2, Forward, BreakSimmetry, BeAvanguard, Go, StartCP,
);

impl State {
    pub fn parse(s: &str) -> Option<State> {
        State::ALL.iter().copied().find(|st| st.name() == s)
    }
}

/// Direction argument of an invocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Heading {
    Left,
    Right,
    Nil,
}

impl Heading {
    pub fn dir(self) -> Option<Dir> {
        match self {
            Heading::Left => Some(Dir::Left),
            Heading::Right => Some(Dir::Right),
            Heading::Nil => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Invocation {
    pub heading: Heading,
    pub cautious: bool,
}

impl Invocation {
    pub const fn explore(heading: Heading) -> Self {
        Invocation { heading, cautious: false }
    }

    pub const fn cautious(heading: Heading) -> Self {
        Invocation { heading, cautious: true }
    }
}

/// Sub-step of a cautious walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Walk {
    /// At a node, carrying the pebble: mark it and step forward.
    Ready,
    /// Stepped forward, pebble left behind: step back.
    Out,
    /// Stepped back onto the pebble: unmark on arrival, then re-advance.
    Back,
    /// Unmarked but the forward edge was missing.
    ReAdv,
}

impl Walk {
    pub fn name(self) -> &'static str {
        match self {
            Walk::Ready => "ready",
            Walk::Out => "out",
            Walk::Back => "back",
            Walk::ReAdv => "readv",
        }
    }
}

/// Bookkeeping variables of one agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Counters {
    pub ttime: u32,
    /// Signed displacement from the start node (clockwise positive).
    pub disp: i32,
    pub t_lo: i32,
    pub t_hi: i32,
    pub etime: u32,
    pub e_lo: i32,
    pub e_hi: i32,
    pub em_c: u32,
    pub em_cc: u32,
    /// Rounds with the clockwise edge missing since the invocation began or
    /// the last meeting with a Retroguard, whichever is later.
    pub em_c_retro: u32,
    pub meets: [u32; ROLE_COUNT],
    pub rlast: [u32; ROLE_COUNT],
}

impl Default for Counters {
    fn default() -> Self {
        Counters {
            ttime: 0,
            disp: 0,
            t_lo: 0,
            t_hi: 0,
            etime: 0,
            e_lo: 0,
            e_hi: 0,
            em_c: 0,
            em_cc: 0,
            em_c_retro: 0,
            meets: [0; ROLE_COUNT],
            rlast: [0; ROLE_COUNT],
        }
    }
}

impl Counters {
    /// Distinct nodes entered since the start, excluding the start node.
    pub fn tnodes(&self, n: u32) -> u32 {
        ((self.t_hi - self.t_lo) as u32).min(n - 1)
    }

    /// Distinct nodes entered since the current invocation began.
    pub fn enodes(&self, n: u32) -> u32 {
        ((self.e_hi - self.e_lo) as u32).min(n - 1)
    }

    /// Rounds of the current invocation with the clockwise edge present.
    pub fn present_c(&self) -> u32 {
        self.etime - self.em_c
    }

    pub fn meets(&self, r: Role) -> u32 {
        self.meets[r.index()]
    }

    pub fn rlast(&self, r: Role) -> u32 {
        self.rlast[r.index()]
    }

    pub fn reset_invocation(&mut self) {
        self.etime = 0;
        self.e_lo = self.disp;
        self.e_hi = self.disp;
        self.em_c = 0;
        self.em_cc = 0;
        self.em_c_retro = 0;
    }
}

/// What an agent observed this round, after end-of-round bookkeeping needs.
#[derive(Clone, Copy, Debug, Default)]
pub struct RoundObservation {
    pub left_present: bool,
    pub right_present: bool,
    pub moved: Option<Dir>,
    /// Roles with a meeting event this round.
    pub met: [bool; ROLE_COUNT],
    /// Roles visible at the agent's node this round.
    pub seen: [bool; ROLE_COUNT],
}

/// End-of-round counter update.
pub fn roll_counters(c: &mut Counters, obs: &RoundObservation) {
    c.ttime = c.ttime.saturating_add(1);
    c.etime = c.etime.saturating_add(1);
    if let Some(d) = obs.moved {
        c.disp += d.delta();
        c.t_lo = c.t_lo.min(c.disp);
        c.t_hi = c.t_hi.max(c.disp);
        c.e_lo = c.e_lo.min(c.disp);
        c.e_hi = c.e_hi.max(c.disp);
    }
    if obs.met[Role::Retroguard.index()] {
        c.em_c_retro = 0;
    }
    if !obs.right_present {
        c.em_c = c.em_c.saturating_add(1);
        c.em_c_retro = c.em_c_retro.saturating_add(1);
    }
    if !obs.left_present {
        c.em_cc = c.em_cc.saturating_add(1);
    }
    for r in 0..ROLE_COUNT {
        if obs.met[r] {
            c.meets[r] = c.meets[r].saturating_add(1);
        }
        c.rlast[r] = if obs.seen[r] { 0 } else { c.rlast[r].saturating_add(1) };
    }
}

/// A colocated agent as seen by the perceiving agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeerView {
    /// Simulator index, used for bookkeeping only.
    pub agent: usize,
    pub role: Role,
    /// Present only when the model carries payloads.
    pub payload: Option<Payload>,
    /// A meeting with this peer begins this round.
    pub meeting: bool,
    pub terminated: bool,
    pub arrived: bool,
}

/// Local snapshot of one agent for one round.
#[derive(Clone, Debug, Default)]
pub struct Percept {
    pub n: u32,
    pub left_present: bool,
    pub right_present: bool,
    pub self_arrived: bool,
    pub peers: Vec<PeerView>,
    pub pebbles_here: u32,
    /// Pebbles on this node whose owners step back onto them this round.
    pub pebbles_leaving: u32,
    /// An owner of a pebble on this node is here and not removing it.
    pub marker_staying: bool,
    pub board: Vec<u8>,
}

impl Percept {
    pub fn present(&self, d: Dir) -> bool {
        match d {
            Dir::Left => self.left_present,
            Dir::Right => self.right_present,
        }
    }

    pub fn sees(&self, r: Role) -> bool {
        self.peers.iter().any(|p| p.role == r)
    }

    pub fn meeting(&self, r: Role) -> bool {
        self.peers.iter().any(|p| p.role == r && p.meeting)
    }

    pub fn meeting_state(&self, r: Role, s: State) -> bool {
        self.peers
            .iter()
            .any(|p| p.role == r && p.meeting && p.payload.map(|x| x.state) == Some(s))
    }

    pub fn peer(&self, r: Role) -> Option<&PeerView> {
        self.peers.iter().find(|p| p.role == r)
    }

    /// Active (non-terminated) agents on this node, including the perceiver.
    pub fn count_here(&self) -> u32 {
        1 + self.peers.iter().filter(|p| !p.terminated).count() as u32
    }
}

/// Role-specific registers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Regs {
    pub next_target: u32,
    pub steps: u32,
    /// Displacement of the reference node the current role counts from.
    pub refp: i32,
    /// Meetings with an Avanguard reporting from the dangerous sector.
    pub det_meets: u32,
    /// Displacement of the first unexplored node of the dangerous sector.
    pub target: i32,
    /// Branch taken by a state with several invocations.
    pub mode: u8,
    /// Previous round counted towards a wait on a marked node.
    pub last_ok: bool,
    /// Present rounds counted while waiting on a marked node.
    pub waited: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PebbleOp {
    Place,
    Take,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Termination {
    pub state: State,
    /// Reported black hole, as a displacement from the start node.
    pub location: i32,
    pub round: u32,
}

/// Complete per-agent execution state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AgentMem {
    pub role: Role,
    pub state: State,
    pub regs: Regs,
    pub c: Counters,
    pub inv: Invocation,
    pub walk: Walk,
    pub carrying: u8,
    /// Displacement where this agent last placed its pebble.
    pub pebble_at: Option<i32>,
    pub done: Option<Termination>,
    /// Entry statements of the initial state have not run yet.
    pub fresh: bool,
}

impl AgentMem {
    pub fn new(role: Role, state: State, carrying: u8) -> Self {
        AgentMem {
            role,
            state,
            regs: Regs::default(),
            c: Counters::default(),
            inv: Invocation::explore(Heading::Nil),
            walk: Walk::Ready,
            carrying,
            pebble_at: None,
            done: None,
            fresh: true,
        }
    }

    /// Within a cautious walk with its pebble left behind on the previous
    /// node.
    pub fn mid_cycle(&self) -> bool {
        self.inv.cautious && self.walk == Walk::Out
    }

    /// Stepping back onto its own pebble this round.
    pub fn unmarking(&self, arrived: bool) -> bool {
        self.inv.cautious && self.walk == Walk::Back && arrived
    }

    /// Visible as a meeting party: not in the middle of a cautious step.
    pub fn meeting_eligible(&self) -> bool {
        !self.mid_cycle()
    }

    pub fn begin(&mut self, inv: Invocation) {
        self.inv = inv;
        self.walk = Walk::Ready;
        self.c.reset_invocation();
    }

    pub fn own_pebble_here(&self, p: &Percept, fx: &Effects) -> bool {
        match self.pebble_at {
            Some(at) => (at - self.c.disp).rem_euclid(p.n as i32) == 0 && fx.pebbles_here(p) > 0,
            None => false,
        }
    }
}

/// Pebble effects an agent requests during its tick, with its local view.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Effects {
    pub ops: Vec<PebbleOp>,
    pub here_delta: i32,
}

impl Effects {
    pub fn pebbles_here(&self, p: &Percept) -> u32 {
        (p.pebbles_here as i32 + self.here_delta).max(0) as u32
    }

    /// A pebble remains on the node once returning owners have removed theirs.
    pub fn marked(&self, p: &Percept) -> bool {
        self.pebbles_here(p) > p.pebbles_leaving
    }

    pub fn place(&mut self, m: &mut AgentMem) {
        if m.carrying > 0 {
            m.carrying -= 1;
            m.pebble_at = Some(m.c.disp);
            self.here_delta += 1;
            self.ops.push(PebbleOp::Place);
        }
    }

    pub fn take(&mut self, m: &mut AgentMem, p: &Percept) {
        if self.pebbles_here(p) > 0 {
            m.carrying += 1;
            if m.pebble_at.map(|a| (a - m.c.disp).rem_euclid(p.n as i32) == 0) == Some(true) {
                m.pebble_at = None;
            }
            self.here_delta -= 1;
            self.ops.push(PebbleOp::Take);
        }
    }
}

/// Outcome of running a state's entry statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entry {
    Invoke(Invocation),
    Goto(State),
    /// Terminal state reporting a displacement from the start node.
    Terminate(i32),
    /// The state needs a symmetry-breaking outcome among colocated agents.
    Sync(SyncKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SyncKind {
    /// Pair forming in the first phase of the scattered algorithm.
    Two,
    /// Group forming in its second phase.
    BreakSymmetry,
}

/// An agent program.
pub trait Program {
    /// Register upkeep on the fresh snapshot, before any guard.
    fn observe(&self, _m: &mut AgentMem, _p: &Percept) {}
    fn enter(&self, m: &mut AgentMem, p: &Percept, fx: &mut Effects) -> Entry;
    /// First satisfied guard of the current invocation. `mid_cycle` is set
    /// while a cautious step is in progress.
    fn guard(&self, m: &AgentMem, p: &Percept, fx: &Effects, mid_cycle: bool) -> Option<State>;
    /// Whether a terminal state is still reachable from the current role.
    fn can_terminate(&self, m: &AgentMem) -> bool;
    /// The agent removes its own pebble from its node this round.
    fn removes_mark(&self, m: &AgentMem, arrived: bool) -> bool {
        m.unmarking(arrived)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub mv: Option<Dir>,
    pub ops: Vec<PebbleOp>,
    pub terminated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TickOut {
    Act(Action),
    Sync(SyncKind),
}

/// Per-round transition budget of one agent.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub agent: usize,
    pub used: u32,
}

impl Budget {
    fn spend(&mut self) -> Result<(), Error> {
        self.used += 1;
        if self.used > MAX_TRANSITIONS {
            Err(Error::UnboundedTransitionChain { agent: self.agent, limit: MAX_TRANSITIONS })
        } else {
            Ok(())
        }
    }
}

/// Run one round of an agent up to its movement decision.
pub fn tick<P: Program + ?Sized>(
    prog: &P,
    m: &mut AgentMem,
    p: &Percept,
    fx: &mut Effects,
    budget: &mut Budget,
) -> Result<TickOut, Error> {
    if m.unmarking(p.self_arrived) {
        fx.take(m, p);
        m.walk = Walk::ReAdv;
    }
    prog.observe(m, p);
    if m.fresh {
        m.fresh = false;
        if let Some(out) = run_entry(prog, m, p, fx, budget)? {
            return Ok(out);
        }
    }
    guards_then_move(prog, m, p, fx, budget)
}

/// Continue a tick after a symmetry-breaking outcome set the role and state.
pub fn resume<P: Program + ?Sized>(
    prog: &P,
    m: &mut AgentMem,
    p: &Percept,
    fx: &mut Effects,
    budget: &mut Budget,
) -> Result<TickOut, Error> {
    if let Some(out) = run_entry(prog, m, p, fx, budget)? {
        return Ok(out);
    }
    guards_then_move(prog, m, p, fx, budget)
}

/// Enter the current state and act on its invocation without evaluating
/// guards; used when a symmetry-breaking group turns out to be a singleton.
pub fn settle<P: Program + ?Sized>(
    prog: &P,
    m: &mut AgentMem,
    p: &Percept,
    fx: &mut Effects,
    budget: &mut Budget,
) -> Result<TickOut, Error> {
    if let Some(out) = run_entry(prog, m, p, fx, budget)? {
        return Ok(out);
    }
    let mv = movement(m, p, fx);
    Ok(TickOut::Act(Action { mv, ops: fx.ops.clone(), terminated: false }))
}

fn run_entry<P: Program + ?Sized>(
    prog: &P,
    m: &mut AgentMem,
    p: &Percept,
    fx: &mut Effects,
    budget: &mut Budget,
) -> Result<Option<TickOut>, Error> {
    loop {
        match prog.enter(m, p, fx) {
            Entry::Invoke(inv) => {
                m.begin(inv);
                return Ok(None);
            }
            Entry::Goto(s) => {
                budget.spend()?;
                m.state = s;
            }
            Entry::Terminate(location) => {
                m.done = Some(Termination { state: m.state, location, round: m.c.ttime });
                return Ok(Some(TickOut::Act(Action { mv: None, ops: fx.ops.clone(), terminated: true })));
            }
            Entry::Sync(k) => return Ok(Some(TickOut::Sync(k))),
        }
    }
}

fn guards_then_move<P: Program + ?Sized>(
    prog: &P,
    m: &mut AgentMem,
    p: &Percept,
    fx: &mut Effects,
    budget: &mut Budget,
) -> Result<TickOut, Error> {
    while let Some(s) = prog.guard(m, p, fx, m.mid_cycle()) {
        budget.spend()?;
        m.state = s;
        if let Some(out) = run_entry(prog, m, p, fx, budget)? {
            return Ok(out);
        }
    }
    let mv = movement(m, p, fx);
    Ok(TickOut::Act(Action { mv, ops: fx.ops.clone(), terminated: false }))
}

fn movement(m: &mut AgentMem, p: &Percept, fx: &mut Effects) -> Option<Dir> {
    let dir = m.inv.heading.dir()?;
    if !m.inv.cautious {
        return if p.present(dir) { Some(dir) } else { None };
    }
    match m.walk {
        Walk::Ready => {
            if m.carrying == 0 || !p.present(dir) {
                return None;
            }
            fx.place(m);
            m.walk = Walk::Out;
            Some(dir)
        }
        Walk::Out => {
            if !p.present(dir.reverse()) {
                return None;
            }
            m.walk = Walk::Back;
            Some(dir.reverse())
        }
        Walk::Back | Walk::ReAdv => {
            if !p.present(dir) {
                m.walk = Walk::ReAdv;
                return None;
            }
            m.walk = Walk::Ready;
            Some(dir)
        }
    }
}
