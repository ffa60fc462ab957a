//! Explicit-state verification over every adversary schedule.
//!
//! The search is a depth-first walk over configurations. Branches are the
//! pruned missing-edge choices of each round and, for the gather algorithm,
//! every ordering of every symmetry-breaking group. Each configuration is
//! memoized by a canonical encoding together with the worst number of rounds
//! still needed before a correct termination, so a revisit at any depth is
//! answered without re-exploring.
//!
//! The encoding drops the round number, drops counters no guard reads (and
//! the total-time counter when the algorithm never reads it), caps the rest
//! just above the thresholds they are compared against, and reduces
//! displacements modulo `n`.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::adversary::{enumerate_choices, Schedule};
use crate::algo::{Algo, AlgorithmId};
use crate::comm::{factorial, CommModel};
use crate::error::Error;
use crate::kernel::{AgentMem, Role};
use crate::ring::{EdgeId, RoundPresence};
use crate::sim::{answers, finished, setup, step};
use crate::world::WorldState;

pub const DEFAULT_MEMO_CAP: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Property {
    /// A terminated agent reported a node other than the black hole.
    Safety,
    /// The Leader died.
    RoleSafety,
    /// No correct termination can ever happen on this path.
    #[default]
    Liveness,
    /// The simulator rejected a step.
    Fault,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Safety => "safety",
            Property::RoleSafety => "role-safety",
            Property::Liveness => "liveness",
            Property::Fault => "fault",
        }
    }
}

/// A path through the branch tree: the missing edge of each round and the
/// group orderings passed to the simulator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counterexample {
    pub schedule: Schedule,
    pub elect: Vec<Vec<usize>>,
    pub property: Property,
    /// Round in which the violation shows: the faulty step, or the horizon
    /// for liveness.
    pub round: u32,
}

impl Counterexample {
    /// Elect choices for `round`, as expected by [`crate::sim::run`].
    pub fn elect_at(&self, round: u32) -> Vec<usize> {
        self.elect.get(round as usize).cloned().unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Every path terminates correctly by the horizon; `worst_rounds` is the
    /// latest first-termination round over all paths.
    Pass { worst_rounds: u32 },
    Fail(Counterexample),
    /// A path reaches the horizon without a correct termination.
    HorizonExceeded(Counterexample),
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Pass { .. } => "pass",
            Outcome::Fail(_) => "fail",
            Outcome::HorizonExceeded(_) => "horizon",
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Distinct configurations stored.
    pub explored: u64,
    pub horizon: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub horizon: u64,
    pub memo_cap: u64,
    /// Branch over symmetry-breaking outcomes.
    pub elect_branching: bool,
}

impl CheckConfig {
    pub fn for_algo(algo: &Algo) -> Self {
        CheckConfig {
            horizon: algo.default_horizon(),
            memo_cap: DEFAULT_MEMO_CAP,
            elect_branching: algo.id == AlgorithmId::Gl,
        }
    }
}

/// Canonical encoding of a configuration.
pub fn encode(algo: &Algo, world: &WorldState) -> Vec<u8> {
    let n = world.spec.n as i32;
    let mut out = Vec::with_capacity(32 + 64 * world.agents.len());
    for a in &world.agents {
        out.push(a.alive as u8 | (a.arrived as u8) << 1);
        if !a.alive {
            continue;
        }
        push_u32(&mut out, a.node);
        push_u32(&mut out, a.prev_node);
        encode_mem(algo, &a.mem, n, &mut out);
    }
    push_u32(&mut out, world.pebbles.len() as u32);
    for p in &world.pebbles {
        push_u32(&mut out, p.node);
        push_u32(&mut out, p.owner as u32);
    }
    for b in &world.boards {
        push_u32(&mut out, b.len() as u32);
        out.extend_from_slice(b);
    }
    out
}

fn encode_mem(algo: &Algo, m: &AgentMem, n: i32, out: &mut Vec<u8>) {
    let c = &m.c;
    let shift = c.disp.div_euclid(n) * n;
    let rel = |x: i32| x - shift;
    out.push(m.role as u8);
    out.push(m.state as u8);
    out.push(m.inv.heading as u8 | (m.inv.cautious as u8) << 2 | (m.walk as u8) << 3 | (m.fresh as u8) << 5);
    out.push(m.carrying);
    push_i32(out, rel(c.disp));
    for (lo, hi) in [(c.t_lo, c.t_hi), (c.e_lo, c.e_hi)] {
        // A saturated interval stays saturated; its exact ends no longer matter.
        let (lo, hi) = if hi - lo >= n - 1 { (c.disp - (n - 1), c.disp) } else { (lo, hi) };
        push_i32(out, lo - c.disp);
        push_i32(out, hi - c.disp);
    }
    // Only counters some guard reads are kept, each capped just above the
    // largest threshold it is compared against.
    let n_u = algo.n;
    let meets = c.meets(Role::Retroguard);
    let ttime = match algo.id {
        AlgorithmId::Gl => c.ttime.min(4 * n_u * n_u + 1),
        _ => 0,
    };
    push_u32(out, ttime);
    push_u32(out, meets);
    push_u32(out, c.present_c().min(2));
    push_u32(out, c.em_c_retro.min(2 * (meets + 1 + n_u) + 1));
    if algo.id == AlgorithmId::Cdo {
        push_u32(out, c.rlast(Role::Retroguard).min(7 * ((meets + 1) * algo.s + n_u) + 1));
        push_u32(out, c.rlast(Role::Avanguard).min(3 * n_u + 1));
    }
    let g = &m.regs;
    push_u32(out, g.next_target);
    push_u32(out, g.steps);
    push_i32(out, rel(g.refp));
    push_u32(out, g.det_meets);
    push_i32(out, rel(g.target));
    out.push(g.mode | (g.last_ok as u8) << 4);
    push_u32(out, g.waited.min(2));
    match m.pebble_at {
        Some(at) => {
            out.push(1);
            push_i32(out, rel(at));
        }
        None => out.push(0),
    }
    match m.done {
        Some(t) => {
            out.push(1 + t.state as u8);
            push_i32(out, t.location.rem_euclid(n));
        }
        None => out.push(0),
    }
}

fn push_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn push_i32(out: &mut Vec<u8>, x: i32) {
    out.extend_from_slice(&x.to_le_bytes());
}

#[derive(Clone, Copy, Debug)]
enum Memo {
    OnStack,
    /// Worst remaining steps to a correct termination and the branch taken.
    Done { worst: u32, via: u32 },
}

enum Status {
    Open,
    /// A correct termination has happened; only safety is still checked.
    Live,
    Violated(Property),
}

struct Child {
    choice: Option<EdgeId>,
    elect: Vec<usize>,
    world: WorldState,
    status: Status,
    finished: bool,
}

struct Frame {
    key: Vec<u8>,
    children: Vec<Child>,
    next: usize,
    live: bool,
    worst: u32,
    via: u32,
    /// Branch that led here from the parent.
    choice: Option<EdgeId>,
    elect: Vec<usize>,
}

/// All successors of `world`, in branch order.
fn expand(algo: &Algo, world: &WorldState, cfg: &CheckConfig) -> Vec<Child> {
    let mut out = Vec::new();
    for choice in enumerate_choices(world) {
        let presence = choice.map_or(RoundPresence::ALL, RoundPresence::missing);
        let mut first = world.clone();
        let groups = match step(algo, &mut first, presence, &[]) {
            Ok(info) => info.groups,
            Err(_) => {
                out.push(Child { choice, elect: Vec::new(), world: first, status: Status::Violated(Property::Fault), finished: true });
                continue;
            }
        };
        let combos: usize = if cfg.elect_branching { groups.iter().map(|&k| factorial(k)).product() } else { 1 };
        for idx in 0..combos {
            let elect = mixed_radix(idx, &groups);
            let (w, res) = if idx == 0 {
                (first.clone(), Ok(()))
            } else {
                let mut w = world.clone();
                let r = step(algo, &mut w, presence, &elect).map(|_| ());
                (w, r)
            };
            let status = match res {
                Err(_) => Status::Violated(Property::Fault),
                Ok(()) => judge(algo, world, &w),
            };
            let finished = finished(algo, &w);
            let elect = if elect.iter().all(|&e| e == 0) { Vec::new() } else { elect };
            out.push(Child { choice, elect, world: w, status, finished });
        }
    }
    out
}

fn mixed_radix(mut idx: usize, groups: &[usize]) -> Vec<usize> {
    let mut out = vec![0; groups.len()];
    for (g, &k) in groups.iter().enumerate() {
        let f = factorial(k);
        out[g] = idx % f;
        idx /= f;
    }
    out
}

fn judge(algo: &Algo, before: &WorldState, after: &WorldState) -> Status {
    let bh = after.spec.bh;
    if answers(after).iter().any(|a| a.node != bh) {
        return Status::Violated(Property::Safety);
    }
    if algo.id != AlgorithmId::Gl {
        let leader_died = before
            .agents
            .iter()
            .zip(&after.agents)
            .any(|(b, a)| b.alive && !a.alive && b.mem.role == Role::Leader);
        if leader_died {
            return Status::Violated(Property::RoleSafety);
        }
    }
    if after.agents.iter().any(|a| a.mem.done.is_some()) {
        Status::Live
    } else {
        Status::Open
    }
}

/// Verify `algo` on one instance. `starts` is one node for a colocated team
/// or one node per agent.
pub fn model_check(algo: &Algo, bh: u32, starts: &[u32], comm: CommModel, cfg: &CheckConfig) -> Result<Verdict, Error> {
    let root = setup(algo, bh, starts, comm)?;
    Search { algo, cfg, memo: HashMap::new() }.run(root)
}

/// How the per-instance horizon is chosen in a matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HorizonRule {
    /// [`Algo::default_horizon`].
    #[default]
    Default,
    Fixed(u64),
}

/// One instance of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub algo: Algo,
    pub bh: u32,
    pub starts: Vec<u32>,
}

impl Cell {
    pub fn config(&self, rule: HorizonRule, memo_cap: u64) -> CheckConfig {
        let mut cfg = CheckConfig::for_algo(&self.algo);
        cfg.memo_cap = memo_cap;
        if let HorizonRule::Fixed(h) = rule {
            cfg.horizon = h;
        }
        cfg
    }

    pub fn check(&self, rule: HorizonRule, memo_cap: u64) -> Result<Verdict, Error> {
        let comm = crate::sim::default_comm(&self.algo);
        model_check(&self.algo, self.bh, &self.starts, comm, &self.config(rule, memo_cap))
    }
}

/// Every instance for the given ring sizes: colocated teams start at node 0
/// with the black hole anywhere else; scattered teams take every set of
/// distinct safe nodes for every black hole.
pub fn matrix_cells(algo_of: impl Fn(u32) -> Algo, ns: &[u32]) -> Vec<Cell> {
    let mut out = Vec::new();
    for &n in ns {
        let algo = algo_of(n);
        if algo.id.colocated() {
            out.extend((1..n).map(|bh| Cell { algo, bh, starts: vec![0] }));
            continue;
        }
        let k = algo.team().len();
        for bh in 0..n {
            let safe: Vec<u32> = (0..n).filter(|&v| v != bh).collect();
            for pick in combinations(safe.len(), k) {
                out.push(Cell { algo, bh, starts: pick.iter().map(|&i| safe[i]).collect() });
            }
        }
    }
    out
}

/// Index sets of size `k` from `0..len`, in lexicographic order.
fn combinations(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > len {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < len - k + i) else { return out };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellResult {
    pub cell: Cell,
    pub result: Result<Verdict, Error>,
}

/// Aggregate over a matrix of instances.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatrixReport {
    pub cells: Vec<CellResult>,
}

impl MatrixReport {
    pub fn passed(&self) -> usize {
        self.cells.iter().filter(|c| c.result.as_ref().is_ok_and(|v| v.outcome.is_pass())).count()
    }

    /// Cells that failed, exceeded the horizon or could not be checked.
    pub fn not_passed(&self) -> usize {
        self.cells.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.not_passed() == 0
    }

    /// Worst rounds per ring size over passing cells, ascending in `n`.
    pub fn worst_by_n(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for c in &self.cells {
            let Ok(Verdict { outcome: Outcome::Pass { worst_rounds }, .. }) = &c.result else { continue };
            match out.iter_mut().find(|(n, _)| *n == c.cell.algo.n) {
                Some((_, w)) => *w = (*w).max(*worst_rounds),
                None => out.push((c.cell.algo.n, *worst_rounds)),
            }
        }
        out.sort_unstable();
        out
    }
}

/// Check every cell of [`matrix_cells`] in turn.
pub fn check_matrix(algo_of: impl Fn(u32) -> Algo, ns: &[u32], rule: HorizonRule, memo_cap: u64) -> MatrixReport {
    let cells = matrix_cells(algo_of, ns);
    MatrixReport {
        cells: cells
            .into_iter()
            .map(|cell| {
                let result = cell.check(rule, memo_cap);
                CellResult { cell, result }
            })
            .collect(),
    }
}

struct Search<'a> {
    algo: &'a Algo,
    cfg: &'a CheckConfig,
    memo: HashMap<Vec<u8>, Memo>,
}

impl Search<'_> {
    fn verdict(&self, outcome: Outcome) -> Verdict {
        Verdict { outcome, explored: self.memo.len() as u64, horizon: self.cfg.horizon }
    }

    fn run(mut self, root: WorldState) -> Result<Verdict, Error> {
        let horizon = self.cfg.horizon;
        let key = encode(self.algo, &root);
        if finished(self.algo, &root) {
            return Ok(self.verdict(Outcome::Fail(build(Vec::new(), Vec::new(), Property::Liveness, 0))));
        }
        let mut stack = vec![self.frame(key, &root, false, None, Vec::new())];
        loop {
            let depth = stack.len() as u64 - 1;
            let top = stack.last_mut().expect("stack is never empty here");
            if top.next == top.children.len() {
                let done = stack.pop().expect("non-empty");
                let worst = if done.live { 0 } else { done.worst };
                self.memo.insert(done.key, Memo::Done { worst, via: done.via });
                let Some(parent) = stack.last_mut() else {
                    return Ok(self.verdict(Outcome::Pass { worst_rounds: worst.saturating_sub(1) }));
                };
                let i = parent.next - 1;
                if !parent.live && 1 + worst > parent.worst {
                    parent.worst = 1 + worst;
                    parent.via = i as u32;
                }
                continue;
            }
            let i = top.next;
            top.next += 1;
            let live = top.live;
            let child = &top.children[i];
            let child_live = match child.status {
                Status::Violated(p) => {
                    let cx = self.counterexample(&stack, i, p);
                    return Ok(self.verdict(Outcome::Fail(cx)));
                }
                Status::Live => true,
                Status::Open => false,
            };
            let value = if child.finished {
                if !child_live {
                    let cx = self.counterexample(&stack, i, Property::Liveness);
                    return Ok(self.verdict(Outcome::Fail(cx)));
                }
                Some(0)
            } else {
                let key = encode(self.algo, &child.world);
                match self.memo.get(&key) {
                    Some(Memo::OnStack) if child_live => Some(0),
                    Some(Memo::OnStack) => {
                        let cx = self.cycle(&stack, i, &key);
                        return Ok(self.verdict(Outcome::Fail(cx)));
                    }
                    Some(&Memo::Done { worst, .. }) => {
                        if !child_live && depth + 1 + worst as u64 > horizon {
                            let cx = self.overrun(&stack, i);
                            return Ok(self.verdict(Outcome::HorizonExceeded(cx)));
                        }
                        Some(worst)
                    }
                    None => {
                        if !child_live && depth + 1 >= horizon {
                            let cx = self.counterexample(&stack, i, Property::Liveness);
                            return Ok(self.verdict(Outcome::HorizonExceeded(cx)));
                        }
                        if self.memo.len() as u64 >= self.cfg.memo_cap {
                            return Err(Error::StateExplosion { explored: self.memo.len() as u64 });
                        }
                        let (choice, elect) = (child.choice, child.elect.clone());
                        let world = child.world.clone();
                        let frame = self.frame(key, &world, child_live, choice, elect);
                        stack.push(frame);
                        None
                    }
                }
            };
            if let Some(v) = value {
                let top = stack.last_mut().expect("non-empty");
                if !live && 1 + v > top.worst {
                    top.worst = 1 + v;
                    top.via = i as u32;
                }
            }
        }
    }

    fn frame(&mut self, key: Vec<u8>, world: &WorldState, live: bool, choice: Option<EdgeId>, elect: Vec<usize>) -> Frame {
        self.memo.insert(key.clone(), Memo::OnStack);
        let children = expand(self.algo, world, self.cfg);
        Frame { key, children, next: 0, live, worst: 0, via: 0, choice, elect }
    }

    /// Branches from the root down to child `i` of the top frame.
    fn prefix(stack: &[Frame], i: usize) -> (Vec<Option<EdgeId>>, Vec<Vec<usize>>) {
        let mut sched: Vec<Option<EdgeId>> = stack.iter().skip(1).map(|f| f.choice).collect();
        let mut elect: Vec<Vec<usize>> = stack.iter().skip(1).map(|f| f.elect.clone()).collect();
        let top = stack.last().expect("non-empty");
        sched.push(top.children[i].choice);
        elect.push(top.children[i].elect.clone());
        (sched, elect)
    }

    fn counterexample(&self, stack: &[Frame], i: usize, property: Property) -> Counterexample {
        let (sched, elect) = Self::prefix(stack, i);
        let round = match property {
            Property::Liveness if !stack.last().expect("non-empty").children[i].finished => self.cfg.horizon as u32,
            _ => sched.len() as u32 - 1,
        };
        build(sched, elect, property, round)
    }

    /// Prefix to a revisited configuration followed by its memoized worst path.
    fn overrun(&self, stack: &[Frame], i: usize) -> Counterexample {
        let (mut sched, mut elect) = Self::prefix(stack, i);
        let mut world = stack.last().expect("non-empty").children[i].world.clone();
        while (sched.len() as u64) < self.cfg.horizon {
            let Some(&Memo::Done { via, .. }) = self.memo.get(&encode(self.algo, &world)) else { break };
            let mut children = expand(self.algo, &world, self.cfg);
            if children.is_empty() {
                break;
            }
            let c = children.swap_remove(via as usize);
            sched.push(c.choice);
            elect.push(c.elect);
            if !matches!(c.status, Status::Open) || c.finished {
                break;
            }
            world = c.world;
        }
        build(sched, elect, Property::Liveness, self.cfg.horizon as u32)
    }

    /// Prefix closing a cycle, with the cycle repeated up to the horizon.
    fn cycle(&self, stack: &[Frame], i: usize, key: &[u8]) -> Counterexample {
        let (sched, elect) = Self::prefix(stack, i);
        let start = stack.iter().position(|f| f.key == key).expect("on-stack key has a frame");
        // Rounds `start..` of the prefix form the loop.
        let (mut s, mut e) = (sched.clone(), elect.clone());
        let (ls, le) = (sched[start..].to_vec(), elect[start..].to_vec());
        while (s.len() as u64) < self.cfg.horizon {
            s.extend_from_slice(&ls);
            e.extend_from_slice(&le);
        }
        s.truncate(self.cfg.horizon as usize);
        e.truncate(self.cfg.horizon as usize);
        build(s, e, Property::Liveness, self.cfg.horizon as u32)
    }
}

fn build(sched: Vec<Option<EdgeId>>, mut elect: Vec<Vec<usize>>, property: Property, round: u32) -> Counterexample {
    while elect.last().is_some_and(|e| e.is_empty()) {
        elect.pop();
    }
    Counterexample { schedule: Schedule(sched), elect, property, round }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(4, 3).len(), 4);
        assert_eq!(combinations(5, 3).len(), 10);
        assert_eq!(combinations(2, 3).len(), 0);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn matrix_shapes() {
        assert_eq!(matrix_cells(|n| Algo::new(AlgorithmId::Cp, n), &[4, 5, 6]).len(), 3 + 4 + 5);
        let gl = matrix_cells(|n| Algo::new(AlgorithmId::Gl, n), &[5]);
        assert_eq!(gl.len(), 5 * 4);
        assert!(gl.iter().all(|c| !c.starts.contains(&c.bh)));
        assert!(matrix_cells(|n| Algo::new(AlgorithmId::Cp, n), &[]).is_empty());
        assert!(check_matrix(|n| Algo::new(AlgorithmId::Cp, n), &[], HorizonRule::Default, 10).all_pass());
    }

    #[test]
    fn small_cp_cell_passes() {
        let cell = Cell { algo: Algo::new(AlgorithmId::Cp, 4), bh: 2, starts: vec![0] };
        let v = cell.check(HorizonRule::Default, DEFAULT_MEMO_CAP).unwrap();
        assert_eq!(v.outcome, Outcome::Pass { worst_rounds: 21 });
    }

    #[test]
    fn tiny_cap_explodes() {
        let cell = Cell { algo: Algo::new(AlgorithmId::Cp, 5), bh: 2, starts: vec![0] };
        assert!(matches!(cell.check(HorizonRule::Default, 10), Err(Error::StateExplosion { .. })));
    }
}
