//! One synchronous round, and runs of many.
//!
//! Micro-order of a round: presence is fixed, every agent perceives, every
//! active agent ticks, symmetry-breaking groups are resolved, pebble
//! operations are applied per node in agent order, agents move, arrivals on
//! the black hole die, counters roll.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::adversary::Adversary;
use crate::algo::{check_algorithm, sync_roles, Algo, Setting};
use crate::comm::CommModel;
use crate::comm::{factorial, nth_permutation};
use crate::error::Error;
use crate::kernel::{
    resume, roll_counters, settle, tick, Action, Budget, Effects, PebbleOp, Percept, Program, RoundObservation, State,
    SyncKind, TickOut, ROLE_COUNT,
};
use crate::kernel::Role;
use crate::ring::{RingSpec, RoundPresence};
use crate::world::{advance, build_world, MoveDecision, Pebble, WorldState};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepInfo {
    pub presence: RoundPresence,
    /// Pairs `(a, b)`, `a < b`, whose meeting began this round.
    pub meetings: Vec<(usize, usize)>,
    pub terminated: Vec<usize>,
    pub died: Vec<usize>,
    /// Sizes of the symmetry-breaking groups, in resolution order.
    pub groups: Vec<usize>,
}

/// Run one round. `elect[g]` selects the ordering of the `g`-th group as a
/// permutation index; missing entries pick agent-index order.
pub fn step<P: Program + ?Sized>(
    prog: &P,
    world: &mut WorldState,
    presence: RoundPresence,
    elect: &[usize],
) -> Result<StepInfo, Error> {
    crate::ring::validate_presence(&world.spec, &presence)?;
    let count = world.agents.len();
    let mut percepts: Vec<Option<Percept>> = vec![None; count];
    for i in 0..count {
        if world.agents[i].active() {
            percepts[i] = Some(world.perceive(prog, &presence, i)?);
        }
    }

    let mut meetings = Vec::new();
    for (i, p) in percepts.iter().enumerate() {
        if let Some(p) = p {
            for q in &p.peers {
                if q.meeting && i < q.agent && percepts[q.agent].is_some() {
                    meetings.push((i, q.agent));
                }
            }
        }
    }

    let mut mems: Vec<_> = world.agents.iter().map(|a| a.mem).collect();
    let mut fxs: Vec<Effects> = vec![Effects::default(); count];
    let mut budgets: Vec<Budget> = (0..count).map(|agent| Budget { agent, used: 0 }).collect();
    let mut outs: Vec<Option<TickOut>> = vec![None; count];
    for i in 0..count {
        if let Some(p) = &percepts[i] {
            outs[i] = Some(tick(prog, &mut mems[i], p, &mut fxs[i], &mut budgets[i])?);
        }
    }

    let mut groups: BTreeMap<(u32, SyncKind), Vec<usize>> = BTreeMap::new();
    for (i, out) in outs.iter().enumerate() {
        if let Some(TickOut::Sync(kind)) = out {
            groups.entry((world.agents[i].node, *kind)).or_default().push(i);
        }
    }
    let mut sizes = Vec::with_capacity(groups.len());
    for (g, ((_, kind), members)) in groups.into_iter().enumerate() {
        let k = members.len();
        // Pebble operations made before the group formed are common knowledge
        // inside the group.
        let deltas: Vec<i32> = members.iter().map(|&i| fxs[i].here_delta).collect();
        let total: i32 = deltas.iter().sum();
        for (&i, d) in members.iter().zip(&deltas) {
            if let Some(p) = percepts[i].as_mut() {
                p.pebbles_here = (p.pebbles_here as i32 + total - d).max(0) as u32;
            }
        }
        let choice = elect.get(g).copied().unwrap_or(0) % factorial(k);
        let roles = sync_roles(kind, k);
        for (pos, idx) in nth_permutation(k, choice).into_iter().enumerate() {
            let (role, state) = roles[pos.min(roles.len() - 1)];
            let m = &mut mems[members[idx]];
            m.role = role;
            m.state = state;
        }
        // Partners see each other's new roles; forming the group is not a
        // meeting.
        for &i in &members {
            let Some(p) = percepts[i].as_mut() else { continue };
            for q in p.peers.iter_mut().filter(|q| members.contains(&q.agent)) {
                let m = &mems[q.agent];
                q.role = m.role;
                q.meeting = false;
                if let Some(pl) = q.payload.as_mut() {
                    pl.role = m.role;
                    pl.state = m.state;
                }
            }
        }
        for &i in &members {
            let m = &mut mems[i];
            let p = percepts[i].as_ref().expect("ticked agents have percepts");
            let out = if k == 1 {
                settle(prog, m, p, &mut fxs[i], &mut budgets[i])?
            } else {
                resume(prog, m, p, &mut fxs[i], &mut budgets[i])?
            };
            if let TickOut::Sync(_) = out {
                return Err(Error::UnboundedTransitionChain { agent: i, limit: crate::kernel::MAX_TRANSITIONS });
            }
            outs[i] = Some(out);
        }
        sizes.push(k);
    }

    for (i, m) in mems.iter().enumerate() {
        world.agents[i].mem = *m;
    }
    let mut terminated = Vec::new();
    let mut decisions = Vec::with_capacity(count);
    for i in 0..count {
        if !world.agents[i].alive {
            continue;
        }
        let mv = match &outs[i] {
            Some(TickOut::Act(Action { mv, ops, terminated: t })) => {
                apply_pebbles(world, i, ops)?;
                if *t {
                    terminated.push(i);
                }
                *mv
            }
            _ => None,
        };
        decisions.push((i, mv.map_or(MoveDecision::Stay, MoveDecision::Go)));
    }

    let died = advance(world, &decisions, &presence)?;

    for (i, p) in percepts.iter().enumerate() {
        let Some(p) = p else { continue };
        let a = &mut world.agents[i];
        if !a.alive || a.mem.done.is_some() {
            continue;
        }
        let moved = match decisions.iter().find(|(j, _)| *j == i) {
            Some((_, MoveDecision::Go(d))) if a.arrived => Some(*d),
            _ => None,
        };
        let mut obs = RoundObservation { left_present: p.left_present, right_present: p.right_present, moved, ..Default::default() };
        let mut met = [false; ROLE_COUNT];
        for q in &p.peers {
            obs.seen[q.role.index()] = true;
            if q.meeting {
                met[q.role.index()] = true;
            }
        }
        obs.met = met;
        roll_counters(&mut a.mem.c, &obs);
        debug_assert_eq!(
            (a.start as i64 + a.mem.c.disp as i64).rem_euclid(world.spec.n as i64) as u32,
            a.node,
            "believed offset diverged from ground truth"
        );
    }

    Ok(StepInfo { presence, meetings, terminated, died, groups: sizes })
}

fn apply_pebbles(world: &mut WorldState, i: usize, ops: &[PebbleOp]) -> Result<(), Error> {
    if ops.is_empty() {
        return Ok(());
    }
    if !world.comm.pebbles() {
        return Err(Error::WrongModel);
    }
    let node = world.agents[i].node;
    for op in ops {
        match op {
            PebbleOp::Place => {
                world.pebbles.push(Pebble { node, owner: i });
                world.pebbles.sort_unstable();
            }
            PebbleOp::Take => {
                let idx = world
                    .pebbles
                    .iter()
                    .position(|p| p.node == node && p.owner == i)
                    .or_else(|| world.pebbles.iter().position(|p| p.node == node));
                match idx {
                    Some(k) => {
                        world.pebbles.remove(k);
                    }
                    // Refused: an earlier agent on this node took it.
                    None => world.agents[i].mem.carrying -= 1,
                }
            }
        }
    }
    Ok(())
}

/// No active agent can still reach a terminal state.
pub fn finished<P: Program + ?Sized>(prog: &P, world: &WorldState) -> bool {
    !world.agents.iter().any(|a| a.active() && prog.can_terminate(&a.mem))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Answer {
    pub agent: usize,
    pub state: State,
    pub node: u32,
    pub round: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Correct,
    Incorrect,
    /// Nobody terminated.
    None,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::Incorrect => "incorrect",
            Verdict::None => "none",
        }
    }
}

pub fn answers(world: &WorldState) -> Vec<Answer> {
    world
        .agents
        .iter()
        .filter_map(|a| {
            a.mem.done.map(|t| Answer {
                agent: a.id,
                state: t.state,
                node: world.spec.offset(a.start, t.location as i64),
                round: t.round,
            })
        })
        .collect()
}

pub fn verdict(answers: &[Answer], bh: u32) -> Verdict {
    if answers.is_empty() {
        Verdict::None
    } else if answers.iter().all(|a| a.node == bh) {
        Verdict::Correct
    } else {
        Verdict::Incorrect
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Until no active agent can terminate.
    AllDone,
    /// Until the first termination.
    FirstTermination,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub world: WorldState,
    pub answers: Vec<Answer>,
    pub verdict: Verdict,
    /// Round of the first termination, or rounds elapsed if none.
    pub rounds: u32,
    pub moves: u64,
    pub horizon_reached: bool,
}

/// Drive `world` with `adv` until the stop rule or `horizon` rounds.
/// `observe` sees the world after each round.
pub fn run<P, A, F>(
    prog: &P,
    mut world: WorldState,
    adv: &mut A,
    horizon: u64,
    stop: StopRule,
    elect: &dyn Fn(u32) -> Vec<usize>,
    mut observe: F,
) -> Result<RunOutcome, Error>
where
    P: Program + ?Sized,
    A: Adversary + ?Sized,
    F: FnMut(&WorldState, &StepInfo),
{
    let mut horizon_reached = false;
    loop {
        let done = finished(prog, &world)
            || (stop == StopRule::FirstTermination && world.agents.iter().any(|a| a.mem.done.is_some()));
        if done {
            break;
        }
        if world.round as u64 >= horizon {
            horizon_reached = true;
            break;
        }
        let presence = adv.decide(&world).map_or(RoundPresence::ALL, RoundPresence::missing);
        let choices = elect(world.round);
        let info = step(prog, &mut world, presence, &choices)?;
        observe(&world, &info);
    }
    let answers = answers(&world);
    let verdict = verdict(&answers, world.spec.bh);
    let rounds = answers.iter().map(|a| a.round).min().unwrap_or(world.round);
    let moves = world.agents.iter().map(|a| a.moves as u64).sum();
    Ok(RunOutcome { world, answers, verdict, rounds, moves, horizon_reached })
}


/// Build the starting world for `algo`: the team's roles at `starts` (one
/// node for colocated teams, else one per agent), after the feasibility gate.
pub fn setup(algo: &Algo, bh: u32, starts: &[u32], comm: CommModel) -> Result<WorldState, Error> {
    let spec = RingSpec::new(algo.n, bh)?;
    let team = algo.team();
    let mut distinct = starts.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let setting = Setting { comm: comm.kind, colocated: distinct.len() <= 1, anonymous: !comm.identity_visibility };
    check_algorithm(algo.id, &setting)?;
    let placements: Vec<(Role, u32)> = match starts.len() {
        0 => return Err(Error::EmptyPlacement),
        1 => team.iter().map(|&r| (r, starts[0])).collect(),
        k if k == team.len() => team.iter().zip(starts).map(|(&r, &v)| (r, v)).collect(),
        _ => return Err(Error::DecisionMismatch),
    };
    build_world(spec, &placements, comm)
}

/// The usual communication model for `algo`.
pub fn default_comm(algo: &Algo) -> CommModel {
    CommModel::new(algo.id.default_comm(), !algo.id.anonymous())
}
