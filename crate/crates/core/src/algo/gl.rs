//! Gather and locate for three scattered anonymous agents with pebbles.
//!
//! Phase 1 (until round `9n` or until all three meet) is a clockwise cautious
//! walk in which pairs organise into an Explorer and Followers. Phase 2 forms
//! a pendulum team from whoever gathered.

use crate::kernel::{AgentMem, Effects, Entry, Heading, Invocation, Percept, Role, State, SyncKind, Walk};

use super::{cp, Algo};

const LEFT: Invocation = Invocation::explore(Heading::Left);
const RIGHT: Invocation = Invocation::explore(Heading::Right);
const NIL: Invocation = Invocation::explore(Heading::Nil);
const CAUTIOUS_RIGHT: Invocation = Invocation::cautious(Heading::Right);

const PROBE: u8 = 1;
const HOLD: u8 = 2;
const WAIT: u8 = 1;

/// Counts rounds in which the node is marked, the marker is away and the
/// clockwise edge is present. The marker standing on the node resets it.
pub(super) fn observe(m: &mut AgentMem, p: &Percept) {
    if p.marker_staying {
        m.regs.waited = 0;
    } else if m.regs.last_ok {
        m.regs.waited += 1;
    }
    m.regs.last_ok = counts(p);
}

fn counts(p: &Percept) -> bool {
    p.pebbles_here > p.pebbles_leaving && !p.marker_staying && p.right_present
}

fn start_wait(m: &mut AgentMem, p: &Percept) {
    m.regs.waited = 0;
    m.regs.last_ok = counts(p);
}

fn next_unsafe(m: &AgentMem) -> bool {
    m.regs.waited >= 2
}

fn end_of_phase1(a: &Algo, m: &AgentMem, p: &Percept) -> bool {
    m.c.ttime == 9 * a.n || p.count_here() == 3
}

/// A pebble other than the agent's own remains on the node.
fn foreign_mark(m: &AgentMem, p: &Percept, fx: &Effects) -> bool {
    let remaining = fx.pebbles_here(p).saturating_sub(p.pebbles_leaving);
    remaining > u32::from(m.own_pebble_here(p, fx))
}

fn take_own(m: &mut AgentMem, p: &Percept, fx: &mut Effects) {
    if m.own_pebble_here(p, fx) {
        fx.take(m, p);
    }
}

pub(super) fn enter(a: &Algo, m: &mut AgentMem, p: &Percept, fx: &mut Effects) -> Entry {
    use State::*;
    match (m.role, m.state) {
        (Role::Anon, Init) => Entry::Invoke(CAUTIOUS_RIGHT),
        (Role::Anon, Wait) | (Role::MLeader, Cautious) => {
            start_wait(m, p);
            Entry::Invoke(NIL)
        }
        (Role::Anon, Two) => Entry::Sync(SyncKind::Two),
        (Role::Anon, Copy) => {
            let state = p
                .peers
                .iter()
                .find(|q| q.role == Role::Follower && q.meeting)
                .map(|q| match q.payload.map(|x| x.state) {
                    Some(Follow) if !q.arrived => Follow,
                    _ => WaitFollower,
                })
                .unwrap_or(WaitFollower);
            m.role = Role::Follower;
            Entry::Goto(state)
        }
        (Role::Anon | Role::Explorer | Role::Follower, EndPhase1) => {
            m.role = Role::Anon;
            Entry::Goto(InitP2)
        }
        (Role::Anon | Role::Explorer | Role::Follower | Role::MLeader, Terminate) => Entry::Terminate(m.c.disp + 1),
        (Role::Explorer, Explore) => {
            if !fx.marked(p) {
                fx.place(m);
                m.regs.mode = 0;
                Entry::Invoke(RIGHT)
            } else {
                m.regs.mode = WAIT;
                start_wait(m, p);
                Entry::Invoke(NIL)
            }
        }
        (Role::Explorer, Back) => Entry::Invoke(LEFT),
        (Role::Explorer, MoveForward) => {
            fx.take(m, p);
            Entry::Invoke(RIGHT)
        }
        (Role::Follower, WaitFollower) => {
            start_wait(m, p);
            Entry::Invoke(NIL)
        }
        (Role::Follower, Follow) => Entry::Invoke(RIGHT),
        (Role::Anon, InitP2) => {
            m.regs.refp = m.c.disp;
            if p.count_here() > 1 {
                Entry::Goto(BreakSimmetry)
            } else if m.carrying == 0 && !m.own_pebble_here(p, fx) {
                m.regs.mode = PROBE;
                Entry::Invoke(LEFT)
            } else if fx.pebbles_here(p) > 0 {
                fx.take(m, p);
                m.regs.mode = HOLD;
                Entry::Invoke(NIL)
            } else {
                Entry::Goto(Forward)
            }
        }
        (Role::Anon, Forward) => Entry::Invoke(RIGHT),
        (Role::Anon, BreakSimmetry) => {
            take_own(m, p, fx);
            m.regs.refp = m.c.disp;
            Entry::Sync(SyncKind::BreakSymmetry)
        }
        (Role::Anon, BeAvanguard) => {
            take_own(m, p, fx);
            m.role = Role::Avanguard;
            Entry::Goto(Init)
        }
        (Role::MLeader, Go) => Entry::Invoke(RIGHT),
        (Role::MLeader, StartCP) => {
            m.role = Role::Leader;
            Entry::Goto(Init)
        }
        (Role::MLeader, TerminateR) => Entry::Terminate(m.regs.refp - (m.c.meets(Role::Retroguard) as i32 + 1)),
        (Role::Leader | Role::Avanguard | Role::Retroguard, _) => cp::enter(a, m),
        (r, s) => unreachable!("no gather state {:?} for {:?}", s, r),
    }
}

pub(super) fn guard(a: &Algo, m: &AgentMem, p: &Percept, fx: &Effects, mid_cycle: bool) -> Option<State> {
    use State::*;
    let enodes = m.c.enodes(a.n);
    let phase2_timeout = m.c.ttime as u64 > 4 * (a.n as u64) * (a.n as u64);
    match (m.role, m.state) {
        (Role::Anon | Role::Explorer | Role::Follower, Init | Wait | Explore | Back | MoveForward | WaitFollower | Follow)
            if end_of_phase1(a, m, p) =>
        {
            Some(EndPhase1)
        }
        (Role::Anon, Init) => {
            if mid_cycle {
                None
            } else if fx.marked(p) {
                Some(Wait)
            } else if p.meeting(Role::Anon) {
                Some(Two)
            } else if p.meeting(Role::Follower) {
                Some(Copy)
            } else {
                None
            }
        }
        (Role::Anon, Wait) => {
            if next_unsafe(m) {
                Some(Terminate)
            } else if !fx.marked(p) {
                Some(Init)
            } else {
                None
            }
        }
        (Role::Explorer, Explore) => {
            if m.regs.mode != WAIT {
                (enodes > 0).then_some(Back)
            } else if next_unsafe(m) {
                Some(Terminate)
            } else if !fx.marked(p) {
                Some(Explore)
            } else {
                None
            }
        }
        (Role::Explorer, Back) => (enodes > 0).then_some(MoveForward),
        (Role::Explorer, MoveForward) => (enodes > 0).then_some(Explore),
        (Role::Follower, WaitFollower) => {
            if p.meeting_state(Role::Explorer, Back) {
                Some(Follow)
            } else if next_unsafe(m) {
                Some(Terminate)
            } else {
                None
            }
        }
        (Role::Follower, Follow) => (enodes > 0).then_some(WaitFollower),
        (Role::Anon, InitP2) if m.regs.mode == PROBE => {
            if p.meeting(Role::Anon) {
                Some(BreakSimmetry)
            } else if p.meeting(Role::MLeader) {
                Some(BeAvanguard)
            } else if enodes > 0 || phase2_timeout {
                Some(Forward)
            } else {
                None
            }
        }
        (Role::Anon, InitP2) => {
            if p.meeting(Role::Anon) {
                Some(BreakSimmetry)
            } else if phase2_timeout {
                Some(Forward)
            } else {
                None
            }
        }
        (Role::Anon, Forward) => {
            if foreign_mark(m, p, fx) {
                Some(Terminate)
            } else if p.meeting(Role::Anon) {
                Some(BreakSimmetry)
            } else if p.meeting(Role::MLeader) {
                Some(BeAvanguard)
            } else {
                None
            }
        }
        (Role::MLeader, Go) => {
            if fx.marked(p) {
                Some(Cautious)
            } else if p.meeting(Role::Anon) {
                Some(StartCP)
            } else if cp::failed_retroguard(a, m) {
                Some(TerminateR)
            } else {
                None
            }
        }
        (Role::MLeader, Cautious) => {
            if p.meeting(Role::Anon) {
                Some(StartCP)
            } else if next_unsafe(m) {
                Some(Terminate)
            } else if cp::failed_retroguard(a, m) {
                Some(TerminateR)
            } else {
                None
            }
        }
        (Role::Leader | Role::Avanguard | Role::Retroguard, _) => cp::guard(a, m, p),
        _ => None,
    }
}

/// Cautious walkers unmark on stepping back; an Explorer unmarks when its
/// return leg ends.
pub(super) fn removes_mark(a: &Algo, m: &AgentMem, arrived: bool) -> bool {
    if m.unmarking(arrived) {
        return true;
    }
    m.role == Role::Explorer && m.state == State::Back && arrived && m.c.ttime != 9 * a.n && m.walk == Walk::Ready
}
