//! Pendulum search: the Avanguard simulates a cautious walk for the Leader
//! while the Retroguard swings counter-clockwise, one new node per swing.

use crate::kernel::{AgentMem, Entry, Heading, Invocation, Percept, Role, State};

use super::Algo;

const LEFT: Invocation = Invocation::explore(Heading::Left);
const RIGHT: Invocation = Invocation::explore(Heading::Right);
const NIL: Invocation = Invocation::explore(Heading::Nil);

pub(super) fn enter(a: &Algo, m: &mut AgentMem) -> Entry {
    use State::*;
    match (m.role, m.state) {
        (Role::Avanguard, Init | NewNode | Move) => Entry::Invoke(RIGHT),
        (Role::Avanguard, Return) => Entry::Invoke(LEFT),
        (Role::Retroguard, Init) => {
            m.regs.next_target = 1;
            Entry::Invoke(LEFT)
        }
        (Role::Retroguard, Return) => Entry::Invoke(RIGHT),
        (Role::Retroguard, Bounce) => {
            m.regs.next_target = m.c.enodes(a.n) + 1;
            Entry::Invoke(LEFT)
        }
        (Role::Leader, Init | Cautious) => Entry::Invoke(NIL),
        (Role::Leader, Move) => Entry::Invoke(RIGHT),
        (Role::Leader, TerminateA) => Entry::Terminate(m.c.disp + 1),
        (Role::Leader, TerminateR) => Entry::Terminate(m.regs.refp - (m.c.meets(Role::Retroguard) as i32 + 1)),
        (r, s) => unreachable!("no pendulum state {:?} for {:?}", s, r),
    }
}

pub(super) fn guard(a: &Algo, m: &AgentMem, p: &Percept) -> Option<State> {
    use State::*;
    let enodes = m.c.enodes(a.n);
    match (m.role, m.state) {
        (Role::Avanguard, Init | NewNode) => (enodes > 0).then_some(Return),
        (Role::Avanguard, Return) => (enodes > 0).then_some(Move),
        (Role::Avanguard, Move) => (enodes > 0).then_some(NewNode),
        (Role::Retroguard, Init | Bounce) => (enodes >= m.regs.next_target).then_some(Return),
        (Role::Retroguard, Return) => sees_leader(p).then_some(Bounce),
        (Role::Leader, Init | Cautious) => {
            if p.meeting(Role::Avanguard) {
                Some(Move)
            } else if failed_avanguard(m) {
                Some(TerminateA)
            } else if failed_retroguard(a, m) {
                Some(TerminateR)
            } else {
                None
            }
        }
        (Role::Leader, Move) => {
            if enodes > 0 {
                Some(Cautious)
            } else if failed_retroguard(a, m) {
                Some(TerminateR)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// The Leader of a two-agent group in the scattered algorithm is labelled
/// MLeader until the third agent joins.
pub(super) fn sees_leader(p: &Percept) -> bool {
    p.sees(Role::Leader) || p.sees(Role::MLeader)
}

/// Two rounds with the clockwise edge present and no return.
pub(super) fn failed_avanguard(m: &AgentMem) -> bool {
    m.c.present_c() >= 2
}

pub(super) fn failed_retroguard(a: &Algo, m: &AgentMem) -> bool {
    if a.two_agent {
        return false;
    }
    let tnodes = m.c.tnodes(a.n) as u64;
    let meets = m.c.meets(Role::Retroguard) as u64;
    m.c.em_c_retro as u64 > 2 * ((meets + 1) + tnodes)
}
