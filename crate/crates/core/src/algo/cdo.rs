//! Double oscillation: the Retroguard cautiously explores sectors of
//! `s = ceil(sqrt n)` nodes counter-clockwise; when it fails to report, the
//! Leader and the Avanguard close in on the dangerous sector from both sides.

use crate::kernel::{AgentMem, Effects, Entry, Heading, Invocation, Percept, Role, State};

use super::{cp, Algo};

const LEFT: Invocation = Invocation::explore(Heading::Left);
const RIGHT: Invocation = Invocation::explore(Heading::Right);
const NIL: Invocation = Invocation::explore(Heading::Nil);
const CAUTIOUS_LEFT: Invocation = Invocation::cautious(Heading::Left);

pub(super) fn observe(_a: &Algo, m: &mut AgentMem, p: &Percept) {
    if m.role == Role::Leader && m.state == State::Detection {
        let reporting = p.peers.iter().any(|q| {
            q.role == Role::Avanguard
                && q.meeting
                && matches!(q.payload.map(|x| x.state), Some(State::SearchLeader | State::Return1))
        });
        if reporting {
            m.regs.det_meets += 1;
        }
    }
}

pub(super) fn enter(a: &Algo, m: &mut AgentMem, p: &Percept) -> Entry {
    use State::*;
    let n = a.n;
    match (m.role, m.state) {
        (Role::Retroguard, Init) => Entry::Invoke(CAUTIOUS_LEFT),
        (Role::Retroguard, Return) => Entry::Invoke(RIGHT),
        (Role::Retroguard, Bounce) => {
            m.regs.steps = m.c.enodes(n) + a.s;
            Entry::Invoke(CAUTIOUS_LEFT)
        }
        (Role::Avanguard, Init | NewNode | Move) => Entry::Invoke(RIGHT),
        (Role::Avanguard, Return | SearchLeader | Return1) => Entry::Invoke(LEFT),
        (Role::Avanguard, Detection1) => {
            let leader = p.peers.iter().find(|q| q.role == Role::Leader).and_then(|q| q.payload);
            let ahead = leader.map_or(1, |l| (l.target - l.pos).rem_euclid(n as i32) as u32);
            m.regs.next_target = ahead.max(1);
            Entry::Invoke(RIGHT)
        }
        (Role::Avanguard, Detection2) => {
            m.regs.next_target = m.c.enodes(n) + 1;
            Entry::Invoke(RIGHT)
        }
        (Role::Leader, Init | Cautious) => Entry::Invoke(NIL),
        (Role::Leader, Move) => Entry::Invoke(RIGHT),
        (Role::Leader, Detection) => {
            m.c.meets[Role::Avanguard.index()] = 0;
            m.c.rlast[Role::Avanguard.index()] = 0;
            m.regs.det_meets = 0;
            m.regs.target = first_unexplored(a, m);
            Entry::Invoke(LEFT)
        }
        (Role::Leader, TerminateA) => Entry::Terminate(m.c.disp + 1),
        (Role::Leader, TerminateR) => Entry::Terminate(m.c.disp - 1),
        (Role::Leader, TerminateAD) => Entry::Terminate(m.regs.target + m.regs.det_meets.max(1) as i32 - 1),
        (r, s) => unreachable!("no oscillation state {:?} for {:?}", s, r),
    }
}

/// Clockwise displacement of the first node of the dangerous sector not yet
/// explored clockwise. The sector reported by `J = #Meets[Retroguard]` spans
/// counter-clockwise offsets `J*s+1 ..= (J+1)*s`; its clockwise end is
/// `c_end = n - (J+1)*s` and the Leader's own walk has already covered
/// `D = max(0, Tnodes + 1 - c_end)` of its nodes.
pub fn first_unexplored(a: &Algo, m: &AgentMem) -> i32 {
    let n = a.n as i64;
    let j = m.c.meets(Role::Retroguard) as i64;
    let c_end = n - ((j + 1) * a.s as i64).min(n - 1);
    let tnodes = m.c.tnodes(a.n) as i64;
    let d = (tnodes + 1 - c_end).max(0);
    (c_end + d) as i32
}

pub(super) fn guard(a: &Algo, m: &AgentMem, p: &Percept, fx: &Effects, mid_cycle: bool) -> Option<State> {
    use State::*;
    let n = a.n;
    let enodes = m.c.enodes(n);
    match (m.role, m.state) {
        (Role::Retroguard, Init) => (!mid_cycle && enodes >= a.s).then_some(Return),
        (Role::Retroguard, Bounce) => (!mid_cycle && enodes >= m.regs.steps).then_some(Return),
        (Role::Retroguard, Return) => p.sees(Role::Leader).then_some(Bounce),
        (Role::Avanguard, Init | NewNode) => {
            if enodes == 0 && !p.sees(Role::Leader) {
                Some(SearchLeader)
            } else if enodes > 0 {
                Some(Return)
            } else {
                None
            }
        }
        (Role::Avanguard, Return) => (enodes > 0).then_some(Move),
        (Role::Avanguard, Move) => {
            if !p.sees(Role::Leader) {
                Some(SearchLeader)
            } else if enodes > 0 {
                Some(NewNode)
            } else {
                None
            }
        }
        (Role::Avanguard, SearchLeader) => p.meeting(Role::Leader).then_some(Detection1),
        (Role::Avanguard, Detection1 | Detection2) => (enodes >= m.regs.next_target).then_some(Return1),
        (Role::Avanguard, Return1) => p.meeting(Role::Leader).then_some(Detection2),
        (Role::Leader, Init | Cautious) => {
            if p.meeting(Role::Avanguard) {
                Some(Move)
            } else if cp::failed_avanguard(m) {
                Some(TerminateA)
            } else if failed_retroguard(a, m) {
                Some(Detection)
            } else {
                None
            }
        }
        (Role::Leader, Move) => {
            if enodes > 0 {
                Some(Cautious)
            } else if failed_retroguard(a, m) {
                Some(Detection)
            } else {
                None
            }
        }
        (Role::Leader, Detection) => {
            if fx.marked(p) {
                Some(TerminateR)
            } else if m.c.rlast(Role::Avanguard) > 3 * n {
                Some(TerminateAD)
            } else {
                None
            }
        }
        _ => None,
    }
}

fn failed_retroguard(a: &Algo, m: &AgentMem) -> bool {
    let meets = m.c.meets(Role::Retroguard) as u64;
    let bound = 7 * ((meets + 1) * a.s as u64 + m.c.tnodes(a.n) as u64);
    m.c.rlast(Role::Retroguard) as u64 > bound
}
