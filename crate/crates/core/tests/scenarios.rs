use bhs_core::adversary::{Schedule, Strategy, StrategyAdversary};
use bhs_core::algo::{Algo, AlgorithmId};
use bhs_core::kernel::{Role, State};
use bhs_core::ring::EdgeId;
use bhs_core::sim::{answers, default_comm, run, setup, verdict, Answer, RunOutcome, StopRule, Verdict};
use bhs_core::world::WorldState;

fn go(id: AlgorithmId, n: u32, bh: u32, starts: &[u32], strategy: Strategy) -> (RunOutcome, Vec<WorldState>) {
    let algo = Algo::new(id, n);
    let world = setup(&algo, bh, starts, default_comm(&algo)).unwrap();
    let mut adv = StrategyAdversary::new(strategy);
    let mut frames = vec![world.clone()];
    let out = run(&algo, world, &mut adv, algo.default_horizon(), StopRule::AllDone, &|_| vec![], |w, _| {
        frames.push(w.clone())
    })
    .unwrap();
    (out, frames)
}

fn agent(w: &WorldState, role: Role) -> &bhs_core::world::AgentRecord {
    w.agents.iter().find(|a| a.mem.role == role).unwrap()
}

fn only_answer(out: &RunOutcome) -> Answer {
    assert_eq!(out.answers.len(), 1, "{:?}", out.answers);
    out.answers[0]
}

#[test]
fn cp_static_n5_bh2() {
    let (out, _) = go(AlgorithmId::Cp, 5, 2, &[0], Strategy::Static);
    let a = only_answer(&out);
    assert_eq!((a.state, a.node), (State::TerminateA, 2));
    assert!(a.round <= 3 * 2 + 4, "round {}", a.round);
    assert!(!agent(&out.world, Role::Avanguard).alive);
    assert!(agent(&out.world, Role::Retroguard).alive);
    assert_eq!(out.verdict, Verdict::Correct);
}

#[test]
fn cp_fixed_edge_zero_uses_the_retroguard() {
    let (out, frames) = go(AlgorithmId::Cp, 5, 2, &[0], Strategy::FixedEdge(0));
    let a = only_answer(&out);
    assert_eq!((a.state, a.node), (State::TerminateR, 2));
    let retro = agent(&out.world, Role::Retroguard);
    assert!(!retro.alive);
    assert_eq!(retro.node, 2);
    // It explored v4 and v3 before dying.
    let visited: Vec<u32> = frames.iter().map(|w| agent(w, Role::Retroguard).node).collect();
    assert!(visited.contains(&4) && visited.contains(&3));
    assert_eq!(agent(&out.world, Role::Leader).mem.c.meets(Role::Retroguard), 2);
}

#[test]
fn cp_bh_next_to_home() {
    let (out, frames) = go(AlgorithmId::Cp, 5, 1, &[0], Strategy::Static);
    let a = only_answer(&out);
    assert_eq!((a.state, a.node), (State::TerminateA, 1));
    let av = frames.iter().position(|w| !agent(w, Role::Avanguard).alive).unwrap();
    // The first move of the Avanguard is its last.
    assert_eq!(frames[..av].iter().map(|w| agent(w, Role::Avanguard).moves).max(), Some(0));
}

#[test]
fn cdo_static_n16_bh5() {
    let (out, _) = go(AlgorithmId::Cdo, 16, 5, &[0], Strategy::Static);
    let a = only_answer(&out);
    assert_eq!((a.state, a.node), (State::TerminateA, 5));
    assert!(a.round <= 3 * 5 + 6);
}

#[test]
fn cdo_blocked_leader_detects_marked_node() {
    let (out, frames) = go(AlgorithmId::Cdo, 16, 13, &[0], Strategy::FixedEdge(0));
    let a = only_answer(&out);
    assert_eq!((a.state, a.node), (State::TerminateR, 13));
    let dead = frames.iter().position(|w| !agent(w, Role::Retroguard).alive).unwrap();
    assert!(frames[dead].pebbles.iter().any(|p| p.node == 14));
    assert!(frames.iter().any(|w| agent(w, Role::Leader).mem.state == State::Detection));
}

#[test]
fn cdo_leader_blocked_during_detection() {
    // Edge 0 until the Leader has entered Detection next to home, then the
    // Leader's counter-clockwise edge for good.
    let mut s = vec![Some(EdgeId(0)); 61];
    s.extend(std::iter::repeat_n(Some(EdgeId(14)), 400));
    let (out, frames) = go(AlgorithmId::Cdo, 16, 13, &[0], Strategy::Scripted(Schedule(s)));
    let a = only_answer(&out);
    assert_eq!((a.state, a.node), (State::TerminateAD, 13));
    for s in [State::SearchLeader, State::Detection1, State::Detection2] {
        assert!(frames.iter().any(|w| agent(w, Role::Avanguard).mem.state == s), "{s:?}");
    }
    assert!(!agent(&out.world, Role::Avanguard).alive);
}

#[test]
fn gl_static_spread() {
    let (out, frames) = go(AlgorithmId::Gl, 6, 0, &[1, 3, 5], Strategy::Static);
    assert_eq!(out.verdict, Verdict::Correct);
    assert!(out.answers.iter().all(|a| a.node == 0));
    // The agent from v5 marks v5 and dies.
    assert!(!out.world.agents[2].alive);
    let death = frames.iter().position(|w| !w.agents[2].alive).unwrap();
    assert!(frames[death].pebbles.iter().any(|p| p.node == 5));
    assert_eq!(out.world.agents.iter().filter(|a| !a.alive).count(), 1);
}

#[test]
fn gl_static_adjacent() {
    let (out, frames) = go(AlgorithmId::Gl, 6, 0, &[1, 2, 3], Strategy::Static);
    assert_eq!(out.verdict, Verdict::Correct);
    assert!(out.answers.iter().all(|a| a.node == 0));
    assert!(out.world.agents.iter().filter(|a| !a.alive).count() <= 1);
    // Walkers in lockstep never meet, so the trailing pair waits on the mark.
    assert!(frames.iter().any(|w| w.agents.iter().any(|a| a.mem.state == State::Wait)));
}

#[test]
fn gl_blocked_phase_one_gathers_into_a_pendulum() {
    let n = 16;
    let (out, frames) = go(AlgorithmId::Gl, n, 8, &[9, 14, 3], Strategy::FixedEdge(7));
    assert_eq!(out.verdict, Verdict::Correct);
    let phase2 = |w: &WorldState| w.agents.iter().any(|a| matches!(a.mem.role, Role::MLeader | Role::Leader | Role::Retroguard));
    let end = frames.iter().position(phase2).unwrap();
    assert!(end as u32 <= 9 * n + 1);
    assert!(frames[end - 1].agents.iter().all(|a| a.alive));
    let nodes: Vec<u32> = frames[end - 1].agents.iter().map(|a| a.node).collect();
    assert!(nodes.iter().all(|&v| v == nodes[0]), "{nodes:?}");
    let roles: Vec<Role> = frames[end].agents.iter().map(|a| a.mem.role).collect();
    // All three gathered, so the team is a full pendulum at once.
    assert!(roles.contains(&Role::Retroguard) && roles.contains(&Role::Leader), "{roles:?}");
}

#[test]
fn answers_and_verdicts() {
    let at = |node| Answer { agent: 0, state: State::TerminateA, node, round: 1 };
    assert_eq!(verdict(&[at(2)], 2), Verdict::Correct);
    assert_eq!(verdict(&[at(2), at(3)], 2), Verdict::Incorrect);
    assert_eq!(verdict(&[], 2), Verdict::None);
}

#[test]
fn terminate_a_reports_clockwise_neighbour() {
    let (out, frames) = go(AlgorithmId::Cp, 5, 2, &[0], Strategy::Static);
    let leader = agent(&out.world, Role::Leader);
    assert_eq!(leader.node, 1);
    assert_eq!(answers(&out.world)[0].node, 2);
    // Everybody dead: no answer.
    let mut w = frames[0].clone();
    for a in &mut w.agents {
        a.alive = false;
    }
    assert_eq!(verdict(&answers(&w), 2), Verdict::None);
}

#[test]
fn two_agent_team() {
    let algo = Algo::two_agent_cp(5);
    let w = setup(&algo, 2, &[0], default_comm(&algo)).unwrap();
    assert_eq!(w.agents.len(), 2);
    assert!(w.agents.iter().all(|a| a.mem.role != Role::Retroguard));
}
