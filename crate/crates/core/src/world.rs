//! Ground truth of a run: agent positions, pebbles, whiteboards.

use alloc::vec;
use alloc::vec::Vec;

use crate::comm::{whiteboard_capacity_bits, CommModel, Payload};
use crate::error::Error;
use crate::kernel::{AgentMem, PeerView, Percept, Program, Role, State};
use crate::ring::{validate_presence, Dir, RingSpec, RoundPresence};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AgentRecord {
    pub id: usize,
    pub start: u32,
    pub node: u32,
    /// Node at the previous round's snapshot.
    pub prev_node: u32,
    pub alive: bool,
    pub arrived: bool,
    pub moves: u32,
    pub mem: AgentMem,
}

impl AgentRecord {
    pub fn active(&self) -> bool {
        self.alive && self.mem.done.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pebble {
    pub node: u32,
    pub owner: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WorldState {
    pub spec: RingSpec,
    pub comm: CommModel,
    pub round: u32,
    pub agents: Vec<AgentRecord>,
    /// Placed pebbles, sorted.
    pub pebbles: Vec<Pebble>,
    /// Per-node whiteboards; empty unless the model has them.
    pub boards: Vec<Vec<u8>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveDecision {
    Stay,
    Go(Dir),
}

pub fn build_world(spec: RingSpec, placements: &[(Role, u32)], comm: CommModel) -> Result<WorldState, Error> {
    if spec.n < 4 {
        return Err(Error::BadSpec { n: spec.n });
    }
    if placements.is_empty() {
        return Err(Error::EmptyPlacement);
    }
    let carrying = u8::from(comm.pebbles());
    let mut agents = Vec::with_capacity(placements.len());
    for (id, &(role, node)) in placements.iter().enumerate() {
        if node >= spec.n {
            return Err(Error::IndexOutOfRange { index: node, n: spec.n });
        }
        if node == spec.bh {
            return Err(Error::PlacementOnBlackHole { node });
        }
        agents.push(AgentRecord {
            id,
            start: node,
            node,
            prev_node: node,
            alive: true,
            arrived: false,
            moves: 0,
            mem: AgentMem::new(role, State::Init, carrying),
        });
    }
    let boards = if comm.boards() { vec![Vec::new(); spec.n as usize] } else { Vec::new() };
    Ok(WorldState { spec, comm, round: 0, agents, pebbles: Vec::new(), boards })
}

impl WorldState {
    pub fn pebbles_at(&self, node: u32) -> u32 {
        self.pebbles.iter().filter(|p| p.node == node).count() as u32
    }

    pub fn carried(&self) -> u32 {
        self.agents.iter().filter(|a| a.alive).map(|a| a.mem.carrying as u32).sum()
    }

    pub fn alive_count(&self) -> usize {
        self.agents.iter().filter(|a| a.alive).count()
    }

    /// Place the agent's pebble on its node.
    pub fn place(&mut self, agent: usize) -> Result<(), Error> {
        if !self.comm.pebbles() {
            return Err(Error::WrongModel);
        }
        let a = &self.agents[agent];
        if !a.alive {
            return Err(Error::DeadAgent { agent });
        }
        if a.mem.carrying == 0 {
            return Err(Error::NoPebbleCarried);
        }
        let node = a.node;
        self.agents[agent].mem.carrying -= 1;
        self.pebbles.push(Pebble { node, owner: agent });
        self.pebbles.sort_unstable();
        Ok(())
    }

    /// Take a pebble from the agent's node, its own if there is one.
    pub fn take(&mut self, agent: usize) -> Result<(), Error> {
        if !self.comm.pebbles() {
            return Err(Error::WrongModel);
        }
        let a = &self.agents[agent];
        if !a.alive {
            return Err(Error::DeadAgent { agent });
        }
        let node = a.node;
        let idx = self
            .pebbles
            .iter()
            .position(|p| p.node == node && p.owner == agent)
            .or_else(|| self.pebbles.iter().position(|p| p.node == node));
        match idx {
            Some(i) => {
                self.pebbles.remove(i);
                self.agents[agent].mem.carrying += 1;
                Ok(())
            }
            None => Err(Error::NoPebbleHere),
        }
    }

    fn colocated_before(&self, i: usize, j: usize) -> bool {
        self.agents[i].prev_node == self.agents[j].prev_node
    }

    /// Local snapshot of agent `i`.
    pub fn perceive<P: Program + ?Sized>(&self, prog: &P, presence: &RoundPresence, i: usize) -> Result<Percept, Error> {
        let me = &self.agents[i];
        if !me.alive {
            return Err(Error::DeadAgent { agent: i });
        }
        let spec = &self.spec;
        let node = me.node;
        let first = self.round > 0;
        let me_eligible = me.mem.meeting_eligible() && me.mem.done.is_none();
        let mut peers = Vec::new();
        for (j, a) in self.agents.iter().enumerate() {
            if j == i || !a.alive || a.node != node {
                continue;
            }
            let terminated = a.mem.done.is_some();
            let meeting = first
                && !self.colocated_before(i, j)
                && me_eligible
                && !terminated
                && a.mem.meeting_eligible();
            let role = if self.comm.identity_visibility || self.comm.payloads() { a.mem.role } else { Role::Anon };
            let payload = self.comm.payloads().then(|| payload_of(&a.mem));
            peers.push(PeerView { agent: j, role, payload, meeting, terminated, arrived: a.arrived });
        }
        let mut pebbles_leaving = 0;
        let mut marker_staying = false;
        for p in self.pebbles.iter().filter(|p| p.node == node) {
            let o = &self.agents[p.owner];
            if p.owner == i || !o.alive || o.node != node {
                continue;
            }
            if o.mem.done.is_none() && prog.removes_mark(&o.mem, o.arrived) {
                pebbles_leaving += 1;
            } else {
                marker_staying = true;
            }
        }
        Ok(Percept {
            n: spec.n,
            left_present: presence.is_present(spec.edge_towards(node, Dir::Left)),
            right_present: presence.is_present(spec.edge_towards(node, Dir::Right)),
            self_arrived: me.arrived,
            peers,
            pebbles_here: self.pebbles_at(node),
            pebbles_leaving,
            marker_staying,
            board: if self.comm.boards() { self.boards[node as usize].clone() } else { Vec::new() },
        })
    }

    pub fn whiteboard_read(&self, agent: usize) -> Result<Vec<u8>, Error> {
        if !self.comm.boards() {
            return Err(Error::WrongModel);
        }
        let a = &self.agents[agent];
        if !a.alive {
            return Err(Error::DeadAgent { agent });
        }
        Ok(self.boards[a.node as usize].clone())
    }

    pub fn whiteboard_write(&mut self, agent: usize, payload: &[u8]) -> Result<(), Error> {
        if !self.comm.boards() {
            return Err(Error::WrongModel);
        }
        let capacity = whiteboard_capacity_bits(self.spec.n);
        let bits = payload.len() as u32 * 8;
        if bits > capacity {
            return Err(Error::CapacityExceeded { bits, capacity });
        }
        let a = &self.agents[agent];
        if !a.alive {
            return Err(Error::DeadAgent { agent });
        }
        self.boards[a.node as usize] = payload.to_vec();
        Ok(())
    }
}

pub fn payload_of(m: &AgentMem) -> Payload {
    Payload {
        role: m.role,
        state: m.state,
        meets_retro: m.c.meets(Role::Retroguard),
        pos: m.c.disp,
        target: m.regs.target,
    }
}

/// Movement and black-hole phases of a round. `decisions` lists one entry
/// per alive agent, in index order. Returns the agents that died.
pub fn advance(world: &mut WorldState, decisions: &[(usize, MoveDecision)], presence: &RoundPresence) -> Result<Vec<usize>, Error> {
    validate_presence(&world.spec, presence)?;
    for &(i, _) in decisions {
        if i >= world.agents.len() || !world.agents[i].alive {
            return Err(Error::DecisionForDeadAgent { agent: i });
        }
    }
    if decisions.len() != world.alive_count() {
        return Err(Error::DecisionMismatch);
    }
    let spec = world.spec;
    for a in world.agents.iter_mut().filter(|a| a.alive) {
        a.prev_node = a.node;
        a.arrived = false;
    }
    for &(i, d) in decisions {
        let a = &mut world.agents[i];
        if let MoveDecision::Go(dir) = d {
            if presence.is_present(spec.edge_towards(a.node, dir)) {
                a.node = spec.step(a.node, dir);
                a.arrived = true;
                a.moves += 1;
            }
        }
    }
    let mut died = Vec::new();
    for a in world.agents.iter_mut().filter(|a| a.alive) {
        if a.node == spec.bh {
            a.alive = false;
            a.mem.carrying = 0;
            died.push(a.id);
        }
    }
    world.round += 1;
    Ok(died)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comm::CommKind;
    use crate::ring::EdgeId;

    fn world(n: u32, bh: u32, nodes: &[u32], kind: CommKind) -> WorldState {
        let placements: Vec<(Role, u32)> = nodes.iter().map(|&v| (Role::Anon, v)).collect();
        build_world(RingSpec::new(n, bh).unwrap(), &placements, CommModel::new(kind, true)).unwrap()
    }

    #[test]
    fn construction() {
        let w = world(5, 2, &[0, 0, 0], CommKind::Vision);
        assert_eq!(w.round, 0);
        assert!(w.agents.iter().all(|a| a.alive && a.node == 0 && a.mem.carrying == 0));
        let spec = RingSpec::new(5, 2).unwrap();
        let err = build_world(spec, &[(Role::Leader, 2)], CommModel::new(CommKind::Vision, true));
        assert_eq!(err, Err(Error::PlacementOnBlackHole { node: 2 }));
        let w = world(6, 0, &[1, 3, 5], CommKind::Pebble);
        assert_eq!(w.carried(), 3);
        assert!(w.pebbles.is_empty());
    }

    #[test]
    fn moves_blocks_and_deaths() {
        let mut w = world(5, 2, &[0, 1], CommKind::Pebble);
        let died = advance(&mut w, &[(0, MoveDecision::Go(Dir::Right)), (1, MoveDecision::Go(Dir::Right))], &RoundPresence::ALL).unwrap();
        assert_eq!(died, [1]);
        assert_eq!((w.agents[0].node, w.agents[0].arrived, w.round), (1, true, 1));
        assert!(!w.agents[1].alive);
        assert_eq!(w.carried(), 1);
        let mut w = world(5, 2, &[0], CommKind::Vision);
        advance(&mut w, &[(0, MoveDecision::Go(Dir::Right))], &RoundPresence::missing(EdgeId(0))).unwrap();
        assert_eq!((w.agents[0].node, w.agents[0].arrived), (0, false));
    }

    #[test]
    fn crossing_agents_swap() {
        let mut w = world(6, 4, &[1, 2], CommKind::Vision);
        advance(&mut w, &[(0, MoveDecision::Go(Dir::Right)), (1, MoveDecision::Go(Dir::Left))], &RoundPresence::ALL).unwrap();
        assert_eq!((w.agents[0].node, w.agents[1].node), (2, 1));
        let p = w.perceive(&crate::algo::Algo::new(crate::algo::AlgorithmId::Cp, 6), &RoundPresence::ALL, 0).unwrap();
        assert!(p.peers.is_empty());
    }

    #[test]
    fn pebble_mutual_exclusion() {
        let mut w = world(6, 0, &[1, 1], CommKind::Pebble);
        w.place(0).unwrap();
        assert_eq!(w.take(1), Ok(()));
        assert_eq!(w.take(0), Err(Error::NoPebbleHere));
        assert_eq!(w.agents[1].mem.carrying, 2);
    }

    #[test]
    fn whiteboards() {
        let mut w = world(5, 2, &[0, 0], CommKind::Whiteboard);
        assert_eq!(w.whiteboard_read(1).unwrap(), Vec::<u8>::new());
        w.whiteboard_write(0, b"f=7").unwrap();
        assert_eq!(w.whiteboard_read(1).unwrap(), b"f=7");
        assert_eq!(w.whiteboard_write(0, &[0; 4]), Err(Error::CapacityExceeded { bits: 32, capacity: 24 }));
        let v = world(5, 2, &[0], CommKind::Vision);
        assert_eq!(v.whiteboard_read(0), Err(Error::WrongModel));
    }
}
