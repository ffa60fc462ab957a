//! Edge-removal strategies and the checker's pruned choice enumerator.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::Role;
use crate::ring::{EdgeId, RingSpec};
use crate::world::WorldState;

/// A source of one optional missing edge per round.
pub trait Adversary {
    fn decide(&mut self, world: &WorldState) -> Option<EdgeId>;
}

/// Missing edge per round; rounds past the end have none.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule(pub Vec<Option<EdgeId>>);

impl Schedule {
    pub fn at(&self, round: u32) -> Option<EdgeId> {
        self.0.get(round as usize).copied().flatten()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    Static,
    FixedEdge(u32),
    BlockBhClockwise,
    BlockLeaderForward,
    CutOscillator,
    RandomSeeded { p: f64, seed: u64 },
    Scripted(Schedule),
}

impl Strategy {
    /// Descriptor used in reports, `NAME[:param]`.
    pub fn descriptor(&self) -> String {
        match self {
            Strategy::Static => "static".into(),
            Strategy::FixedEdge(e) => format!("fixed:{e}"),
            Strategy::BlockBhClockwise => "block-bh".into(),
            Strategy::BlockLeaderForward => "block-leader".into(),
            Strategy::CutOscillator => "cut".into(),
            Strategy::RandomSeeded { p, .. } => format!("random:{p}"),
            Strategy::Scripted(_) => "scripted".into(),
        }
    }

    /// Parse a descriptor; `seed` feeds the random strategy. Scripted
    /// schedules are built by the caller.
    pub fn parse(s: &str, seed: u64) -> Option<Strategy> {
        let (name, param) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        match (name, param) {
            ("static", None) => Some(Strategy::Static),
            ("fixed", Some(e)) => e.parse().ok().map(Strategy::FixedEdge),
            ("block-bh", None) => Some(Strategy::BlockBhClockwise),
            ("block-leader", None) => Some(Strategy::BlockLeaderForward),
            ("cut", None) => Some(Strategy::CutOscillator),
            ("random", Some(p)) => p.parse().ok().filter(|p: &f64| (0.0..=1.0).contains(p)).map(|p| Strategy::RandomSeeded { p, seed }),
            _ => None,
        }
    }

    /// The structured strategies used for worst-case sweeps.
    pub fn builtin() -> Vec<Strategy> {
        vec![Strategy::Static, Strategy::BlockBhClockwise, Strategy::BlockLeaderForward, Strategy::CutOscillator]
    }
}

/// A strategy with its running state.
#[derive(Clone, Debug)]
pub struct StrategyAdversary {
    pub strategy: Strategy,
    rng: ChaCha8Rng,
    visited: Vec<bool>,
    flip: bool,
}

impl StrategyAdversary {
    pub fn new(strategy: Strategy) -> Self {
        let seed = match &strategy {
            Strategy::RandomSeeded { seed, .. } => *seed,
            _ => 0,
        };
        StrategyAdversary { strategy, rng: ChaCha8Rng::seed_from_u64(seed), visited: Vec::new(), flip: false }
    }
}

impl Adversary for StrategyAdversary {
    fn decide(&mut self, world: &WorldState) -> Option<EdgeId> {
        let spec = world.spec;
        match &self.strategy {
            Strategy::Static => None,
            Strategy::FixedEdge(e) => Some(EdgeId(*e % spec.n)),
            Strategy::BlockBhClockwise => Some(EdgeId(spec.bh)),
            Strategy::BlockLeaderForward => world
                .agents
                .iter()
                .find(|a| a.alive && matches!(a.mem.role, Role::Leader | Role::MLeader))
                .map(|a| EdgeId(a.node)),
            Strategy::CutOscillator => {
                if self.visited.len() != spec.n as usize {
                    self.visited = vec![false; spec.n as usize];
                }
                for a in world.agents.iter().filter(|a| a.alive) {
                    self.visited[a.node as usize] = true;
                }
                self.flip = !self.flip;
                cut_edge(&spec, &self.visited, world, self.flip)
            }
            Strategy::RandomSeeded { p, .. } => {
                let p = *p;
                if self.rng.gen_bool(p) {
                    Some(EdgeId(self.rng.gen_range(0..spec.n)))
                } else {
                    None
                }
            }
            Strategy::Scripted(s) => s.at(world.round),
        }
    }
}

/// A frontier edge of the visited region next to an active agent, preferring
/// the clockwise frontier when `clockwise` is set and the other side otherwise.
fn cut_edge(spec: &RingSpec, visited: &[bool], world: &WorldState, clockwise: bool) -> Option<EdgeId> {
    let n = spec.n;
    let cw_frontier = |e: u32| visited[e as usize] && !visited[((e + 1) % n) as usize];
    let ccw_frontier = |e: u32| !visited[e as usize] && visited[((e + 1) % n) as usize];
    let occupied = |e: u32| {
        world.agents.iter().any(|a| a.active() && EdgeId(e).incident_to(a.node, n))
    };
    let sides: [&dyn Fn(u32) -> bool; 2] =
        if clockwise { [&cw_frontier, &ccw_frontier] } else { [&ccw_frontier, &cw_frontier] };
    for side in sides {
        if let Some(e) = (0..n).find(|&e| side(e) && occupied(e)) {
            return Some(EdgeId(e));
        }
    }
    None
}

/// Missing-edge choices that can lead to distinct percepts: none, every edge
/// incident to an occupied node, and the lowest-index other edge.
pub fn enumerate_choices(world: &WorldState) -> Vec<Option<EdgeId>> {
    let n = world.spec.n;
    let mut incident = vec![false; n as usize];
    for a in world.agents.iter().filter(|a| a.alive) {
        incident[a.node as usize] = true;
        incident[((a.node + n - 1) % n) as usize] = true;
    }
    let mut out = vec![None];
    out.extend((0..n).filter(|&e| incident[e as usize]).map(|e| Some(EdgeId(e))));
    if let Some(far) = (0..n).find(|&e| !incident[e as usize]) {
        out.push(Some(EdgeId(far)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comm::{CommKind, CommModel};
    use crate::world::build_world;

    fn world(n: u32, bh: u32, nodes: &[u32]) -> WorldState {
        let placements: Vec<(Role, u32)> = nodes.iter().map(|&v| (Role::Leader, v)).collect();
        build_world(RingSpec::new(n, bh).unwrap(), &placements, CommModel::new(CommKind::Vision, true)).unwrap()
    }

    #[test]
    fn fixed_strategies() {
        let w = world(5, 2, &[0]);
        assert_eq!(StrategyAdversary::new(Strategy::Static).decide(&w), None);
        assert_eq!(StrategyAdversary::new(Strategy::BlockBhClockwise).decide(&w), Some(EdgeId(2)));
        assert_eq!(StrategyAdversary::new(Strategy::BlockLeaderForward).decide(&w), Some(EdgeId(0)));
        let sched = Schedule(vec![Some(EdgeId(0)), None, Some(EdgeId(3))]);
        let mut adv = StrategyAdversary::new(Strategy::Scripted(sched));
        let mut w1 = w.clone();
        w1.round = 1;
        assert_eq!(adv.decide(&w1), None);
        w1.round = 9;
        assert_eq!(adv.decide(&w1), None);
    }

    #[test]
    fn choice_counts() {
        assert_eq!(enumerate_choices(&world(10, 5, &[0, 0, 0])).len(), 4);
        assert_eq!(enumerate_choices(&world(10, 5, &[0, 3, 6])).len(), 8);
        assert_eq!(enumerate_choices(&world(4, 3, &[0, 1, 2])).len(), 5);
    }

    #[test]
    fn descriptors_parse() {
        for s in ["static", "fixed:3", "block-bh", "block-leader", "cut", "random:0.5"] {
            assert_eq!(Strategy::parse(s, 7).unwrap().descriptor(), s);
        }
        assert!(Strategy::parse("random:2", 7).is_none());
        assert!(Strategy::parse("bogus", 7).is_none());
    }
}
