//! Ring footprint, edge identifiers and per-round edge presence.
//!
//! Edge `i` joins `v_i` and `v_{i+1 mod n}`. Moving right (clockwise) increases
//! the node index.

use crate::error::Error;

/// Static description of a ring instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingSpec {
    pub n: u32,
    pub bh: u32,
}

impl RingSpec {
    pub fn new(n: u32, bh: u32) -> Result<Self, Error> {
        if n < 4 {
            return Err(Error::BadSpec { n });
        }
        if bh >= n {
            return Err(Error::IndexOutOfRange { index: bh, n });
        }
        Ok(RingSpec { n, bh })
    }

    /// Node reached from `node` by one step in `dir`.
    pub fn step(&self, node: u32, dir: Dir) -> u32 {
        match dir {
            Dir::Right => (node + 1) % self.n,
            Dir::Left => (node + self.n - 1) % self.n,
        }
    }

    /// Edge crossed when leaving `node` in `dir`.
    pub fn edge_towards(&self, node: u32, dir: Dir) -> EdgeId {
        match dir {
            Dir::Right => EdgeId(node),
            Dir::Left => EdgeId((node + self.n - 1) % self.n),
        }
    }

    /// Node at signed displacement `d` from `origin`.
    pub fn offset(&self, origin: u32, d: i64) -> u32 {
        (origin as i64 + d).rem_euclid(self.n as i64) as u32
    }
}

/// Movement direction. Right is clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    Left,
    Right,
}

impl Dir {
    pub fn reverse(self) -> Dir {
        match self {
            Dir::Left => Dir::Right,
            Dir::Right => Dir::Left,
        }
    }

    pub fn delta(self) -> i32 {
        match self {
            Dir::Left => -1,
            Dir::Right => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

impl EdgeId {
    pub fn incident_to(self, node: u32, n: u32) -> bool {
        self.0 == node || (self.0 + 1) % n == node
    }
}

/// Edge presence for one round: at most one edge is missing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RoundPresence {
    pub missing: Option<EdgeId>,
}

impl RoundPresence {
    pub const ALL: RoundPresence = RoundPresence { missing: None };

    pub fn missing(e: EdgeId) -> Self {
        RoundPresence { missing: Some(e) }
    }

    pub fn is_present(&self, e: EdgeId) -> bool {
        self.missing != Some(e)
    }

    /// Build a presence from a raw list of removed edges, as read from a
    /// schedule file. More than one removal disconnects the ring.
    pub fn from_removed(spec: &RingSpec, removed: &[u32]) -> Result<Self, Error> {
        for &e in removed {
            if e >= spec.n {
                return Err(Error::IndexOutOfRange { index: e, n: spec.n });
            }
        }
        let mut distinct: alloc::vec::Vec<u32> = removed.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        match distinct.len() {
            0 => Ok(RoundPresence::ALL),
            1 => Ok(RoundPresence::missing(EdgeId(distinct[0]))),
            k => Err(Error::Disconnected { removed: k as u32 }),
        }
    }
}

pub fn validate_presence(spec: &RingSpec, presence: &RoundPresence) -> Result<(), Error> {
    match presence.missing {
        Some(EdgeId(i)) if i >= spec.n => Err(Error::IndexOutOfRange { index: i, n: spec.n }),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presence_validation() {
        let spec = RingSpec::new(5, 2).unwrap();
        assert!(validate_presence(&spec, &RoundPresence::ALL).is_ok());
        assert!(validate_presence(&spec, &RoundPresence::missing(EdgeId(3))).is_ok());
        assert_eq!(
            RoundPresence::from_removed(&spec, &[1, 4]),
            Err(Error::Disconnected { removed: 2 })
        );
        assert_eq!(
            validate_presence(&spec, &RoundPresence::missing(EdgeId(5))),
            Err(Error::IndexOutOfRange { index: 5, n: 5 })
        );
    }

    #[test]
    fn small_rings_rejected() {
        assert_eq!(RingSpec::new(3, 0), Err(Error::BadSpec { n: 3 }));
    }

    #[test]
    fn edges_towards() {
        let spec = RingSpec::new(5, 2).unwrap();
        assert_eq!(spec.edge_towards(0, Dir::Left), EdgeId(4));
        assert_eq!(spec.edge_towards(0, Dir::Right), EdgeId(0));
        assert!(EdgeId(4).incident_to(0, 5));
        assert!(!EdgeId(2).incident_to(0, 5));
    }
}
