use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring size {n} is below 4")]
    BadSpec { n: u32 },
    #[error("index {index} out of range for ring of size {n}")]
    IndexOutOfRange { index: u32, n: u32 },
    #[error("{removed} edges removed in one round disconnects the ring")]
    Disconnected { removed: u32 },
    #[error("agent placed on the black hole (node {node})")]
    PlacementOnBlackHole { node: u32 },
    #[error("no agents placed")]
    EmptyPlacement,
    #[error("decision given for dead agent {agent}")]
    DecisionForDeadAgent { agent: usize },
    #[error("decisions do not match alive agents")]
    DecisionMismatch,
    #[error("agent {agent} is dead")]
    DeadAgent { agent: usize },
    #[error("agent {agent} made more than {limit} transitions in one round")]
    UnboundedTransitionChain { agent: usize, limit: u32 },
    #[error("agent carries no pebble")]
    NoPebbleCarried,
    #[error("no pebble on this node")]
    NoPebbleHere,
    #[error("resource taken by a concurrent winner")]
    Refused,
    #[error("vision model carries no payloads")]
    VisionNoPayload,
    #[error("election needs at least two agents")]
    SingleAgent,
    #[error("payload of {bits} bits exceeds whiteboard capacity of {capacity} bits")]
    CapacityExceeded { bits: u32, capacity: u32 },
    #[error("operation not available in this communication model")]
    WrongModel,
    #[error("infeasible setting: {reason}")]
    InfeasibleSetting { reason: &'static str },
    #[error("malformed trace: {reason}")]
    MalformedTrace { reason: &'static str },
    #[error("state explosion: {explored} configurations exceed the cap")]
    StateExplosion { explored: u64 },
}
