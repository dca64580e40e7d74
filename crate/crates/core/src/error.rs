use thiserror::Error;

use crate::circuit::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid evaluation context: omega = {omega}, epsilon = {epsilon}")]
    InvalidContext { omega: f64, epsilon: f64 },

    #[error("network is disconnected")]
    Disconnected,

    #[error("self-loop edge at node {0}")]
    SelfLoop(NodeId),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("boundary node {0} listed more than once")]
    DuplicateBoundary(NodeId),

    #[error("node {0} is declared more than once")]
    DuplicateNode(NodeId),

    #[error("element has zero impedance at this frequency; merge its endpoints instead")]
    ZeroImpedance,

    /// A sum of impedances or admittances vanished (to relative tolerance).
    #[error("resonance in {0}")]
    Resonance(&'static str),

    #[error("terminals are open-circuited (vanishing transfer admittance)")]
    Open,

    #[error("interior node {0} cannot be eliminated: it is a boundary node")]
    BoundaryElimination(NodeId),

    #[error("parameter is singular: {0}")]
    SingularParameter(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fixed-point iteration failed: {0}")]
    Iteration(String),
}
