use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad caller input: malformed parameters, labelings outside their range,
    /// improper colorings and the like.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A guarantee that should hold by construction did not, e.g. no
    /// covering simplex exists. Points at a broken triangulation or labeling.
    #[error("structural error: {0}")]
    Structural(String),
    /// The solver needs an answer that is not available yet (interactive
    /// preference sources).
    #[error("pending query for player {player} at vertex {vertex}")]
    Pending { player: usize, vertex: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}
