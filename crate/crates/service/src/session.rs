//! Interactive fair-division sessions. A session is its parameters plus the
//! transcript of answers; every other piece of state is recomputed from the
//! transcript with `lazy_step`, so reloading a stored session always lands in
//! the same place.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use topofair::fairdiv::{lazy_step, Answer, CakeMode, FairOutcome, LazyKind, LazyProblem, LazyStep, Query};
use topofair::rational::{frac, zero, Rational};

use crate::error::ApiError;

/// Body of `POST /sessions`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionParams {
    /// `cake` or `rent`.
    pub kind: String,
    /// Cake only: `envyfree`, `survivor` or `secretive`. Defaults to `envyfree`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<CakeMode>,
    pub players: usize,
    /// Secretive cake: number of players answering queries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Survivor cake: number of pieces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, with = "topofair::rational::serde_opt", skip_serializing_if = "Option::is_none")]
    pub rent: Option<Rational>,
    #[serde(default = "default_epsilon", with = "topofair::rational::serde_q")]
    pub epsilon: Rational,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_epsilon() -> Rational {
    frac(1, 1_000_000)
}

fn default_resolution() -> usize {
    8
}

/// Interactive grids above this size would ask thousands of questions.
pub const MAX_RESOLUTION: usize = 64;

impl SessionParams {
    /// Checks the parameters and builds the lazy problem they describe.
    pub fn problem(&self) -> Result<LazyProblem, ApiError> {
        let bad = |field: &str, msg: String| ApiError::invalid_params(field, msg);
        if self.players == 0 {
            return Err(bad("players", "players must be at least 1".into()));
        }
        if self.epsilon <= zero() {
            return Err(bad("epsilon", "epsilon must be positive".into()));
        }
        if self.resolution == 0 || self.resolution > MAX_RESOLUTION {
            return Err(bad("resolution", format!("resolution must lie in 1..={MAX_RESOLUTION}")));
        }
        let k = self.players;
        let in_range = |field: &str, v: Option<usize>| match v {
            Some(x) if (1..=k).contains(&x) => Ok(x),
            Some(x) => Err(bad(field, format!("{field} = {x} must lie in 1..={k}"))),
            None => Err(bad(field, format!("{field} is required for this mode"))),
        };
        let kind = match self.kind.as_str() {
            "cake" => {
                if self.rent.is_some() {
                    return Err(bad("rent", "rent applies to rent sessions only".into()));
                }
                let mode = self.mode.unwrap_or(CakeMode::EnvyFree);
                let param = match mode {
                    CakeMode::EnvyFree => {
                        if self.p.is_some() || self.q.is_some() {
                            return Err(bad("mode", "p and q need the secretive or survivor mode".into()));
                        }
                        k
                    }
                    CakeMode::Secretive => in_range("p", self.p)?,
                    CakeMode::Survivor => in_range("q", self.q)?,
                };
                LazyKind::Cake { mode, param }
            }
            "rent" => {
                if self.mode.is_some() || self.p.is_some() || self.q.is_some() {
                    return Err(bad("mode", "rent sessions take no mode, p or q".into()));
                }
                if k < 2 {
                    return Err(bad("players", "rent sessions need at least 2 roommates".into()));
                }
                match &self.rent {
                    Some(r) if *r > zero() => LazyKind::Rent { rent: r.clone() },
                    Some(_) => return Err(bad("rent", "rent must be positive".into())),
                    None => return Err(bad("rent", "rent is required".into())),
                }
            }
            other => return Err(bad("kind", format!("unknown kind {other:?}; expected cake or rent"))),
        };
        let problem = LazyProblem { kind, players: k, resolution: self.resolution };
        problem.active_players().map_err(|e| bad("players", e.to_string()))?;
        Ok(problem)
    }
}

/// Body of `POST /sessions/{id}/answer`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerBody {
    /// Index of the query being answered, as served by `GET /query`.
    pub query_id: usize,
    pub player: usize,
    pub piece: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub query: Query,
    pub answer: AnswerBody,
    pub timestamp_ms: u64,
}

/// Derived state; never trusted from disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum State {
    AwaitingAnswer {
        query_id: usize,
        player: usize,
        vertex: usize,
        /// Piece lengths (cake) or room prices (rent).
        #[serde(with = "topofair::rational::serde_vec")]
        offer: Vec<Rational>,
        allowed: Vec<usize>,
    },
    Done {
        outcome: FairOutcome,
    },
    Failed {
        reason: String,
    },
}

/// The stored document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub created_ms: u64,
    pub params: SessionParams,
    pub problem: LazyProblem,
    pub transcript: Vec<Entry>,
    /// Snapshot written alongside the transcript for readers of the store;
    /// recomputed on load.
    pub state: Option<State>,
}

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

fn to_state(step: topofair::Result<LazyStep>, query_id: usize) -> State {
    match step {
        Ok(LazyStep::Query(q)) => State::AwaitingAnswer {
            query_id,
            player: q.player,
            vertex: q.vertex,
            offer: q.offer,
            allowed: q.allowed,
        },
        Ok(LazyStep::Done(outcome)) => State::Done { outcome },
        Err(e) => State::Failed { reason: e.to_string() },
    }
}

impl Session {
    pub fn new(id: String, params: SessionParams) -> Result<Self, ApiError> {
        let problem = params.problem()?;
        Ok(Session { id, created_ms: now_ms(), params, problem, transcript: Vec::new(), state: None })
    }

    pub fn answers(&self) -> Vec<Answer> {
        self.transcript
            .iter()
            .map(|e| Answer { player: e.answer.player, vertex: e.query.vertex, choice: e.answer.piece })
            .collect()
    }

    /// Current state from the transcript alone.
    pub fn compute_state(&self) -> State {
        to_state(lazy_step(&self.problem, &self.answers()), self.transcript.len())
    }

    /// Current state, computed once and cached.
    pub fn state(&mut self) -> &State {
        if self.state.is_none() {
            self.state = Some(self.compute_state());
        }
        self.state.as_ref().unwrap()
    }

    /// Replays the transcript from scratch, checking that every recorded
    /// query is the one the solver asks at that point, and resets the cached
    /// state.
    pub fn replay(&mut self) -> State {
        let answers = self.answers();
        for (t, e) in self.transcript.iter().enumerate() {
            match lazy_step(&self.problem, &answers[..t]) {
                Ok(LazyStep::Query(q)) if q == e.query => {}
                _ => {
                    let reason = format!("transcript entry {t} does not replay");
                    self.state = Some(State::Failed { reason });
                    return self.state.clone().unwrap();
                }
            }
        }
        self.state = Some(self.compute_state());
        self.state.clone().unwrap()
    }

    /// Applies an answer. Returns `Ok(false)` for a repeated answer that is
    /// already in the transcript.
    pub fn answer(&mut self, a: AnswerBody) -> Result<bool, ApiError> {
        let len = self.transcript.len();
        if a.query_id < len {
            let prev = &self.transcript[a.query_id].answer;
            if prev.player == a.player && prev.piece == a.piece {
                return Ok(false);
            }
            return Err(ApiError::stale_query(a.query_id, len));
        }
        if a.query_id > len {
            return Err(ApiError::stale_query(a.query_id, len));
        }
        let query = match self.state().clone() {
            State::AwaitingAnswer { player, vertex, offer, allowed, .. } => {
                if a.player != player {
                    return Err(ApiError::wrong_player(player, a.player));
                }
                if !allowed.contains(&a.piece) {
                    return Err(ApiError::disallowed_piece(a.piece, &allowed));
                }
                Query { player, vertex, offer, allowed }
            }
            State::Done { .. } | State::Failed { .. } => return Err(ApiError::finished()),
        };
        self.transcript.push(Entry { query, answer: a, timestamp_ms: now_ms() });
        self.state = Some(self.compute_state());
        Ok(true)
    }

    /// Undoes the last answer; used when it could not be persisted.
    pub fn rollback(&mut self) {
        self.transcript.pop();
        self.state = None;
    }
}
