//! Strategic (normal-form) games and their FD abstraction.
//!
//! A profile is a vector of strategy indices, one per player. Profiles are
//! enumerated in mixed-radix order with the first player most significant,
//! so a 2×2 game lists `Q,Q  Q,F  F,Q  F,F`.

use std::sync::Arc;

pub use num_rational::Rational64;
use thiserror::Error;

use crate::game::{FdGame, GameError};
use crate::graph::{NameTable, NodeId, Relation};

pub type Profile = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error("malformed game: {0}")]
    MalformedGame(String),
    #[error("no payoff for profile {0}")]
    MissingProfile(String),
    #[error("profile {profile}: expected {expected} values, got {got}")]
    ArityMismatch {
        profile: String,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Game(#[from] GameError),
}

fn valid_strategy_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '(' | ')'))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormGame {
    players: NameTable,
    strategies: Vec<NameTable>,
    payoffs: Vec<Vec<Rational64>>,
}

impl NormalFormGame {
    /// Builds a game from a payoff function over strategy-index profiles.
    pub fn from_fn<F>(
        players: Vec<String>,
        strategies: Vec<Vec<String>>,
        mut payoff: F,
    ) -> Result<Self, NormalFormError>
    where
        F: FnMut(&[usize]) -> Vec<Rational64>,
    {
        let mut game = Self::skeleton(players, strategies)?;
        let n = game.players.len();
        for idx in 0..game.profile_count() {
            let profile = game.profile(idx);
            let values = payoff(&profile);
            if values.len() != n {
                return Err(NormalFormError::ArityMismatch {
                    profile: game.profile_name(&profile),
                    expected: n,
                    got: values.len(),
                });
            }
            game.payoffs.push(values);
        }
        Ok(game)
    }

    /// Builds a game from `(strategy names, payoffs)` rows. Every profile
    /// must appear exactly once.
    pub fn from_rows(
        players: Vec<String>,
        strategies: Vec<Vec<String>>,
        rows: Vec<(Vec<String>, Vec<Rational64>)>,
    ) -> Result<Self, NormalFormError> {
        let mut game = Self::skeleton(players, strategies)?;
        let n = game.players.len();
        let mut slots: Vec<Option<Vec<Rational64>>> = vec![None; game.profile_count()];
        for (names, values) in rows {
            let joined = names.join(",");
            if names.len() != n || values.len() != n {
                return Err(NormalFormError::ArityMismatch {
                    profile: joined,
                    expected: n,
                    got: if names.len() != n { names.len() } else { values.len() },
                });
            }
            let profile = names
                .iter()
                .zip(&game.strategies)
                .map(|(s, table)| {
                    table
                        .lookup(s)
                        .map(NodeId::index)
                        .ok_or_else(|| NormalFormError::MalformedGame(format!("unknown strategy `{s}` in {joined}")))
                })
                .collect::<Result<Profile, _>>()?;
            let slot = &mut slots[game.profile_index(&profile)];
            if slot.is_some() {
                return Err(NormalFormError::MalformedGame(format!("profile {joined} given twice")));
            }
            *slot = Some(values);
        }
        for (idx, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(v) => game.payoffs.push(v),
                None => return Err(NormalFormError::MissingProfile(game.profile_name(&game.profile(idx)))),
            }
        }
        Ok(game)
    }

    fn skeleton(players: Vec<String>, strategies: Vec<Vec<String>>) -> Result<Self, NormalFormError> {
        let malformed = |m: String| NormalFormError::MalformedGame(m);
        let players = NameTable::new(players).map_err(|e| malformed(format!("players: {e}")))?;
        if strategies.len() != players.len() {
            return Err(malformed(format!(
                "{} players but {} strategy sets",
                players.len(),
                strategies.len()
            )));
        }
        let strategies = strategies
            .into_iter()
            .zip(players.names())
            .map(|(set, p)| {
                if let Some(bad) = set.iter().find(|s| !valid_strategy_name(s)) {
                    return Err(malformed(format!("invalid strategy name `{bad}` for {p}")));
                }
                NameTable::new(set).map_err(|e| malformed(format!("strategies of {p}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NormalFormGame {
            players,
            strategies,
            payoffs: Vec::new(),
        })
    }

    pub fn players(&self) -> &NameTable {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn strategies(&self, player: usize) -> &NameTable {
        &self.strategies[player]
    }

    pub fn profile_count(&self) -> usize {
        self.strategies.iter().map(NameTable::len).product()
    }

    /// Profile at position `idx` in enumeration order.
    pub fn profile(&self, mut idx: usize) -> Profile {
        let mut p = vec![0; self.strategies.len()];
        for (slot, table) in p.iter_mut().zip(&self.strategies).rev() {
            *slot = idx % table.len();
            idx /= table.len();
        }
        p
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strategies)
            .fold(0, |acc, (&s, table)| acc * table.len() + s)
    }

    /// Strategy names joined by `,` in player order, e.g. `F,Q`.
    pub fn profile_name(&self, profile: &[usize]) -> String {
        profile
            .iter()
            .zip(&self.strategies)
            .map(|(&s, table)| table.name(NodeId::new(s)))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn payoff(&self, profile: &[usize], player: usize) -> Rational64 {
        self.payoffs[self.profile_index(profile)][player]
    }

    pub fn payoffs(&self, profile: &[usize]) -> &[Rational64] {
        &self.payoffs[self.profile_index(profile)]
    }
}

/// Abstracts a strategic game as an FD game.
///
/// Situations are the profiles. A player may move between two distinct
/// profiles that differ only in that player's strategy, and desires every
/// profile (feasible or not) that pays it strictly more.
pub fn to_fd_game(nf: &NormalFormGame) -> Result<FdGame, NormalFormError> {
    let count = nf.profile_count();
    let profiles: Vec<Profile> = (0..count).map(|i| nf.profile(i)).collect();
    let situations = Arc::new(
        NameTable::new(profiles.iter().map(|p| nf.profile_name(p)))
            .map_err(|e| NormalFormError::MalformedGame(e.to_string()))?,
    );
    let mut feasibility = Vec::with_capacity(nf.player_count());
    let mut desirability = Vec::with_capacity(nf.player_count());
    for player in 0..nf.player_count() {
        let mut feas = Relation::empty(Arc::clone(&situations));
        let mut des = Relation::empty(Arc::clone(&situations));
        for (i, p) in profiles.iter().enumerate() {
            for (j, q) in profiles.iter().enumerate() {
                if i == j {
                    continue;
                }
                let unilateral = p.iter().zip(q).enumerate().all(|(k, (a, b))| k == player || a == b);
                let (s, t) = (NodeId::new(i), NodeId::new(j));
                if unilateral {
                    feas.insert(s, t).expect("profile ids in range");
                }
                if nf.payoffs[j][player] > nf.payoffs[i][player] {
                    des.insert(s, t).expect("profile ids in range");
                }
            }
        }
        feasibility.push(feas);
        desirability.push(des);
    }
    Ok(FdGame::new(nf.players.clone(), situations, feasibility, desirability)?)
}

/// Pure Nash equilibria by direct scan of unilateral deviations, in
/// enumeration order.
pub fn pure_nash_oracle(nf: &NormalFormGame) -> Vec<Profile> {
    (0..nf.profile_count())
        .map(|i| nf.profile(i))
        .filter(|p| {
            (0..nf.player_count()).all(|player| {
                let current = nf.payoff(p, player);
                (0..nf.strategies(player).len()).all(|alt| {
                    let mut q = p.clone();
                    q[player] = alt;
                    nf.payoff(&q, player) <= current
                })
            })
        })
        .collect()
}
