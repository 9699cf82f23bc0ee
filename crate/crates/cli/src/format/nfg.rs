//! The `.nfg` payoff-matrix format.
//!
//! ```text
//! players row col
//! strategies row Q F
//! strategies col Q F
//! payoff Q,Q = 2 2
//! payoff Q,F = 0 3
//! payoff F,Q = 3 0
//! payoff F,F = 1 1
//! ```
//!
//! Every profile needs exactly one `payoff` line with one integer per
//! player, in player order.

use fdgame::normal_form::{NormalFormError, NormalFormGame, Rational64};
use thiserror::Error;

use super::fdg::tokens;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NfgError {
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("no payoff line for profile {0}")]
    MissingProfile(String),
    #[error("{line}: profile {profile}: expected {expected} entries, got {got}")]
    ArityMismatch {
        line: usize,
        profile: String,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Game(#[from] NormalFormError),
}

struct PayoffLine {
    line: usize,
    profile: (usize, String),
    values: Vec<Rational64>,
}

pub fn parse_nfg(text: &str) -> Result<NormalFormGame, NfgError> {
    let mut players: Option<Vec<String>> = None;
    let mut strategies: Vec<Option<Vec<String>>> = Vec::new();
    let mut payoffs: Vec<PayoffLine> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some(&(kw_col, keyword)) = toks.first() else {
            continue;
        };
        let perr = |col: usize, message: String| NfgError::Parse { line, col, message };
        match keyword {
            "players" => {
                if players.is_some() {
                    return Err(perr(kw_col, "second `players` line".into()));
                }
                if toks.len() < 2 {
                    return Err(perr(kw_col, "`players` needs at least one name".into()));
                }
                let names: Vec<String> = toks[1..].iter().map(|t| t.1.to_owned()).collect();
                strategies = vec![None; names.len()];
                players = Some(names);
            }
            "strategies" => {
                let names = players
                    .as_ref()
                    .ok_or_else(|| perr(kw_col, "`strategies` before `players`".into()))?;
                if toks.len() < 3 {
                    return Err(perr(kw_col, "expected `strategies <player> <name>+`".into()));
                }
                let (pcol, player) = toks[1];
                let p = names
                    .iter()
                    .position(|n| n == player)
                    .ok_or_else(|| perr(pcol, format!("unknown player `{player}`")))?;
                if strategies[p].is_some() {
                    return Err(perr(pcol, format!("strategies for `{player}` given twice")));
                }
                strategies[p] = Some(toks[2..].iter().map(|t| t.1.to_owned()).collect());
            }
            "payoff" => {
                if toks.len() < 4 || toks[2].1 != "=" {
                    return Err(perr(kw_col, "expected `payoff <strat>,... = <int>...`".into()));
                }
                let values = toks[3..]
                    .iter()
                    .map(|&(col, t)| {
                        t.parse::<i64>()
                            .map(Rational64::from_integer)
                            .map_err(|_| perr(col, format!("expected an integer, found `{t}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                payoffs.push(PayoffLine {
                    line,
                    profile: (toks[1].0, toks[1].1.to_owned()),
                    values,
                });
            }
            other => return Err(perr(kw_col, format!("unknown keyword `{other}`"))),
        }
    }

    let players = players.ok_or(NfgError::Parse {
        line: 1,
        col: 1,
        message: "missing `players` line".into(),
    })?;
    let strategies = strategies
        .into_iter()
        .zip(&players)
        .map(|(s, p)| {
            s.ok_or_else(|| NfgError::Parse {
                line: 1,
                col: 1,
                message: format!("missing `strategies {p}` line"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let n = players.len();
    let mut seen = std::collections::HashSet::new();
    let mut rows = Vec::with_capacity(payoffs.len());
    for pl in payoffs {
        let (col, name) = pl.profile;
        let parts: Vec<String> = name.split(',').map(str::to_owned).collect();
        for got in [parts.len(), pl.values.len()] {
            if got != n {
                return Err(NfgError::ArityMismatch {
                    line: pl.line,
                    profile: name,
                    expected: n,
                    got,
                });
            }
        }
        for (part, set) in parts.iter().zip(&strategies) {
            if !set.contains(part) {
                return Err(NfgError::Parse {
                    line: pl.line,
                    col,
                    message: format!("unknown strategy `{part}` in profile {name}"),
                });
            }
        }
        if !seen.insert(name.clone()) {
            return Err(NfgError::Parse {
                line: pl.line,
                col,
                message: format!("profile {name} given twice"),
            });
        }
        rows.push((parts, pl.values));
    }
    NormalFormGame::from_rows(players, strategies, rows).map_err(|e| match e {
        NormalFormError::MissingProfile(p) => NfgError::MissingProfile(p),
        other => NfgError::Game(other),
    })
}
