//! The line-oriented `.fdg` game format.
//!
//! ```text
//! # prisoner's dilemma, row player only
//! situations QQ QF FQ FF
//! agent row
//! feasible QQ <-> FQ
//! desire QQ -> FQ
//! ```
//!
//! `situations` must come once, before any arc. `feasible` and `desire`
//! lines belong to the most recent `agent`. `<->` stands for both
//! directions. Names match `[A-Za-z0-9_,()]+`; `#` starts a comment.

use std::fmt::Write as _;

use thiserror::Error;

use fdgame::game::{validate, AgentSpec, Diagnostic, FdGame, GameSpec};
use fdgame::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FdgError {
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("{line}:{col}: unknown situation `{name}`")]
    UnknownSituation { line: usize, col: usize, name: String },
    #[error("{line}:1: arc before any `agent` line")]
    ArcBeforeAgent { line: usize },
    #[error("{line}:1: second `situations` line")]
    DuplicateSituationsLine { line: usize },
    #[error("invalid game: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    Feasible,
    Desire,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcDecl {
    pub kind: ArcKind,
    pub from: String,
    pub to: String,
    pub both_ways: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentDecl {
    pub name: String,
    pub span: Span,
    pub arcs: Vec<ArcDecl>,
}

/// Parsed `.fdg` text with source positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FdgDocument {
    pub situations: Vec<(String, Span)>,
    pub agents: Vec<AgentDecl>,
}

pub(crate) fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | ',' | '(' | ')'))
}

/// Whitespace-separated tokens with 1-based columns, comment stripped.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices().chain([(code.len(), ' ')]) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((code[..s].chars().count() + 1, &code[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    out
}

impl FdgDocument {
    pub fn parse(text: &str) -> Result<Self, FdgError> {
        let mut doc = FdgDocument::default();
        let mut situations_line = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let toks = tokens(raw);
            let Some(&(kw_col, keyword)) = toks.first() else {
                continue;
            };
            let perr = |col: usize, message: String| FdgError::Parse { line, col, message };
            let name_at = |(col, tok): (usize, &str)| -> Result<String, FdgError> {
                if valid_name(tok) {
                    Ok(tok.to_owned())
                } else {
                    Err(perr(col, format!("invalid name `{tok}`")))
                }
            };
            match keyword {
                "situations" => {
                    if situations_line.is_some() {
                        return Err(FdgError::DuplicateSituationsLine { line });
                    }
                    situations_line = Some(line);
                    if toks.len() < 2 {
                        return Err(perr(kw_col, "`situations` needs at least one name".into()));
                    }
                    for &tok in &toks[1..] {
                        doc.situations.push((name_at(tok)?, Span { line, col: tok.0 }));
                    }
                }
                "agent" => {
                    if toks.len() != 2 {
                        return Err(perr(kw_col, "expected `agent <name>`".into()));
                    }
                    doc.agents.push(AgentDecl {
                        name: name_at(toks[1])?,
                        span: Span { line, col: toks[1].0 },
                        arcs: Vec::new(),
                    });
                }
                "feasible" | "desire" => {
                    if toks.len() != 4 {
                        return Err(perr(kw_col, format!("expected `{keyword} <name> -> <name>`")));
                    }
                    let both_ways = match toks[2].1 {
                        "->" => false,
                        "<->" => true,
                        other => return Err(perr(toks[2].0, format!("expected `->` or `<->`, found `{other}`"))),
                    };
                    if situations_line.is_none() {
                        return Err(perr(kw_col, "arcs must follow the `situations` line".into()));
                    }
                    let from = name_at(toks[1])?;
                    let to = name_at(toks[3])?;
                    for (tok, name) in [(toks[1], &from), (toks[3], &to)] {
                        if !doc.situations.iter().any(|(s, _)| s == name) {
                            return Err(FdgError::UnknownSituation {
                                line,
                                col: tok.0,
                                name: name.clone(),
                            });
                        }
                    }
                    let agent = doc.agents.last_mut().ok_or(FdgError::ArcBeforeAgent { line })?;
                    agent.arcs.push(ArcDecl {
                        kind: if keyword == "feasible" {
                            ArcKind::Feasible
                        } else {
                            ArcKind::Desire
                        },
                        from,
                        to,
                        both_ways,
                        span: Span { line, col: kw_col },
                    });
                }
                other => return Err(perr(kw_col, format!("unknown keyword `{other}`"))),
            }
        }
        Ok(doc)
    }

    pub fn to_spec(&self) -> GameSpec {
        let mut spec = GameSpec::new(self.situations.iter().map(|(s, _)| s.clone()));
        for decl in &self.agents {
            let mut agent = AgentSpec::new(decl.name.clone());
            for arc in &decl.arcs {
                let list = match arc.kind {
                    ArcKind::Feasible => &mut agent.feasible,
                    ArcKind::Desire => &mut agent.desire,
                };
                list.push((arc.from.clone(), arc.to.clone()));
                if arc.both_ways {
                    list.push((arc.to.clone(), arc.from.clone()));
                }
            }
            spec.agents.push(agent);
        }
        spec
    }

    pub fn to_game(&self) -> Result<FdGame, FdgError> {
        let spec = self.to_spec();
        let diags = validate(&spec);
        if !diags.is_empty() {
            return Err(FdgError::Invalid(diags));
        }
        Ok(spec.build().expect("validated game builds"))
    }
}

pub fn parse_fdg(text: &str) -> Result<FdGame, FdgError> {
    FdgDocument::parse(text)?.to_game()
}

/// Writes `rel` as arc lines under `keyword`, folding symmetric pairs into
/// `<->`.
pub fn write_arcs(out: &mut String, keyword: &str, rel: &Relation) {
    for (s, t) in rel.arcs() {
        let back = s != t && rel.contains(t, s);
        if back && s > t {
            continue;
        }
        let arrow = if back { "<->" } else { "->" };
        let names = rel.universe();
        writeln!(out, "{keyword} {} {arrow} {}", names.name(s), names.name(t)).unwrap();
    }
}

/// Serializes a game; [`parse_fdg`] of the result equals `game`.
pub fn serialize_fdg(game: &FdGame) -> String {
    let mut out = String::new();
    writeln!(out, "situations {}", game.situations().names().join(" ")).unwrap();
    for a in game.agent_ids() {
        writeln!(out, "agent {}", game.agent_name(a)).unwrap();
        write_arcs(&mut out, "feasible", game.feasibility(a).unwrap());
        write_arcs(&mut out, "desire", game.desirability(a).unwrap());
    }
    out
}
