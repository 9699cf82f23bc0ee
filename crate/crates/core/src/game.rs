//! FD games: agents, situations, per-agent feasibility and desirability,
//! and the equilibria of the feasible-and-more-desirable-choice (FMDC)
//! relation.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{self, GraphError, NameTable, NodeId, ReducedGraph, Relation, SccPartition};
use crate::nodeset::NodeSet;

/// Dense index of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(usize);

impl AgentId {
    pub fn new(index: usize) -> Self {
        AgentId(index)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// Problems found in a [`GameSpec`] before it becomes an [`FdGame`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    NoSituations,
    DuplicateSituation(String),
    NoAgents,
    DuplicateAgent(String),
    UnknownSituation(String),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoSituations => write!(f, "no situations declared"),
            Diagnostic::DuplicateSituation(s) => write!(f, "situation `{s}` declared twice"),
            Diagnostic::NoAgents => write!(f, "no agents declared"),
            Diagnostic::DuplicateAgent(a) => write!(f, "agent `{a}` declared twice"),
            Diagnostic::UnknownSituation(s) => write!(f, "arc references undeclared situation `{s}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("unknown agent {0}")]
    UnknownAgent(usize),
    #[error("relations do not share the game's situations, or an agent lacks one")]
    UniverseMismatch,
    #[error("malformed game: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One agent's arcs, by situation name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgentSpec {
    pub name: String,
    pub feasible: Vec<(String, String)>,
    pub desire: Vec<(String, String)>,
}

impl AgentSpec {
    pub fn new(name: impl Into<String>) -> Self {
        AgentSpec {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn feasible(mut self, from: &str, to: &str) -> Self {
        self.feasible.push((from.into(), to.into()));
        self
    }

    pub fn desire(mut self, from: &str, to: &str) -> Self {
        self.desire.push((from.into(), to.into()));
        self
    }
}

/// Unchecked, name-based description of an FD game.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GameSpec {
    pub situations: Vec<String>,
    pub agents: Vec<AgentSpec>,
}

impl GameSpec {
    pub fn new<I, S>(situations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        GameSpec {
            situations: situations.into_iter().map(Into::into).collect(),
            agents: Vec::new(),
        }
    }

    pub fn agent(mut self, agent: AgentSpec) -> Self {
        self.agents.push(agent);
        self
    }

    pub fn build(&self) -> Result<FdGame, GameError> {
        let diags = validate(self);
        if !diags.is_empty() {
            return Err(GameError::Invalid(diags));
        }
        let situations = Arc::new(NameTable::new(self.situations.iter().cloned())?);
        let agents = NameTable::new(self.agents.iter().map(|a| a.name.clone()))?;
        let relation = |arcs: &[(String, String)]| -> Result<Relation, GameError> {
            let pairs = arcs
                .iter()
                .map(|(s, t)| Ok((situations.id(s)?, situations.id(t)?)))
                .collect::<Result<Vec<_>, GraphError>>()?;
            Ok(Relation::from_arcs(Arc::clone(&situations), pairs)?)
        };
        let feasibility = self
            .agents
            .iter()
            .map(|a| relation(&a.feasible))
            .collect::<Result<_, _>>()?;
        let desirability = self
            .agents
            .iter()
            .map(|a| relation(&a.desire))
            .collect::<Result<_, _>>()?;
        FdGame::new(agents, situations, feasibility, desirability)
    }
}

/// Diagnostics for a game description: undeclared situations in arcs,
/// duplicate names, missing agents or situations.
pub fn validate(spec: &GameSpec) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if spec.situations.is_empty() {
        diags.push(Diagnostic::NoSituations);
    }
    let mut seen = HashSet::new();
    for s in &spec.situations {
        if !seen.insert(s.as_str()) {
            diags.push(Diagnostic::DuplicateSituation(s.clone()));
        }
    }
    if spec.agents.is_empty() {
        diags.push(Diagnostic::NoAgents);
    }
    let mut agents = HashSet::new();
    let mut unknown = HashSet::new();
    for a in &spec.agents {
        if !agents.insert(a.name.as_str()) {
            diags.push(Diagnostic::DuplicateAgent(a.name.clone()));
        }
        for (s, t) in a.feasible.iter().chain(&a.desire) {
            for name in [s, t] {
                if !seen.contains(name.as_str()) && unknown.insert(name.as_str()) {
                    diags.push(Diagnostic::UnknownSituation(name.clone()));
                }
            }
        }
    }
    diags
}

/// An FD game: agents, situations and, for every agent, a feasibility and
/// a desirability relation over the shared situation universe.
///
/// Desirability is taken exactly as declared: no reflexive or transitive
/// completion is applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdGame {
    agents: NameTable,
    situations: Arc<NameTable>,
    feasibility: Vec<Relation>,
    desirability: Vec<Relation>,
}

impl FdGame {
    pub fn new(
        agents: NameTable,
        situations: Arc<NameTable>,
        feasibility: Vec<Relation>,
        desirability: Vec<Relation>,
    ) -> Result<Self, GameError> {
        let shared = |r: &Relation| **r.universe() == *situations;
        if feasibility.len() != agents.len()
            || desirability.len() != agents.len()
            || !feasibility.iter().chain(&desirability).all(shared)
        {
            return Err(GameError::UniverseMismatch);
        }
        Ok(FdGame {
            agents,
            situations,
            feasibility,
            desirability,
        })
    }

    pub fn agents(&self) -> &NameTable {
        &self.agents
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.len()).map(AgentId)
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        self.agents.name(NodeId::new(a.0))
    }

    pub fn agent(&self, name: &str) -> Option<AgentId> {
        self.agents.lookup(name).map(|id| AgentId(id.index()))
    }

    pub fn situations(&self) -> &Arc<NameTable> {
        &self.situations
    }

    pub fn situation(&self, name: &str) -> Result<NodeId, GraphError> {
        self.situations.id(name)
    }

    pub fn feasibility(&self, a: AgentId) -> Result<&Relation, GameError> {
        self.feasibility.get(a.0).ok_or(GameError::UnknownAgent(a.0))
    }

    pub fn desirability(&self, a: AgentId) -> Result<&Relation, GameError> {
        self.desirability.get(a.0).ok_or(GameError::UnknownAgent(a.0))
    }

    /// Name-based description of this game; `build` on it is the identity.
    pub fn to_spec(&self) -> GameSpec {
        let named = |r: &Relation| r.named_arcs().map(|(s, t)| (s.to_owned(), t.to_owned())).collect();
        GameSpec {
            situations: self.situations.names().to_vec(),
            agents: self
                .agent_ids()
                .map(|a| AgentSpec {
                    name: self.agent_name(a).to_owned(),
                    feasible: named(&self.feasibility[a.0]),
                    desire: named(&self.desirability[a.0]),
                })
                .collect(),
        }
    }
}

/// Agent `a`'s feasible and more desirable moves: feasibility ∩ desirability.
pub fn fmdc_agent(game: &FdGame, a: AgentId) -> Result<Relation, GameError> {
    Ok(game.feasibility(a)?.intersection(game.desirability(a)?))
}

/// Union over all agents of [`fmdc_agent`].
pub fn fmdc(game: &FdGame) -> Relation {
    game.agent_ids()
        .map(|a| fmdc_agent(game, a).expect("agent ids are in range"))
        .fold(Relation::empty(Arc::clone(game.situations())), |acc, r| acc.union(&r))
}

/// Situations from which no agent has a feasible, strictly more desirable
/// move to a different situation, checked directly against every agent's
/// feasibility and desirability without building the FMDC relation.
pub fn abstract_nash_direct(game: &FdGame) -> NodeSet {
    game.situations()
        .ids()
        .filter(|&s| {
            game.agent_ids().all(|a| {
                let feas = &game.feasibility[a.0];
                let des = &game.desirability[a.0];
                feas.successors(s).iter().all(|&t| t == s || !des.contains(s, t))
            })
        })
        .collect()
}

/// Abstract Nash equilibria: the sinks of the FMDC relation.
pub fn abstract_nash(game: &FdGame) -> NodeSet {
    let eq = graph::sinks(&fmdc(game));
    debug_assert_eq!(eq, abstract_nash_direct(game));
    eq
}

/// Terminal components of a condensation, ordered by smallest member.
pub fn terminal_components(part: &SccPartition, reduced: &ReducedGraph) -> Vec<NodeSet> {
    debug_assert_eq!(reduced.graph().len(), part.len());
    let mut eq: Vec<NodeSet> = reduced
        .sink_components()
        .into_iter()
        .map(|c| part.component(c).clone())
        .collect();
    eq.sort_by_key(|c| c.first());
    eq
}

/// FD equilibria: terminal components of the FMDC relation's condensation.
pub fn fd_equilibria(game: &FdGame) -> Vec<NodeSet> {
    analyze(game).fd_equilibria
}

/// Everything the equilibrium analysis of one game produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumReport {
    pub abstract_nash: NodeSet,
    pub fd_equilibria: Vec<NodeSet>,
    pub fmdc: Relation,
    pub partition: SccPartition,
    pub reduced: ReducedGraph,
}

impl EquilibriumReport {
    pub fn situations(&self) -> &Arc<NameTable> {
        self.fmdc.universe()
    }
}

pub fn analyze(game: &FdGame) -> EquilibriumReport {
    let fmdc = fmdc(game);
    let partition = graph::scc(&fmdc);
    let reduced = graph::condense(&fmdc, &partition).expect("partition built from this relation");
    let fd_equilibria = terminal_components(&partition, &reduced);
    let abstract_nash = graph::sinks(&fmdc);
    debug_assert_eq!(abstract_nash, abstract_nash_direct(game));
    EquilibriumReport {
        abstract_nash,
        fd_equilibria,
        fmdc,
        partition,
        reduced,
    }
}
