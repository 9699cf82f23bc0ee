//! Evolution along the FMDC relation: random walks that follow feasible and
//! more desirable moves until they reach an abstract Nash equilibrium or a
//! multi-situation FD equilibrium they can never leave.
//!
//! Randomness is ChaCha8 seeded with [`rng_from_seed`]. Trial `i` of a batch
//! with base seed `b` uses seed [`derive_seed`]`(b, i)`, a SplitMix64
//! finalizer applied to `b + (i + 1) * 0x9E3779B97F4A7C15`. Out-neighbours
//! are drawn uniformly with `random_range` over the ascending neighbour list.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{self, AgentSpec, FdGame, GameSpec};
use crate::graph::{self, NameTable, NodeId};
use crate::nodeset::NodeSet;
use crate::par::{map_range, Exec};

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvolutionError {
    #[error("unknown situation `{0}`")]
    UnknownSituation(String),
    #[error("max_steps must be at least 1")]
    ZeroBudget,
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("game is not a three-situation line: {0}")]
    ShapeMismatch(String),
    #[error("unknown tactic `{0}`")]
    UnknownTactic(String),
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of trial `index` in a batch started from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Step budget used when none is given: `|S|²`.
pub fn default_budget(situations: usize) -> usize {
    (situations * situations).max(1)
}

/// The four tactics of the two-token "blink and you lose" game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tactic {
    Foresight,
    Hindsight,
    Omnisight,
    Defeatism,
}

impl Tactic {
    pub const ALL: [Tactic; 4] = [
        Tactic::Foresight,
        Tactic::Hindsight,
        Tactic::Omnisight,
        Tactic::Defeatism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tactic::Foresight => "foresight",
            Tactic::Hindsight => "hindsight",
            Tactic::Omnisight => "omnisight",
            Tactic::Defeatism => "defeatism",
        }
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tactic {
    type Err = EvolutionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tactic::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| EvolutionError::UnknownTactic(s.to_owned()))
    }
}

/// The blink game for one tactic, over situations `L`, `C`, `R`.
///
/// `L` means Left holds both tokens, `R` that Right does, `C` one each.
/// Right desires `L→C` and `C→R`, Left desires `R→C` and `C→L`. Under
/// defeatism Left hands a token back from `L`, so she also desires `L→C`.
pub fn blink_game(tactic: Tactic) -> FdGame {
    let mut left = AgentSpec::new("Left").desire("R", "C").desire("C", "L");
    let mut right = AgentSpec::new("Right").desire("L", "C").desire("C", "R");
    match tactic {
        Tactic::Foresight => {
            left = left.feasible("C", "L");
            right = right.feasible("C", "R");
        }
        Tactic::Hindsight => {
            left = left.feasible("R", "C");
            right = right.feasible("L", "C");
        }
        Tactic::Omnisight => {
            left = left.feasible("C", "L").feasible("R", "C");
            right = right.feasible("C", "R").feasible("L", "C");
        }
        Tactic::Defeatism => {
            left = left.feasible("L", "C").desire("L", "C");
            right = right.feasible("C", "R");
        }
    }
    GameSpec::new(["L", "C", "R"])
        .agent(left)
        .agent(right)
        .build()
        .expect("blink game is well formed")
}

/// How a trajectory ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Terminal {
    AbsorbedAtNash(NodeId),
    CyclingInFdEquilibrium(NodeSet),
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub start: NodeId,
    /// Visited situations, starting with `start`.
    pub steps: Vec<NodeId>,
    pub terminal: Terminal,
    pub seed: u64,
}

/// Outcome counts over a batch of trajectories from one start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorptionStats {
    pub start: NodeId,
    pub trials: u64,
    pub max_steps: usize,
    pub base_seed: u64,
    /// FD equilibria of the game, ordered by smallest member.
    pub equilibria: Vec<NodeSet>,
    /// `hits[i]` counts trajectories that ended in `equilibria[i]`.
    pub hits: Vec<u64>,
    pub non_absorbed: u64,
}

impl AbsorptionStats {
    pub fn frequency(&self, equilibrium: usize) -> Ratio<u64> {
        Ratio::new(self.hits[equilibrium], self.trials)
    }

    pub fn non_absorbed_frequency(&self) -> Ratio<u64> {
        Ratio::new(self.non_absorbed, self.trials)
    }
}

/// Precomputed FMDC structure of a game for repeated simulation.
#[derive(Debug, Clone)]
pub struct Dynamics {
    situations: Arc<NameTable>,
    /// Out-neighbours other than the node itself, ascending.
    moves: Vec<Vec<NodeId>>,
    /// Index into `equilibria` of each node's component, if terminal.
    equilibrium_of: Vec<Option<usize>>,
    equilibria: Vec<NodeSet>,
}

impl Dynamics {
    pub fn new(game: &FdGame) -> Self {
        let report = game::analyze(game);
        let rel = &report.fmdc;
        let moves = rel
            .universe()
            .ids()
            .map(|s| rel.successors(s).iter().copied().filter(|&t| t != s).collect())
            .collect();
        let mut equilibrium_of = vec![None; rel.len()];
        for (i, eq) in report.fd_equilibria.iter().enumerate() {
            for n in eq {
                equilibrium_of[n.index()] = Some(i);
            }
        }
        Dynamics {
            situations: Arc::clone(rel.universe()),
            moves,
            equilibrium_of,
            equilibria: report.fd_equilibria,
        }
    }

    pub fn situations(&self) -> &Arc<NameTable> {
        &self.situations
    }

    pub fn equilibria(&self) -> &[NodeSet] {
        &self.equilibria
    }

    pub fn situation(&self, name: &str) -> Result<NodeId, EvolutionError> {
        self.situations
            .lookup(name)
            .ok_or_else(|| EvolutionError::UnknownSituation(name.to_owned()))
    }

    fn check(&self, s: NodeId) -> Result<(), EvolutionError> {
        if s.index() < self.moves.len() {
            Ok(())
        } else {
            Err(EvolutionError::UnknownSituation(s.to_string()))
        }
    }

    /// Index of the FD equilibrium containing `s`, if any.
    pub fn equilibrium_of(&self, s: NodeId) -> Option<usize> {
        self.equilibrium_of[s.index()]
    }

    /// Uniformly random feasible and more desirable move from `s`; `s`
    /// itself when there is none.
    pub fn step<R: Rng + ?Sized>(&self, s: NodeId, rng: &mut R) -> NodeId {
        match self.moves[s.index()].as_slice() {
            [] => s,
            [only] => *only,
            many => many[rng.random_range(0..many.len())],
        }
    }

    fn terminal_at(&self, s: NodeId) -> Option<Terminal> {
        let eq = &self.equilibria[self.equilibrium_of[s.index()]?];
        Some(if eq.len() == 1 {
            Terminal::AbsorbedAtNash(s)
        } else {
            Terminal::CyclingInFdEquilibrium(eq.clone())
        })
    }

    pub fn trajectory(&self, start: NodeId, max_steps: usize, seed: u64) -> Result<Trajectory, EvolutionError> {
        self.check(start)?;
        if max_steps == 0 {
            return Err(EvolutionError::ZeroBudget);
        }
        let mut rng = rng_from_seed(seed);
        let mut steps = vec![start];
        let mut current = start;
        let terminal = loop {
            if let Some(t) = self.terminal_at(current) {
                break t;
            }
            if steps.len() > max_steps {
                break Terminal::BudgetExhausted;
            }
            current = self.step(current, &mut rng);
            steps.push(current);
        };
        Ok(Trajectory {
            start,
            steps,
            terminal,
            seed,
        })
    }

    /// Walk of exactly `length` steps that does not stop at equilibria.
    pub fn walk(&self, start: NodeId, length: usize, seed: u64) -> Result<Vec<NodeId>, EvolutionError> {
        self.check(start)?;
        let mut rng = rng_from_seed(seed);
        let mut path = Vec::with_capacity(length + 1);
        path.push(start);
        let mut current = start;
        for _ in 0..length {
            current = self.step(current, &mut rng);
            path.push(current);
        }
        Ok(path)
    }

    pub fn absorption_stats(
        &self,
        start: NodeId,
        trials: u64,
        max_steps: usize,
        base_seed: u64,
        exec: Exec,
    ) -> Result<AbsorptionStats, EvolutionError> {
        self.check(start)?;
        if trials == 0 {
            return Err(EvolutionError::ZeroTrials);
        }
        if max_steps == 0 {
            return Err(EvolutionError::ZeroBudget);
        }
        let outcomes = map_range(exec, trials as usize, |i| {
            let t = self
                .trajectory(start, max_steps, derive_seed(base_seed, i as u64))
                .expect("start and budget already checked");
            match t.terminal {
                Terminal::BudgetExhausted => None,
                _ => self.equilibrium_of(*t.steps.last().unwrap()),
            }
        });
        let mut hits = vec![0; self.equilibria.len()];
        let mut non_absorbed = 0;
        for o in outcomes {
            match o {
                Some(i) => hits[i] += 1,
                None => non_absorbed += 1,
            }
        }
        Ok(AbsorptionStats {
            start,
            trials,
            max_steps,
            base_seed,
            equilibria: self.equilibria.clone(),
            hits,
            non_absorbed,
        })
    }
}

/// One random FMDC move from `s`.
pub fn step<R: Rng + ?Sized>(game: &FdGame, s: NodeId, rng: &mut R) -> Result<NodeId, EvolutionError> {
    let dynamics = Dynamics::new(game);
    dynamics.check(s)?;
    Ok(dynamics.step(s, rng))
}

pub fn trajectory(game: &FdGame, start: NodeId, max_steps: usize, seed: u64) -> Result<Trajectory, EvolutionError> {
    Dynamics::new(game).trajectory(start, max_steps, seed)
}

/// Absorption counts over `trials` trajectories with the default budget.
pub fn absorption_stats(
    game: &FdGame,
    start: NodeId,
    trials: u64,
    base_seed: u64,
) -> Result<AbsorptionStats, EvolutionError> {
    let budget = default_budget(game.situations().len());
    Dynamics::new(game).absorption_stats(start, trials, budget, base_seed, Exec::default())
}

/// Two-strategy evolutionary outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Dominance,
    Bistability,
    Coexistence,
    Neutrality,
    Unclassified,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Dominance => "dominance",
            Outcome::Bistability => "bistability",
            Outcome::Coexistence => "coexistence",
            Outcome::Neutrality => "neutrality",
            Outcome::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifies a three-situation line game by the shape of its FMDC arcs.
///
/// The interior situation is the unique one adjacent to both others in the
/// union of all feasibility, desirability and FMDC arcs; the two endpoints
/// must not be adjacent to each other.
pub fn classify_two_strategy(game: &FdGame) -> Result<Outcome, EvolutionError> {
    let n = game.situations().len();
    if n != 3 {
        return Err(EvolutionError::ShapeMismatch(format!("{n} situations")));
    }
    let mut adjacent = [[false; 3]; 3];
    for a in game.agent_ids() {
        let rels = [game.feasibility(a).unwrap(), game.desirability(a).unwrap()];
        for (s, t) in rels.iter().flat_map(|r| r.arcs()) {
            if s != t {
                adjacent[s.index()][t.index()] = true;
                adjacent[t.index()][s.index()] = true;
            }
        }
    }
    let hubs: Vec<usize> = (0..3)
        .filter(|&c| (0..3).filter(|&o| o != c).all(|o| adjacent[c][o]))
        .collect();
    let [interior] = hubs[..] else {
        return Err(EvolutionError::ShapeMismatch(format!(
            "{} situations adjacent to both others",
            hubs.len()
        )));
    };
    let ends: Vec<usize> = (0..3).filter(|&o| o != interior).collect();
    let (left, right) = (ends[0], ends[1]);

    let fmdc = game::fmdc(game);
    let arc = |s: usize, t: usize| fmdc.contains(NodeId::new(s), NodeId::new(t));
    let outward = (arc(interior, left), arc(interior, right));
    let inward = (arc(left, interior), arc(right, interior));
    Ok(match (outward, inward) {
        ((true, true), (false, false)) => Outcome::Bistability,
        ((false, false), (true, true)) => Outcome::Coexistence,
        ((true, true), (true, true)) => Outcome::Neutrality,
        ((false, true), (true, false)) | ((true, false), (false, true)) => Outcome::Dominance,
        _ => Outcome::Unclassified,
    })
}

/// Whether a walk, once inside a terminal component, stays in it.
pub fn stays_in_terminal(dynamics: &Dynamics, path: &[NodeId]) -> bool {
    let Some(entry) = path.iter().position(|&s| dynamics.equilibrium_of(s).is_some()) else {
        return true;
    };
    let eq = dynamics.equilibrium_of(path[entry]);
    path[entry..].iter().all(|&s| dynamics.equilibrium_of(s) == eq)
}

/// Indices of the FD equilibria reachable from `start` along FMDC arcs.
pub fn reachable_equilibria(game: &FdGame, start: NodeId) -> Vec<usize> {
    let dynamics = Dynamics::new(game);
    let closure = graph::reflexive_transitive_closure(&game::fmdc(game)).expect("small game");
    let mut found: Vec<usize> = closure
        .successors(start)
        .iter()
        .filter_map(|&t| dynamics.equilibrium_of(t))
        .collect();
    found.sort_unstable();
    found.dedup();
    found
}
