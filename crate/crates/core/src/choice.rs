//! Choice correspondences induced by a relation, and exhaustive checks of
//! the consistency conditions κ, α and ι over finite subset families.
//!
//! The correspondence of a relation maps a nonempty set `A` to its sinks
//! within `A`: the members with no arc to another member of `A`. It is
//! partial: sets without a sink are outside its domain, and [`choose`]
//! returns the empty set for them so that enumeration stays total.
//!
//! Pairs `(A, B)` with `A ∩ B = ∅` are skipped by the ι, semi-lattice and
//! intersection-property checks, since the empty set is not an admissible
//! argument.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{self, NameTable, NodeId, Relation};
use crate::nodeset::NodeSet;
use crate::par::{map_range, Exec};

/// Default largest universe accepted by [`audit`].
pub const DEFAULT_MAX_NODES: usize = 12;
/// Largest universe [`audit`] accepts whatever `max_nodes` says.
pub const HARD_MAX_NODES: usize = 16;

pub const EMPTY_INTERSECTION_CONVENTION: &str =
    "pairs (A, B) with an empty intersection are skipped by the iota, semi-lattice and proposition 1 checks";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChoiceError {
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("empty subset")]
    EmptySubset,
    #[error("universe of {size} nodes exceeds the audit limit of {limit}")]
    CapacityExceeded { size: usize, limit: usize },
    #[error("duplicate family member {0:?}")]
    DuplicateMember(NodeSet),
}

/// A partial map from nonempty subsets to subsets. An empty result means
/// the argument lies outside the domain.
pub trait ChoiceCorrespondence: Sync {
    fn choose(&self, set: &NodeSet) -> NodeSet;
}

/// Sinks of the relation restricted to the argument.
impl ChoiceCorrespondence for Relation {
    fn choose(&self, set: &NodeSet) -> NodeSet {
        set.iter()
            .filter(|&s| self.successors(s).iter().all(|&t| t == s || !set.contains(t)))
            .collect()
    }
}

/// The same correspondence as for [`Relation`], with successor sets
/// precomputed as bitsets.
#[derive(Debug, Clone)]
pub struct SinkChoice {
    succ: Vec<NodeSet>,
}

impl SinkChoice {
    pub fn new(rel: &Relation) -> Self {
        SinkChoice {
            succ: rel.successor_sets(),
        }
    }
}

impl ChoiceCorrespondence for SinkChoice {
    fn choose(&self, set: &NodeSet) -> NodeSet {
        set.iter().filter(|s| self.succ[s.index()].is_disjoint(set)).collect()
    }
}

/// A correspondence given by an explicit table; sets not in the table are
/// outside the domain.
#[derive(Debug, Clone, Default)]
pub struct TableChoice {
    table: std::collections::HashMap<NodeSet, NodeSet>,
}

impl TableChoice {
    pub fn new(entries: impl IntoIterator<Item = (NodeSet, NodeSet)>) -> Self {
        TableChoice {
            table: entries.into_iter().collect(),
        }
    }
}

impl ChoiceCorrespondence for TableChoice {
    fn choose(&self, set: &NodeSet) -> NodeSet {
        self.table.get(set).cloned().unwrap_or_default()
    }
}

fn check_subset(rel: &Relation, set: &NodeSet) -> Result<(), ChoiceError> {
    if set.is_empty() {
        return Err(ChoiceError::EmptySubset);
    }
    match set.iter().find(|n| n.index() >= rel.len()) {
        Some(bad) => Err(ChoiceError::UnknownNode(bad.index())),
        None => Ok(()),
    }
}

/// Sinks of `rel` within `set`.
pub fn choose(rel: &Relation, set: &NodeSet) -> Result<NodeSet, ChoiceError> {
    check_subset(rel, set)?;
    Ok(rel.choose(set))
}

/// Same result as [`choose`], computed by restricting the relation and
/// taking its sinks.
pub fn choose_by_restriction(rel: &Relation, set: &NodeSet) -> Result<NodeSet, ChoiceError> {
    check_subset(rel, set)?;
    let (sub, back) = rel.restrict_indexed(set).map_err(|_| ChoiceError::EmptySubset)?;
    Ok(graph::sinks(&sub).iter().map(|n| back[n.index()]).collect())
}

/// Whether `set` has at least one sink.
pub fn in_domain(rel: &Relation, set: &NodeSet) -> Result<bool, ChoiceError> {
    choose(rel, set).map(|c| !c.is_empty())
}

/// Distinct nonempty subsets of a ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetFamily {
    ground: Arc<NameTable>,
    members: Vec<NodeSet>,
}

impl SubsetFamily {
    pub fn new(ground: Arc<NameTable>, members: Vec<NodeSet>) -> Result<Self, ChoiceError> {
        let mut seen = HashSet::new();
        for m in &members {
            if m.is_empty() {
                return Err(ChoiceError::EmptySubset);
            }
            if m.bound() > ground.len() {
                let bad = m.iter().find(|n| n.index() >= ground.len()).unwrap();
                return Err(ChoiceError::UnknownNode(bad.index()));
            }
            if !seen.insert(m) {
                return Err(ChoiceError::DuplicateMember(m.clone()));
            }
        }
        Ok(SubsetFamily { ground, members })
    }

    /// Every nonempty subset of the ground set, in increasing bitmask order.
    pub fn powerset(ground: Arc<NameTable>) -> Result<Self, ChoiceError> {
        let n = ground.len();
        if n > HARD_MAX_NODES {
            return Err(ChoiceError::CapacityExceeded {
                size: n,
                limit: HARD_MAX_NODES,
            });
        }
        let members = (1u64..1 << n).map(NodeSet::from_mask).collect();
        Ok(SubsetFamily { ground, members })
    }

    pub fn ground(&self) -> &Arc<NameTable> {
        &self.ground
    }

    pub fn members(&self) -> &[NodeSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Witness `(A, B, x)` that a pair condition fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub a: NodeSet,
    pub b: NodeSet,
    pub x: NodeId,
}

impl Counterexample {
    fn size(&self) -> usize {
        self.a.len() + self.b.len()
    }
}

/// Smallest `|A| + |B|` first, then lexicographic on `A`, `B`, `x`.
impl Ord for Counterexample {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.a.cmp(&other.a))
            .then_with(|| self.b.cmp(&other.b))
            .then_with(|| self.x.cmp(&other.x))
    }
}

impl PartialOrd for Counterexample {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<C> {
    Pass,
    Fail(C),
}

impl<C> Verdict<C> {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn counterexample(&self) -> Option<&C> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(c) => Some(c),
        }
    }

    fn from_option(c: Option<C>) -> Self {
        c.map_or(Verdict::Pass, Verdict::Fail)
    }
}

/// An implication checked on one instance. It is violated only when the
/// hypotheses hold and the conclusion fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Implication {
    pub hypotheses_hold: bool,
    pub conclusion: Verdict<Counterexample>,
}

impl Implication {
    pub fn holds(&self) -> bool {
        !self.hypotheses_hold || self.conclusion.passed()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Propositions {
    /// κ ∧ ι ⇒ C(A) ∩ C(B) ⊆ C(A ∩ B).
    pub intersection: Implication,
    /// ι ⇒ α.
    pub iota_implies_alpha: Implication,
    /// Semi-lattice family ∧ κ ∧ α ⇒ ι.
    pub kappa_alpha_implies_iota: Implication,
}

impl Propositions {
    pub fn all_hold(&self) -> bool {
        self.intersection.holds() && self.iota_implies_alpha.holds() && self.kappa_alpha_implies_iota.holds()
    }
}

/// A family together with the choice made on each member.
struct Evaluated<'a, C: ?Sized> {
    choice: &'a C,
    members: &'a [NodeSet],
    chosen: Vec<NodeSet>,
    exec: Exec,
}

impl<'a, C: ChoiceCorrespondence + ?Sized> Evaluated<'a, C> {
    fn new(choice: &'a C, fam: &'a SubsetFamily, exec: Exec) -> Self {
        let members = fam.members();
        let chosen = map_range(exec, members.len(), |i| choice.choose(&members[i]));
        Evaluated {
            choice,
            members,
            chosen,
            exec,
        }
    }

    /// Minimal counterexample over all ordered pairs of members.
    fn min_pair<F>(&self, witness: F) -> Option<Counterexample>
    where
        F: Fn(usize, usize) -> Option<NodeId> + Sync + Send,
    {
        let m = self.members.len();
        map_range(self.exec, m, |i| {
            (0..m)
                .filter_map(|j| {
                    witness(i, j).map(|x| Counterexample {
                        a: self.members[i].clone(),
                        b: self.members[j].clone(),
                        x,
                    })
                })
                .min()
        })
        .into_iter()
        .flatten()
        .min()
    }

    fn kappa(&self) -> Verdict<NodeSet> {
        Verdict::from_option(
            self.members
                .iter()
                .zip(&self.chosen)
                .filter(|(a, c)| !c.is_subset(a))
                .map(|(a, _)| a.clone())
                .min_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y))),
        )
    }

    fn alpha(&self) -> Verdict<Counterexample> {
        Verdict::from_option(self.min_pair(|i, j| {
            let (a, b) = (&self.members[i], &self.members[j]);
            if !a.is_subset(b) {
                return None;
            }
            a.intersection(&self.chosen[j]).difference(&self.chosen[i]).first()
        }))
    }

    fn iota(&self) -> Verdict<Counterexample> {
        Verdict::from_option(self.min_pair(|i, j| {
            let (a, b) = (&self.members[i], &self.members[j]);
            let ab = a.intersection(b);
            if ab.is_empty() {
                return None;
            }
            let lhs = a.intersection(&self.chosen[j]);
            if lhs.is_empty() {
                return None;
            }
            lhs.difference(&self.choice.choose(&ab)).first()
        }))
    }

    fn intersection_property(&self) -> Verdict<Counterexample> {
        Verdict::from_option(self.min_pair(|i, j| {
            let ab = self.members[i].intersection(&self.members[j]);
            if ab.is_empty() {
                return None;
            }
            let both = self.chosen[i].intersection(&self.chosen[j]);
            if both.is_empty() {
                return None;
            }
            both.difference(&self.choice.choose(&ab)).first()
        }))
    }

    fn propositions(&self, semilattice: bool) -> Propositions {
        let kappa = self.kappa().passed();
        let alpha = self.alpha();
        let iota = self.iota();
        Propositions {
            intersection: Implication {
                hypotheses_hold: kappa && iota.passed(),
                conclusion: self.intersection_property(),
            },
            iota_implies_alpha: Implication {
                hypotheses_hold: iota.passed(),
                conclusion: alpha.clone(),
            },
            kappa_alpha_implies_iota: Implication {
                hypotheses_hold: semilattice && kappa && alpha.passed(),
                conclusion: iota,
            },
        }
    }
}

/// κ: every choice lies inside its argument. Fails with the smallest
/// offending member.
pub fn check_kappa<C: ChoiceCorrespondence + ?Sized>(choice: &C, fam: &SubsetFamily) -> Verdict<NodeSet> {
    Evaluated::new(choice, fam, Exec::default()).kappa()
}

/// α: `A ⊆ B`, `x ∈ A`, `x ∈ C(B)` imply `x ∈ C(A)`.
pub fn check_alpha<C: ChoiceCorrespondence + ?Sized>(choice: &C, fam: &SubsetFamily) -> Verdict<Counterexample> {
    Evaluated::new(choice, fam, Exec::default()).alpha()
}

/// ι: `x ∈ A`, `x ∈ C(B)` imply `x ∈ C(A ∩ B)`, for nonempty `A ∩ B`.
pub fn check_iota<C: ChoiceCorrespondence + ?Sized>(choice: &C, fam: &SubsetFamily) -> Verdict<Counterexample> {
    Evaluated::new(choice, fam, Exec::default()).iota()
}

/// Whether every nonempty pairwise intersection of members is a member.
pub fn check_semilattice(fam: &SubsetFamily) -> bool {
    let members: HashSet<&NodeSet> = fam.members().iter().collect();
    semilattice_of(fam.members(), |s| members.contains(s))
}

fn semilattice_of(members: &[NodeSet], contains: impl Fn(&NodeSet) -> bool) -> bool {
    members.iter().enumerate().all(|(i, a)| {
        members[i + 1..].iter().all(|b| {
            let ab = a.intersection(b);
            ab.is_empty() || contains(&ab)
        })
    })
}

/// Checks the intersection property and both halves of the κ/α/ι
/// equivalence on `fam`.
pub fn check_propositions<C: ChoiceCorrespondence + ?Sized>(choice: &C, fam: &SubsetFamily) -> Propositions {
    Evaluated::new(choice, fam, Exec::default()).propositions(check_semilattice(fam))
}

/// Result of auditing a relation's choice correspondence over every
/// nonempty subset of its universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceAuditReport {
    pub ground: Arc<NameTable>,
    pub subsets: usize,
    pub acyclic: bool,
    pub kappa: Verdict<NodeSet>,
    pub alpha: Verdict<Counterexample>,
    pub iota: Verdict<Counterexample>,
    /// Whether the domain is closed under nonempty intersection.
    pub semilattice: bool,
    /// Whether every nonempty subset has a sink.
    pub domain_total: bool,
    pub domain_size: usize,
    /// Smallest subset without a sink.
    pub outside_domain: Option<NodeSet>,
    pub propositions: Propositions,
}

pub fn audit(rel: &Relation, max_nodes: usize) -> Result<ChoiceAuditReport, ChoiceError> {
    audit_with(rel, max_nodes, Exec::default())
}

pub fn audit_with(rel: &Relation, max_nodes: usize, exec: Exec) -> Result<ChoiceAuditReport, ChoiceError> {
    let limit = max_nodes.min(HARD_MAX_NODES);
    if rel.len() > limit {
        return Err(ChoiceError::CapacityExceeded { size: rel.len(), limit });
    }
    let fam = SubsetFamily::powerset(Arc::clone(rel.universe()))?;
    let choice = SinkChoice::new(rel);
    let ev = Evaluated::new(&choice, &fam, exec);

    // Powerset indices: member i is the set with mask i + 1.
    let in_domain = |s: &NodeSet| {
        let mask = s.as_mask().expect("audit universes fit one word") as usize;
        !ev.chosen[mask - 1].is_empty()
    };
    let domain: Vec<NodeSet> = fam.members().iter().filter(|s| in_domain(s)).cloned().collect();
    let outside_domain = fam
        .members()
        .iter()
        .filter(|s| !in_domain(s))
        .min_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)))
        .cloned();

    let semilattice = semilattice_of(&domain, in_domain);
    Ok(ChoiceAuditReport {
        ground: Arc::clone(rel.universe()),
        subsets: fam.len(),
        acyclic: graph::is_acyclic(rel),
        kappa: ev.kappa(),
        alpha: ev.alpha(),
        iota: ev.iota(),
        semilattice,
        domain_total: outside_domain.is_none(),
        domain_size: domain.len(),
        outside_domain,
        // the full powerset is closed under nonempty intersection
        propositions: ev.propositions(true),
    })
}
