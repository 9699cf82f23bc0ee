//! Finite directed relations over interned node names, and the graph
//! algorithms the rest of the crate is built on: strongly connected
//! components, condensation, closures, sinks and acyclicity.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::nodeset::NodeSet;

/// Largest universe accepted by the quadratic operations (closures).
pub const MAX_UNIVERSE: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("empty universe")]
    EmptyUniverse,
    #[error("universe of {size} nodes exceeds the limit of {limit}")]
    CapacityExceeded { size: usize, limit: usize },
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("partition does not match the relation's universe")]
    PartitionMismatch,
}

/// Dense index of a node in a [`NameTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Injective name table with indices `0..len` in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl NameTable {
    /// Interns `names` in order. Fails on an empty list or a repeated name.
    pub fn new<I, S>(names: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = NameTable {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for name in names {
            let name = name.into();
            if table.index.contains_key(&name) {
                return Err(GraphError::DuplicateName(name));
            }
            table.index.insert(name.clone(), table.names.len());
            table.names.push(name);
        }
        if table.names.is_empty() {
            return Err(GraphError::EmptyUniverse);
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).map(|&i| NodeId::new(i))
    }

    pub fn id(&self, name: &str) -> Result<NodeId, GraphError> {
        self.lookup(name)
            .ok_or_else(|| GraphError::UnknownName(name.to_owned()))
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len()).map(NodeId::new)
    }

    /// Set of ids for the given names.
    pub fn set<'a, I>(&self, names: I) -> Result<NodeSet, GraphError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        names.into_iter().map(|n| self.id(n)).collect()
    }

    /// Names of a node set, ascending by index.
    pub fn names_of(&self, set: &NodeSet) -> Vec<String> {
        set.iter().map(|id| self.name(id).to_owned()).collect()
    }
}

/// Interns a list of node names.
pub fn intern_universe<I, S>(names: I) -> Result<NameTable, GraphError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    NameTable::new(names)
}

/// A directed relation on a finite universe. Arcs have set semantics and
/// self-loops are kept.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    universe: Arc<NameTable>,
    succ: Vec<Vec<NodeId>>,
}

impl Relation {
    pub fn empty(universe: Arc<NameTable>) -> Self {
        let succ = vec![Vec::new(); universe.len()];
        Relation { universe, succ }
    }

    pub fn from_arcs<I>(universe: Arc<NameTable>, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut rel = Self::empty(universe);
        for (s, t) in arcs {
            rel.insert(s, t)?;
        }
        Ok(rel)
    }

    /// Builds a relation from name pairs, interning the universe first.
    pub fn from_named<'a>(
        nodes: &[&str],
        arcs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, GraphError> {
        let universe = Arc::new(NameTable::new(nodes.iter().copied())?);
        let pairs = arcs
            .into_iter()
            .map(|(s, t)| Ok((universe.id(s)?, universe.id(t)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Self::from_arcs(universe, pairs)
    }

    /// Adds an arc; returns whether it was new.
    pub fn insert(&mut self, source: NodeId, target: NodeId) -> Result<bool, GraphError> {
        self.check(source)?;
        self.check(target)?;
        let out = &mut self.succ[source.index()];
        match out.binary_search(&target) {
            Ok(_) => Ok(false),
            Err(pos) => {
                out.insert(pos, target);
                Ok(true)
            }
        }
    }

    fn check(&self, n: NodeId) -> Result<(), GraphError> {
        if n.index() < self.universe.len() {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(n.index()))
        }
    }

    pub fn universe(&self) -> &Arc<NameTable> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn arc_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, source: NodeId, target: NodeId) -> bool {
        self.succ
            .get(source.index())
            .is_some_and(|out| out.binary_search(&target).is_ok())
    }

    /// Out-neighbours in ascending order, self-loop included if present.
    pub fn successors(&self, node: NodeId) -> &[NodeId] {
        &self.succ[node.index()]
    }

    /// Arcs in lexicographic `(source, target)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(s, out)| out.iter().map(move |&t| (NodeId::new(s), t)))
    }

    pub fn named_arcs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.arcs().map(|(s, t)| (self.universe.name(s), self.universe.name(t)))
    }

    pub fn has_self_loop(&self, node: NodeId) -> bool {
        self.contains(node, node)
    }

    /// Same universe, arcs present in both relations.
    pub fn intersection(&self, other: &Relation) -> Relation {
        debug_assert_eq!(self.universe, other.universe);
        let succ = self
            .succ
            .iter()
            .zip(&other.succ)
            .map(|(a, b)| a.iter().filter(|t| b.binary_search(t).is_ok()).copied().collect())
            .collect();
        Relation {
            universe: Arc::clone(&self.universe),
            succ,
        }
    }

    /// Same universe, arcs present in either relation.
    pub fn union(&self, other: &Relation) -> Relation {
        debug_assert_eq!(self.universe, other.universe);
        let succ = self
            .succ
            .iter()
            .zip(&other.succ)
            .map(|(a, b)| {
                let mut out: Vec<NodeId> = a.iter().chain(b).copied().collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        Relation {
            universe: Arc::clone(&self.universe),
            succ,
        }
    }

    /// Whether every arc of `self` is an arc of `other`.
    pub fn is_subrelation(&self, other: &Relation) -> bool {
        self.arcs().all(|(s, t)| other.contains(s, t))
    }

    /// Successor sets without self-loops, as bitsets.
    pub fn successor_sets(&self) -> Vec<NodeSet> {
        self.succ
            .iter()
            .enumerate()
            .map(|(s, out)| out.iter().copied().filter(|t| t.index() != s).collect())
            .collect()
    }

    /// Restriction to `nodes`, returned together with the map from new
    /// indices back to indices in `self`.
    pub fn restrict_indexed(&self, nodes: &NodeSet) -> Result<(Relation, Vec<NodeId>), GraphError> {
        if nodes.bound() > self.len() {
            let bad = nodes.iter().find(|n| n.index() >= self.len()).unwrap();
            return Err(GraphError::UnknownNode(bad.index()));
        }
        let kept = nodes.to_vec();
        let universe = NameTable::new(kept.iter().map(|&n| self.universe.name(n).to_owned()))?;
        let mut remap = vec![None; self.len()];
        for (new, old) in kept.iter().enumerate() {
            remap[old.index()] = Some(NodeId::new(new));
        }
        let succ = kept
            .iter()
            .map(|old| self.succ[old.index()].iter().filter_map(|t| remap[t.index()]).collect())
            .collect();
        Ok((
            Relation {
                universe: Arc::new(universe),
                succ,
            },
            kept,
        ))
    }

    pub fn restrict(&self, nodes: &NodeSet) -> Result<Relation, GraphError> {
        self.restrict_indexed(nodes).map(|(r, _)| r)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation")
            .field("universe", &self.universe.names())
            .field(
                "arcs",
                &self.named_arcs().map(|(s, t)| format!("{s}->{t}")).collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// Strongly connected components in reverse topological order: every arc
/// goes from a component to one at an equal or earlier position. Ties are
/// broken by the smallest node index in each component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccPartition {
    components: Vec<NodeSet>,
    component_of: Vec<usize>,
}

impl SccPartition {
    /// Builds a partition from explicit components; checks that they cover
    /// `0..n` exactly. Component order is taken as given.
    pub fn from_components(components: Vec<NodeSet>, n: usize) -> Result<Self, GraphError> {
        let mut component_of = vec![usize::MAX; n];
        for (c, comp) in components.iter().enumerate() {
            if comp.is_empty() {
                return Err(GraphError::PartitionMismatch);
            }
            for node in comp {
                match component_of.get_mut(node.index()) {
                    Some(slot) if *slot == usize::MAX => *slot = c,
                    _ => return Err(GraphError::PartitionMismatch),
                }
            }
        }
        if component_of.contains(&usize::MAX) {
            return Err(GraphError::PartitionMismatch);
        }
        Ok(SccPartition {
            components,
            component_of,
        })
    }

    pub fn components(&self) -> &[NodeSet] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component_of(&self, node: NodeId) -> usize {
        self.component_of[node.index()]
    }

    pub fn component(&self, index: usize) -> &NodeSet {
        &self.components[index]
    }

    fn universe_len(&self) -> usize {
        self.component_of.len()
    }
}

/// Tarjan's algorithm, iterative. Components come out in the order Tarjan
/// finishes them, members unsorted.
fn tarjan(rel: &Relation) -> Vec<Vec<NodeId>> {
    const UNSEEN: usize = usize::MAX;
    let n = rel.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    // (node, next successor position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let out = &rel.succ[v];
            if *pos < out.len() {
                let w = out[*pos].index();
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(NodeId::new(w));
                    if w == v {
                        break;
                    }
                }
                comps.push(comp);
            }
        }
    }
    comps
}

/// Strongly connected components of `rel` in canonical reverse topological
/// order.
pub fn scc(rel: &Relation) -> SccPartition {
    let raw = tarjan(rel);
    let k = raw.len();
    let mut comp_of = vec![0; rel.len()];
    for (c, members) in raw.iter().enumerate() {
        for m in members {
            comp_of[m.index()] = c;
        }
    }
    let min_member: Vec<usize> = raw.iter().map(|m| m.iter().map(|n| n.index()).min().unwrap()).collect();

    // Peel sinks of the condensation, smallest-member first.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut out_degree = vec![0usize; k];
    for (s, t) in rel.arcs() {
        let (cs, ct) = (comp_of[s.index()], comp_of[t.index()]);
        if cs != ct {
            preds[ct].push(cs);
            out_degree[cs] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..k)
        .filter(|&c| out_degree[c] == 0)
        .map(|c| Reverse((min_member[c], c)))
        .collect();
    let mut order = Vec::with_capacity(k);
    while let Some(Reverse((_, c))) = ready.pop() {
        order.push(c);
        for &p in &preds[c] {
            out_degree[p] -= 1;
            if out_degree[p] == 0 {
                ready.push(Reverse((min_member[p], p)));
            }
        }
    }
    debug_assert_eq!(order.len(), k);

    let mut position = vec![0; k];
    for (pos, &c) in order.iter().enumerate() {
        position[c] = pos;
    }
    let components = order.iter().map(|&c| raw[c].iter().copied().collect()).collect();
    let component_of = comp_of.iter().map(|&c| position[c]).collect();
    SccPartition {
        components,
        component_of,
    }
}

/// The condensation of a relation: one node per strongly connected
/// component, labelled `{a,b,...}` by member names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGraph {
    graph: Relation,
}

impl ReducedGraph {
    /// Nodes are component indices of the partition it was built from.
    pub fn graph(&self) -> &Relation {
        &self.graph
    }

    /// Components with no arc to another component.
    pub fn sink_components(&self) -> Vec<usize> {
        sinks(&self.graph).iter().map(NodeId::index).collect()
    }
}

/// Builds the reduced graph of `rel` for partition `part`; arcs inside a
/// component are dropped.
pub fn condense(rel: &Relation, part: &SccPartition) -> Result<ReducedGraph, GraphError> {
    if part.universe_len() != rel.len() {
        return Err(GraphError::PartitionMismatch);
    }
    let labels = part.components().iter().map(|c| {
        let names: Vec<&str> = c.iter().map(|n| rel.universe().name(n)).collect();
        format!("{{{}}}", names.join(","))
    });
    let universe = Arc::new(NameTable::new(labels)?);
    let mut graph = Relation::empty(universe);
    for (s, t) in rel.arcs() {
        let (cs, ct) = (part.component_of(s), part.component_of(t));
        if cs != ct {
            graph.insert(NodeId::new(cs), NodeId::new(ct))?;
        }
    }
    Ok(ReducedGraph { graph })
}

/// Nodes whose only out-arcs, if any, are self-loops.
pub fn sinks(rel: &Relation) -> NodeSet {
    rel.universe()
        .ids()
        .filter(|&s| rel.successors(s).iter().all(|&t| t == s))
        .collect()
}

/// No path from any node to itself; a self-loop counts as such a path.
pub fn is_acyclic(rel: &Relation) -> bool {
    let part = scc(rel);
    part.components().iter().all(|c| c.len() == 1) && rel.universe().ids().all(|n| !rel.has_self_loop(n))
}

fn guard(rel: &Relation) -> Result<(), GraphError> {
    if rel.len() > MAX_UNIVERSE {
        Err(GraphError::CapacityExceeded {
            size: rel.len(),
            limit: MAX_UNIVERSE,
        })
    } else {
        Ok(())
    }
}

/// Nodes reachable from `start` by a path of length at least one.
fn reach_plus(rel: &Relation, start: NodeId) -> NodeSet {
    let mut seen = NodeSet::new();
    let mut frontier: Vec<NodeId> = rel.successors(start).to_vec();
    while let Some(v) = frontier.pop() {
        if seen.insert(v) {
            frontier.extend(rel.successors(v).iter().filter(|w| !seen.contains(**w)));
        }
    }
    seen
}

/// Least transitive relation containing `rel`.
pub fn transitive_closure(rel: &Relation) -> Result<Relation, GraphError> {
    guard(rel)?;
    let succ = rel.universe().ids().map(|s| reach_plus(rel, s).to_vec()).collect();
    Ok(Relation {
        universe: Arc::clone(rel.universe()),
        succ,
    })
}

/// Least transitive and reflexive relation containing `rel`.
pub fn reflexive_transitive_closure(rel: &Relation) -> Result<Relation, GraphError> {
    let mut closure = transitive_closure(rel)?;
    for n in 0..closure.len() {
        let id = NodeId::new(n);
        closure.insert(id, id)?;
    }
    Ok(closure)
}

/// Restriction of `rel` to `nodes`.
pub fn restrict(rel: &Relation, nodes: &NodeSet) -> Result<Relation, GraphError> {
    rel.restrict(nodes)
}
