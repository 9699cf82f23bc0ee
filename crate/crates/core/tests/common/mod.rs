#![allow(dead_code)]
// Oracles index adjacency matrices directly.
#![allow(clippy::needless_range_loop)]

use std::sync::Arc;

use fdgame::game::{AgentSpec, GameSpec};
use fdgame::{FdGame, NameTable, NodeId, Relation};
use proptest::prelude::*;

pub fn universe(n: usize) -> Arc<NameTable> {
    Arc::new(NameTable::new((0..n).map(|i| format!("s{i}"))).unwrap())
}

pub fn relation_from_matrix(m: &[Vec<bool>]) -> Relation {
    let arcs = (0..m.len()).flat_map(|i| {
        (0..m.len())
            .filter(move |&j| m[i][j])
            .map(move |j| (NodeId::new(i), NodeId::new(j)))
    });
    Relation::from_arcs(universe(m.len()), arcs).unwrap()
}

fn matrix(n: usize, density: f64) -> impl Strategy<Value = Vec<Vec<bool>>> {
    prop::collection::vec(prop::collection::vec(prop::bool::weighted(density), n), n)
}

/// Relations on 1..=max_n nodes with mixed arc densities.
pub fn arb_relation(max_n: usize) -> impl Strategy<Value = Relation> {
    (1..=max_n, prop_oneof![Just(0.05), Just(0.15), Just(0.4)])
        .prop_flat_map(|(n, d)| matrix(n, d))
        .prop_map(|m| relation_from_matrix(&m))
}

/// Arcs only from higher to lower index, so the relation is acyclic.
pub fn arb_acyclic(max_n: usize) -> impl Strategy<Value = Relation> {
    (1..=max_n, prop_oneof![Just(0.2), Just(0.5)])
        .prop_flat_map(|(n, d)| matrix(n, d))
        .prop_map(|mut m| {
            for (i, row) in m.iter_mut().enumerate() {
                for x in row.iter_mut().skip(i) {
                    *x = false;
                }
            }
            relation_from_matrix(&m)
        })
}

pub fn arb_game(max_n: usize, max_agents: usize) -> impl Strategy<Value = FdGame> {
    (1..=max_n, 1..=max_agents)
        .prop_flat_map(|(n, k)| prop::collection::vec((matrix(n, 0.3), matrix(n, 0.5)), k))
        .prop_map(|agents| {
            let n = agents[0].0.len();
            let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
            let mut spec = GameSpec::new(names.clone());
            for (k, (feas, des)) in agents.iter().enumerate() {
                let mut a = AgentSpec::new(format!("a{k}"));
                for i in 0..n {
                    for j in 0..n {
                        if feas[i][j] {
                            a = a.feasible(&names[i], &names[j]);
                        }
                        if des[i][j] {
                            a = a.desire(&names[i], &names[j]);
                        }
                    }
                }
                spec = spec.agent(a);
            }
            spec.build().unwrap()
        })
}

/// Reachability by paths of length at least one, via Warshall.
pub fn warshall(rel: &Relation) -> Vec<Vec<bool>> {
    let n = rel.len();
    let mut r = vec![vec![false; n]; n];
    for (s, t) in rel.arcs() {
        r[s.index()][t.index()] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}
