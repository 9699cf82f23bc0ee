mod common;

use std::sync::Arc;

use common::arb_game;
use fdgame::evolution::{
    default_budget, derive_seed, reachable_equilibria, rng_from_seed, stays_in_terminal, Dynamics, Terminal,
};
use fdgame::game::{AgentSpec, GameSpec};
use fdgame::{Exec, FdGame, NodeId};
use proptest::prelude::*;

const HIDDEN_COINS: [&str; 9] = ["NN", "NH", "NT", "HN", "HH", "HT", "TN", "TH", "TT"];

/// Only the FMDC arcs matter for the dynamics; each is given to one agent
/// with identical feasibility and desirability.
fn arc_game(situations: &[&str], arcs: &[(&str, &str)]) -> FdGame {
    let mut a = AgentSpec::new("mover");
    for &(s, t) in arcs {
        a = a.feasible(s, t).desire(s, t);
    }
    GameSpec::new(situations.iter().copied()).agent(a).build().unwrap()
}

fn hidden_coins() -> FdGame {
    arc_game(
        &HIDDEN_COINS,
        &[
            ("NH", "NN"),
            ("HN", "NN"),
            ("NH", "HH"),
            ("HN", "HH"),
            ("NT", "HT"),
            ("TN", "TH"),
            ("TT", "TH"),
            ("TH", "HH"),
            ("HH", "HT"),
            ("HT", "TT"),
            ("NT", "NN"),
            ("TN", "NN"),
        ],
    )
}

fn prisoners() -> FdGame {
    arc_game(
        &["QQ", "QF", "FQ", "FF"],
        &[("QQ", "QF"), ("QQ", "FQ"), ("QF", "FF"), ("FQ", "FF")],
    )
}

#[test]
fn uniform_step_from_qq() {
    let g = prisoners();
    let d = Dynamics::new(&g);
    let qq = d.situation("QQ").unwrap();
    let qf = d.situation("QF").unwrap();
    let draws = 10_000u32;
    let mut rng = rng_from_seed(2024);
    let hits = (0..draws).filter(|_| d.step(qq, &mut rng) == qf).count() as f64;
    let sigma = (f64::from(draws) * 0.25).sqrt();
    assert!((hits - f64::from(draws) / 2.0).abs() <= 3.0 * sigma, "{hits}");
}

#[test]
fn hidden_coins_reaches_both_equilibria() {
    let g = hidden_coins();
    let d = Dynamics::new(&g);
    let nh = d.situation("NH").unwrap();
    let stats = d
        .absorption_stats(nh, 1000, default_budget(9), 7, Exec::default())
        .unwrap();
    assert_eq!(stats.equilibria.len(), 2);
    assert!(stats.hits.iter().all(|&h| h > 0), "{:?}", stats.hits);
    assert_eq!(stats.non_absorbed, 0);
    assert_eq!(reachable_equilibria(&g, nh), [0, 1]);
}

#[test]
fn wonderland_never_exhausts() {
    let g = arc_game(
        &["A", "B", "C", "D", "E", "F", "G", "H"],
        &[
            ("A", "B"),
            ("A", "C"),
            ("B", "C"),
            ("C", "F"),
            ("F", "G"),
            ("G", "C"),
            ("B", "D"),
            ("B", "E"),
            ("E", "H"),
            ("H", "E"),
        ],
    );
    let d = Dynamics::new(&g);
    for start in g.situations().ids() {
        for max_steps in [8, 9, 64] {
            let s = d.absorption_stats(start, 500, max_steps, 11, Exec::default()).unwrap();
            assert_eq!(s.non_absorbed, 0);
        }
    }
}

#[test]
fn budget_counts_moves() {
    // a chain of four moves ends in the sink
    let g = arc_game(
        &["a", "b", "c", "d", "e"],
        &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")],
    );
    let d = Dynamics::new(&g);
    let a = d.situation("a").unwrap();
    assert_eq!(
        d.trajectory(a, 4, 0).unwrap().terminal,
        Terminal::AbsorbedAtNash(NodeId::new(4))
    );
    let short = d.trajectory(a, 3, 0).unwrap();
    assert_eq!(short.terminal, Terminal::BudgetExhausted);
    assert_eq!(short.steps.len(), 4);
}

#[test]
fn derived_seeds_are_distinct() {
    let seeds: std::collections::HashSet<u64> = (0..10_000).map(|i| derive_seed(99, i)).collect();
    assert_eq!(seeds.len(), 10_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn never_leaves_terminal_component(g in arb_game(12, 3), seed in any::<u64>()) {
        let d = Dynamics::new(&g);
        let n = g.situations().len();
        for start in g.situations().ids() {
            for i in 0..10 {
                let path = d.walk(start, 4 * n * n, derive_seed(seed, i)).unwrap();
                prop_assert!(stays_in_terminal(&d, &path));
            }
        }
    }

    #[test]
    fn some_seed_terminates(g in arb_game(12, 3), seed in any::<u64>()) {
        let d = Dynamics::new(&g);
        let budget = default_budget(g.situations().len());
        for start in g.situations().ids() {
            let s = d.absorption_stats(start, 1000, budget, seed, Exec::default()).unwrap();
            prop_assert!(s.non_absorbed < s.trials);
        }
    }

    #[test]
    fn reproducible(g in arb_game(10, 3), seed in any::<u64>(), start in any::<prop::sample::Index>()) {
        let d = Dynamics::new(&g);
        let start = NodeId::new(start.index(g.situations().len()));
        let budget = default_budget(g.situations().len());
        prop_assert_eq!(d.trajectory(start, budget, seed).unwrap(), d.trajectory(start, budget, seed).unwrap());
        prop_assert_eq!(
            d.absorption_stats(start, 64, budget, seed, Exec::Parallel).unwrap(),
            d.absorption_stats(start, 64, budget, seed, Exec::Sequential).unwrap()
        );
    }

    #[test]
    fn ends_where_classified(g in arb_game(10, 3), seed in any::<u64>()) {
        let d = Dynamics::new(&g);
        let budget = default_budget(g.situations().len());
        for start in g.situations().ids() {
            let t = d.trajectory(start, budget, seed).unwrap();
            prop_assert!(t.steps.len() <= budget + 1);
            let last = *t.steps.last().unwrap();
            match &t.terminal {
                Terminal::AbsorbedAtNash(s) => {
                    prop_assert_eq!(*s, last);
                    prop_assert_eq!(d.equilibria()[d.equilibrium_of(last).unwrap()].len(), 1);
                }
                Terminal::CyclingInFdEquilibrium(eq) => prop_assert!(eq.contains(last) && eq.len() > 1),
                Terminal::BudgetExhausted => prop_assert!(d.equilibrium_of(last).is_none()),
            }
            // only the final step may lie in a terminal component
            prop_assert!(t.steps[..t.steps.len() - 1].iter().all(|&s| d.equilibrium_of(s).is_none()));
        }
    }
}

#[test]
fn names_resolve() {
    let d = Dynamics::new(&hidden_coins());
    assert!(d.situation("XX").is_err());
    assert_eq!(Arc::clone(d.situations()).len(), 9);
}
