use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fdgame::choice::audit_with;
use fdgame::evolution::{default_budget, Dynamics};
use fdgame::game::{AgentSpec, GameSpec};
use fdgame::{Exec, FdGame, NameTable, NodeId, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn random_relation(n: usize, density: f64, seed: u64) -> Relation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe = Arc::new(NameTable::new((0..n).map(|i| format!("x{i}"))).unwrap());
    let mut rel = Relation::empty(universe);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(density) {
                rel.insert(NodeId::new(i), NodeId::new(j)).unwrap();
            }
        }
    }
    rel
}

/// A cycle of `n` situations with a single exit into a trap, so walks stay
/// transient for a while.
fn slow_game(n: usize) -> FdGame {
    let names: Vec<String> = (0..=n).map(|i| format!("s{i}")).collect();
    let mut agent = AgentSpec::new("walker");
    for i in 0..n {
        let next = &names[(i + 1) % n];
        agent = agent.feasible(&names[i], next).desire(&names[i], next);
        agent = agent.feasible(&names[i], &names[0]).desire(&names[i], &names[0]);
    }
    agent = agent
        .feasible(&names[n - 1], &names[n])
        .desire(&names[n - 1], &names[n]);
    GameSpec::new(names).agent(agent).build().unwrap()
}

fn choice_audit(c: &mut Criterion) {
    let mut group = c.benchmark_group("choice_audit");
    group.sample_size(10);
    for n in [8, 10] {
        let rel = random_relation(n, 0.3, n as u64);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &rel, |b, rel| {
                b.iter(|| audit_with(black_box(rel), n, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn absorption(c: &mut Criterion) {
    let mut group = c.benchmark_group("absorption_stats");
    for n in [8, 32] {
        let game = slow_game(n);
        let dynamics = Dynamics::new(&game);
        let start = NodeId::new(0);
        let budget = default_budget(n + 1);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &dynamics, |b, d| {
                b.iter(|| d.absorption_stats(start, 10_000, budget, black_box(1), exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, choice_audit, absorption);
criterion_main!(benches);
