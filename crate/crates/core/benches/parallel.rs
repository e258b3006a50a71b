//! Sequential versus rayon-parallel execution of the data-parallel paths:
//! exhaustive brace axiom checks and split search.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use endocable::search::{appendix_model, build_model, solve_with, Budget, Diagonal, Mode, ModelSpec, SolveOptions};
use endocable::{par, Brace};

fn workers() -> usize {
    std::thread::available_parallelism().map_or(2, |n| n.get()).max(2)
}

fn brace_axioms(c: &mut Criterion) {
    let mut group = c.benchmark_group("brace-axioms");
    group.sample_size(20);
    for k in [6u32, 8] {
        for threads in [1, workers()] {
            group.bench_with_input(BenchmarkId::new(format!("B_{k}"), threads), &threads, |bch, &t| {
                bch.iter(|| {
                    par::with_threads(t, || {
                        let b = Brace::bk_brace(k).unwrap();
                        b.check_axioms(0).unwrap();
                        black_box(b.size())
                    })
                })
            });
        }
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    let mut spec = ModelSpec::new(7);
    spec.diagonal = Diagonal::FullCycle;
    let full7 = build_model(spec).unwrap();
    let app3 = appendix_model(3).unwrap();
    for (name, model, mode) in [("fullcycle-7-all", &full7, Mode::All), ("appendix-3-decide", &app3, Mode::Decide)] {
        for threads in [1, workers()] {
            group.bench_with_input(BenchmarkId::new(name, threads), &threads, |bch, &t| {
                let opts = SolveOptions { mode, budget: Budget::unlimited(), threads: t };
                bch.iter(|| black_box(solve_with(model, &opts).stats.nodes))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, brace_axioms, search);
criterion_main!(benches);
