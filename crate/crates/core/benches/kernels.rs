//! Parallel map against a plain sequential loop on the same workload:
//! build each operator's plan and interpolate one entire field.
//!
//! The reference machine has a single core, so both groups are expected to
//! time the same there; the comparison only becomes interesting with more
//! cores. Build with `--no-default-features` to make `map_collect` itself
//! sequential.

use criterion::{criterion_group, criterion_main, Criterion};
use exseq::par;
use exseq::projectors::{build_plan, Operator};
use exseq::studies::suites::fields_for;
use exseq::studies::SuiteKind;
use std::hint::black_box;

const P: usize = 3;

fn task(op: Operator) -> f64 {
    let u = fields_for(op, SuiteKind::Entire).remove(0);
    let plan = build_plan(op, P).unwrap();
    plan.apply(&u).unwrap().residual
}

fn interpolate_all(c: &mut Criterion) {
    let mut g = c.benchmark_group("interpolate_all_operators");
    g.sample_size(10);
    g.bench_function(if par::PARALLEL { "map_collect_rayon" } else { "map_collect_fallback" }, |b| {
        b.iter(|| black_box(par::map_collect(Operator::ALL.to_vec(), task)))
    });
    g.bench_function("sequential", |b| {
        b.iter(|| black_box(Operator::ALL.iter().map(|&op| task(op)).collect::<Vec<_>>()))
    });
    g.finish();
}

criterion_group!(benches, interpolate_all);
criterion_main!(benches);
