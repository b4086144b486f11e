use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flagsos::graph::{enumerate_a_free, enumerate_flags, labeled_a_free, Graph, IntersectionType};
use flagsos::flags::pair_density_table;
use flagsos::par;
use flagsos::verify::verify_mantel_flag_sos;
use std::hint::black_box;

const MODES: [(&str, bool); 2] = [("parallel", true), ("sequential", false)];

fn zero_set(c: &mut Criterion) {
    let k3 = Graph::complete(3);
    let mut g = c.benchmark_group("labeled_a_free");
    g.sample_size(10);
    for (name, on) in MODES {
        par::set_parallel(on);
        g.bench_with_input(BenchmarkId::new(name, 6), &6usize, |b, &n| b.iter(|| labeled_a_free(black_box(n), &k3).unwrap()));
    }
    g.finish();
    par::set_parallel(true);
}

fn hosts(c: &mut Criterion) {
    let k4 = Graph::complete(4);
    let mut g = c.benchmark_group("enumerate_a_free");
    g.sample_size(10);
    for (name, on) in MODES {
        par::set_parallel(on);
        g.bench_with_input(BenchmarkId::new(name, 7), &7usize, |b, &m| b.iter(|| enumerate_a_free(black_box(m), &k4).unwrap()));
    }
    g.finish();
    par::set_parallel(true);
}

fn table(c: &mut Criterion) {
    let k3 = Graph::complete(3);
    let flags = enumerate_flags(&IntersectionType::vertex(), 3, &k3).unwrap();
    let hs = enumerate_a_free(6, &k3).unwrap();
    let mut g = c.benchmark_group("pair_density_table");
    g.sample_size(10);
    for (name, on) in MODES {
        par::set_parallel(on);
        g.bench_function(name, |b| b.iter(|| pair_density_table(black_box(&flags), &hs).unwrap()));
    }
    g.finish();
    par::set_parallel(true);
}

fn mantel_check(c: &mut Criterion) {
    let mut g = c.benchmark_group("mantel_sos_check");
    g.sample_size(10);
    for (name, on) in MODES {
        par::set_parallel(on);
        g.bench_with_input(BenchmarkId::new(name, 5), &5usize, |b, &n| b.iter(|| verify_mantel_flag_sos(black_box(n)).unwrap()));
    }
    g.finish();
    par::set_parallel(true);
}

criterion_group!(benches, zero_set, hosts, table, mantel_check);
criterion_main!(benches);
