use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use monotone_delta::scenario::{generate_unidimensional, SyntheticSpec};
use monotone_delta::{build_tournament, is_parallel, local_search, SearchParams};
use rayon::ThreadPoolBuilder;

// Compares the default pool against a single worker. Building with
// `--no-default-features` swaps in the plain sequential code path.
fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let all = rayon::current_num_threads();
    let mut out = vec![(
        "1-thread".to_string(),
        ThreadPoolBuilder::new().num_threads(1).build().unwrap(),
    )];
    if is_parallel() && all > 1 {
        out.push((
            format!("{all}-threads"),
            ThreadPoolBuilder::new().num_threads(all).build().unwrap(),
        ));
    }
    out
}

fn tournament(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_tournament");
    for n in [350, 1000] {
        let m = generate_unidimensional(&SyntheticSpec::equal_loadings(n, 15, 0.8, 0.6, Some(5), 1))
            .unwrap();
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(name, n), &m, |b, m| {
                pool.install(|| b.iter(|| build_tournament(m)))
            });
        }
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_search");
    group.sample_size(10);
    for n in [100, 350] {
        let m = generate_unidimensional(&SyntheticSpec::equal_loadings(n, 15, 0.8, 0.6, Some(5), 2))
            .unwrap();
        let t = build_tournament(&m);
        let params = SearchParams::with_seed(3);
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(name, n), &t, |b, t| {
                pool.install(|| b.iter(|| local_search(t, &params).unwrap()))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, tournament, search);
criterion_main!(benches);
