use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tropimeas::bridge::gamma_grid;
use tropimeas::{gamma_to_delta, hat_d, oracle_sup, sample};

fn closed_form(c: &mut Criterion) {
    let mut group = c.benchmark_group("hat_d");
    for points in [4, 16, 64] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (space, _) = sample::grid_space(&mut rng, points, 16);
        let (mu, nu) = (sample::measure(&mut rng, &space), sample::measure(&mut rng, &space));
        group.bench_with_input(BenchmarkId::from_parameter(points), &(mu, nu), |b, (mu, nu)| {
            b.iter(|| hat_d(3, black_box(mu), black_box(nu)).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_sup");
    group.sample_size(10);
    for points in [2, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (space, _) = sample::grid_space(&mut rng, points, 4);
        let (mu, nu) = (sample::measure(&mut rng, &space), sample::measure(&mut rng, &space));
        group.bench_with_input(BenchmarkId::from_parameter(points), &(mu, nu), |b, (mu, nu)| {
            b.iter(|| oracle_sup(2, black_box(mu), black_box(nu), 0.01).unwrap())
        });
    }
    group.finish();
}

fn bridge(c: &mut Criterion) {
    let grid = gamma_grid(4, 15);
    c.bench_function("gamma_to_delta/grid4x15", |b| {
        b.iter(|| grid.iter().map(|g| gamma_to_delta(black_box(g)).p[0]).sum::<f64>())
    });
}

criterion_group!(benches, closed_form, oracle, bridge);
criterion_main!(benches);
