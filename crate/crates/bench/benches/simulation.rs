use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use predba_core::harness::sampling::{sample_config, InputPattern, Placement};
use predba_core::{library, predgen, run_scenario, theoretical_smoothness, Mode, Scenario, TrustParam};

fn wrapper_runs(c: &mut Criterion) {
    let alpha = TrustParam::from_fraction(4, 5).unwrap();
    let mut group = c.benchmark_group("wrapper");
    group.sample_size(20);
    for (mode, n) in [(Mode::NonAuth, 20), (Mode::NonAuth, 40), (Mode::Auth, 20), (Mode::Auth, 30)] {
        let f = theoretical_smoothness(mode, alpha, n, 2).unwrap();
        let config = sample_config(n, f, Placement::Random, InputPattern::SplitHalf, 7).unwrap();
        let prediction = predgen::balanced(&config, 2, 7).unwrap();
        for adversary in library() {
            let s = Scenario::wrapper(mode, alpha, config.clone(), prediction.clone(), adversary.clone(), 7);
            let id = BenchmarkId::new(format!("{mode}/{}", adversary.name()), n);
            group.bench_with_input(id, &s, |b, s| b.iter(|| run_scenario(black_box(s), false).unwrap()));
        }
    }
    group.finish();
}

fn curves(c: &mut Criterion) {
    let alpha = TrustParam::from_fraction(4, 5).unwrap();
    c.bench_function("smoothness curve n=1000", |b| {
        b.iter(|| (0..=1000).map(|e| theoretical_smoothness(Mode::NonAuth, alpha, black_box(1000), e).unwrap()).sum::<usize>())
    });
}

criterion_group!(benches, wrapper_runs, curves);
criterion_main!(benches);
