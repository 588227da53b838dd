use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use turbohedge_core::turbo::bcjr_decode;
use turbohedge_core::{
    decode_all, sas_sample, turbo_decode_pair, turbo_encode, AlphaStableParams, ChannelDensity,
    EpsilonRule, ExpertPool, HedgeState, RscSpec, TurboCodeConfig,
};

fn noisy_frame(cfg: &TurboCodeConfig, seed: u64) -> (Vec<bool>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<bool> = (0..cfg.k()).map(|_| rng.random()).collect();
    let frame = turbo_encode(cfg, &data).unwrap();
    let noise = AlphaStableParams::new(1.4, 0.1).unwrap();
    let mut samples = sas_sample(&noise, frame.symbols.len(), &mut rng).into_iter();
    let rx = frame
        .symbols
        .iter()
        .map(|&x| x + samples.next().unwrap())
        .collect();
    (data, rx)
}

fn bench_bcjr(c: &mut Criterion) {
    let spec = RscSpec::memory2_default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let k = 128;
    let n = k + spec.memory();
    let sys: Vec<f64> = (0..n).map(|_| rng.random_range(-8.0..8.0)).collect();
    let par: Vec<f64> = (0..n).map(|_| rng.random_range(-8.0..8.0)).collect();
    let prior = vec![0.0; k];
    c.bench_function("bcjr_k128", |b| {
        b.iter(|| bcjr_decode(&spec, black_box(&sys), black_box(&par), black_box(&prior)))
    });
}

fn bench_turbo_decode(c: &mut Criterion) {
    let cfg = TurboCodeConfig::paper_default(42);
    let (_, rx) = noisy_frame(&cfg, 2);
    let d = ChannelDensity::bcgm(1.4, 0.1, EpsilonRule::MeBcgmQuadratic).unwrap();
    c.bench_function("turbo_decode_pair_8it", |b| {
        b.iter(|| turbo_decode_pair(&cfg, &d, black_box(&rx), 8))
    });
}

fn bench_expert_bank(c: &mut Criterion) {
    let cfg = TurboCodeConfig::paper_default(42);
    let (_, rx) = noisy_frame(&cfg, 3);
    let pool = ExpertPool::default_pool(0.1).unwrap();
    c.bench_function("decode_all_6_experts", |b| {
        b.iter(|| decode_all(&pool, &cfg, black_box(&rx)))
    });
}

fn bench_sampler(c: &mut Criterion) {
    let p = AlphaStableParams::new(1.4, 1.0).unwrap();
    c.bench_function("sas_sample_10k", |b| {
        b.iter_batched(
            || ChaCha8Rng::seed_from_u64(4),
            |mut rng| sas_sample(&p, 10_000, &mut rng),
            criterion::BatchSize::SmallInput,
        )
    });
}

fn bench_hedge(c: &mut Criterion) {
    let losses = [0.1, 0.0, 0.3, 0.5, 0.2, 1.0];
    c.bench_function("hedge_update_and_normalize", |b| {
        b.iter_batched(
            || HedgeState::new(6, 0.9, 1.0, None).unwrap(),
            |mut s| {
                for _ in 0..100 {
                    s.update_weights(black_box(&losses)).unwrap();
                }
                s.normalized_weights()
            },
            criterion::BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_bcjr,
    bench_turbo_decode,
    bench_expert_bank,
    bench_sampler,
    bench_hedge
);
criterion_main!(benches);
