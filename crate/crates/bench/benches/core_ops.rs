//! Criterion benchmarks for the hot paths: field arithmetic, patch
//! generation, grid decomposition, and window separation.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use cycloto_core::grid::{build_grid, decompose};
use cycloto_core::modelset::{ModelSetSpec, Preset};
use cycloto_core::separation::separate;
use cycloto_core::xray::Direction;
use cycloto_core::{CycNum, Rat, XRayInstance};

fn rat(p: i64, q: i64) -> Rat {
    Rat::new(p.into(), q.into())
}

fn sample(n: u32, shift: i64) -> CycNum {
    let d = cycloto_core::cyclotomic::phi(n) as usize;
    CycNum::from_poly(
        n,
        (0..d as i64).map(|k| rat(3 * k + shift + 1, k + 2)).collect(),
    )
}

fn bench_cyclotomic(c: &mut Criterion) {
    let mut g = c.benchmark_group("cyclotomic");
    for n in [8u32, 12, 16, 24] {
        let x = sample(n, 1);
        let y = sample(n, 5);
        g.bench_function(format!("mul_n{n}"), |b| b.iter(|| &x * &y));
        g.bench_function(format!("inverse_n{n}"), |b| b.iter(|| x.inverse().unwrap()));
    }
    g.finish();
}

fn bench_generate(c: &mut Criterion) {
    let mut g = c.benchmark_group("generate_patch");
    g.sample_size(10);
    let spec = ModelSetSpec::from_preset(Preset::AmmannBeenker);
    for r in [3i64, 5] {
        let radius = rat(r, 1);
        g.bench_function(format!("ammann_beenker_r{r}"), |b| {
            b.iter(|| spec.generate_patch(&radius))
        });
    }
    g.finish();
}

fn ab_instance(radius: i64) -> XRayInstance {
    let spec = ModelSetSpec::from_preset(Preset::AmmannBeenker);
    let patch = spec.generate_patch(&rat(radius, 1));
    let dirs = [
        Direction::new(CycNum::from_int_coeffs(8, &[1, 0, 0, 0])).unwrap(),
        Direction::new(CycNum::from_int_coeffs(8, &[0, 1, 0, 0])).unwrap(),
    ];
    XRayInstance::from_points(spec, &dirs, &patch.points).unwrap()
}

fn bench_decompose(c: &mut Criterion) {
    let mut g = c.benchmark_group("grid");
    g.sample_size(10);
    let inst = ab_instance(4);
    g.bench_function("build_and_decompose_ab_r4", |b| {
        b.iter_batched(
            || build_grid(&inst),
            |grid| decompose(&grid),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

fn bench_separate(c: &mut Criterion) {
    let mut g = c.benchmark_group("separation");
    g.sample_size(10);
    let inst = ab_instance(3);
    let grid = build_grid(&inst);
    let class = &decompose(&grid).classes[0];
    let stars: Vec<_> = class
        .iter()
        .map(|p| inst.spec.star_point(&p.position))
        .collect();
    g.bench_function(format!("ab_class_of_{}", stars.len()), |b| {
        b.iter(|| separate(&inst.spec.window, &stars))
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_cyclotomic,
    bench_generate,
    bench_decompose,
    bench_separate
);
criterion_main!(benches);
