use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use cyclotomo::crossratio::enumerate_cross_ratio_set;
use cyclotomo::dirsearch::max_admissible_set;
use cyclotomo::{CycNum, FieldTag};

fn cyc_mul(c: &mut Criterion) {
    let a = CycNum::from_int_coeffs(24, &[3, -1, 4, 1, -5, 9, 2, -6]).unwrap();
    let b = CycNum::from_int_coeffs(24, &[2, 7, -1, 8, 2, -8, 1, 8]).unwrap();
    c.bench_function("cycnum mul m=24", |bch| bch.iter(|| black_box(&a) * black_box(&b)));
}

fn cross_ratio_sets(c: &mut Criterion) {
    let mut g = c.benchmark_group("cross-ratio set");
    for n in [5u32, 8, 12] {
        let tag = FieldTag::new(n).unwrap();
        g.bench_function(format!("n={n}"), |bch| {
            bch.iter(|| enumerate_cross_ratio_set(black_box(tag)))
        });
    }
    g.finish();
}

fn bound_search(c: &mut Criterion) {
    let mut g = c.benchmark_group("bound search");
    g.sample_size(10);
    for n in [5u32, 8, 12] {
        let set = enumerate_cross_ratio_set(FieldTag::new(n).unwrap());
        g.bench_function(format!("n={n}"), |bch| {
            bch.iter(|| max_admissible_set(&set, Some(Duration::from_secs(60)), false).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, cyc_mul, cross_ratio_sets, bound_search);
criterion_main!(benches);
