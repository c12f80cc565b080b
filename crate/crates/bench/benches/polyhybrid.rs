use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use polyhybrid::discrepancy::star_discrepancy_exact;
use polyhybrid::gfpoly::laurent_expand;
use polyhybrid::search::{hybrid_point_set, search_exhaustive, search_korobov};
use polyhybrid::{hybrid_bound_certificate, HaltonConfig, LatticeConfig, Poly, PrimeModulus};

fn setup() -> (PrimeModulus, Poly, HaltonConfig, LatticeConfig) {
    let p = PrimeModulus::new(2).unwrap();
    let px = Poly::parse("X^8+X^4+X^3+X+1", p).unwrap();
    let halton = HaltonConfig::new(p, vec![Poly::x(p)]).unwrap();
    let lattice = LatticeConfig::new(px.clone(), vec![Poly::parse("X^7+X^5+X^2+1", p).unwrap()]).unwrap();
    (p, px, halton, lattice)
}

fn laurent(c: &mut Criterion) {
    let (p, px, _, _) = setup();
    let q = Poly::parse("X^7+X^5+X^2+1", p).unwrap();
    c.bench_function("laurent_expand deg 8, 64 digits", |b| {
        b.iter(|| laurent_expand(black_box(&q), black_box(&px), 64).unwrap())
    });
}

fn exact(c: &mut Criterion) {
    let (_, _, halton, lattice) = setup();
    let set = hybrid_point_set(&halton, &lattice).unwrap();
    c.bench_function("exact D* 3-d, N=256", |b| b.iter(|| star_discrepancy_exact(black_box(&set)).unwrap()));
}

fn certificate(c: &mut Criterion) {
    let (_, _, halton, lattice) = setup();
    c.bench_function("certificate m=8", |b| {
        b.iter(|| hybrid_bound_certificate(8, black_box(&halton), black_box(&lattice)).unwrap())
    });
}

fn search(c: &mut Criterion) {
    let p = PrimeModulus::new(2).unwrap();
    let px = Poly::parse("X^5+X^2+1", p).unwrap();
    let halton = HaltonConfig::new(p, vec![Poly::x(p)]).unwrap();
    let mut group = c.benchmark_group("search m=5");
    group.sample_size(10);
    group.bench_function("exhaustive t=2", |b| b.iter(|| search_exhaustive(5, 2, &halton, &px).unwrap()));
    group.bench_function("korobov t=3", |b| b.iter(|| search_korobov(5, 3, &halton, &px).unwrap()));
    group.finish();
}

criterion_group!(benches, laurent, exact, certificate, search);
criterion_main!(benches);
