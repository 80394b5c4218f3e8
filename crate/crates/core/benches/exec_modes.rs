use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use geostein::models::gsum::GsumCoupling;
use geostein::models::gw::{GwSpine, OffspringLaw};
use geostein::models::pa::{pa_mixture, PaCoupling};
use geostein::{Execution, Pmf, SeededRng};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn spine(c: &mut Criterion) {
    let off = OffspringLaw::new(Pmf::from_parts(0, vec![0.25, 0.5, 0.25], 0.0).unwrap()).unwrap();
    let s = GwSpine::new(&off, 8).unwrap();
    let rng = SeededRng::new(1);
    let mut g = c.benchmark_group("gw_spine_20k");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(s.samples(&rng, 20_000, 32, mode).unwrap()))
        });
    }
    g.finish();
}

fn pa_coupling(c: &mut Criterion) {
    let pc = PaCoupling::new(200, 4).unwrap();
    let rng = SeededRng::new(2);
    let mut g = c.benchmark_group("pa_coupling_20k");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(pc.samples(&rng, 20_000, 32, mode)))
        });
    }
    g.finish();
}

fn gsum_coupling(c: &mut Criterion) {
    let gc = GsumCoupling::new(&[Pmf::uniform(1, 3).unwrap()], 0.1).unwrap();
    let rng = SeededRng::new(3);
    let mut g = c.benchmark_group("gsum_coupling_50k");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(gc.samples(&rng, 50_000, 32, mode)))
        });
    }
    g.finish();
}

fn pa_mixture_law(c: &mut Criterion) {
    let mut g = c.benchmark_group("pa_mixture_n400");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(pa_mixture(400, mode).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, spine, pa_coupling, gsum_coupling, pa_mixture_law);
criterion_main!(benches);
