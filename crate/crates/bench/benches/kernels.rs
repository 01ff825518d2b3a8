use criterion::{black_box, criterion_group, criterion_main, Criterion};

use spherelp::certify::{build_600cell_certificate, build_sharp_certificate};
use spherelp::config::{self, energy};
use spherelp::descent::{self, DescentRun};
use spherelp::exactfield::rat_int;
use spherelp::lpnum::{self, LpProblem};
use spherelp::{Kernel, Potential};

fn kernels(c: &mut Criterion) {
    c.bench_function("gegenbauer basis n=4 d=31", |b| b.iter(|| Kernel::sphere(black_box(4)).basis(31)));
    c.bench_function("jacobi basis (1,0) d=12", |b| {
        let k = Kernel::jacobi(rat_int(1), rat_int(0));
        b.iter(|| black_box(&k).basis(12))
    });
}

fn certificates(c: &mut Criterion) {
    let ico = config::icosahedron();
    let f = Potential::parse("inv:1").unwrap();
    c.bench_function("sharp certificate icosahedron exact", |b| b.iter(|| build_sharp_certificate(black_box(&ico), &f).unwrap()));
    let mut g = c.benchmark_group("cell600");
    g.sample_size(10);
    g.bench_function("certificate pow4:17", |b| b.iter(|| build_600cell_certificate(black_box(17)).unwrap()));
    let cell = config::cell600();
    g.bench_function("energy exact pow4:8", |b| b.iter(|| energy(black_box(&cell), &Potential::TruncatedPower(8)).unwrap()));
    g.finish();
}

fn numerics(c: &mut Criterion) {
    let p = LpProblem::sphere(3, 20, Potential::parse("inv:0.5").unwrap(), 6, 200).unwrap();
    c.bench_function("lp solve N=20 d=6 grid=200", |b| b.iter(|| lpnum::solve(black_box(&p)).unwrap()));
    let run = DescentRun::random(4, 24, Potential::parse("inv:1").unwrap(), 1).unwrap();
    let mut g = c.benchmark_group("descent");
    g.sample_size(10);
    g.bench_function("24 points on S^3", |b| b.iter(|| descent::minimize(black_box(&run)).unwrap()));
    g.finish();
}

criterion_group!(benches, kernels, certificates, numerics);
criterion_main!(benches);
