use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use flagdegen_core::degenverify::plucker::Plucker;
use flagdegen_core::degenverify::typeb::verify_essential_b;
use flagdegen_core::pipedream::perm_of_subset;
use flagdegen_core::polytope_c::lattice_points_c;
use flagdegen_core::{LieType, OSet, PosetElement, PosetP, Realization, WeightC};

fn pipes(c: &mut Criterion) {
    let p = PosetP::build(3).unwrap();
    let m =
        [(1, 1), (1, 3), (1, -2), (2, 2), (2, 3), (3, -3)].map(|(i, j)| PosetElement::new(i, j));
    let mask = p.mask_of(&m).unwrap();
    c.bench_function("pipe_dream_n3", |b| {
        b.iter(|| perm_of_subset(&p, black_box(mask)))
    });
}

fn lattice_points(c: &mut Criterion) {
    let p = PosetP::build(3).unwrap();
    let o = OSet::gt(&p, false);
    let w = WeightC::new(vec![1, 1, 1]);
    c.bench_function("lattice_points_c_n3_rho", |b| {
        b.iter(|| lattice_points_c(&p, &o, black_box(&w)).unwrap())
    });
}

fn groebner(c: &mut Criterion) {
    let p = PosetP::build(2).unwrap();
    let pl = Plucker::new(2);
    let mut g = c.benchmark_group("groebner");
    g.sample_size(10);
    g.bench_function("tilde_kernel_n2", |b| b.iter(|| pl.tilde_i(black_box(&p))));
    g.bench_function("plucker_kernel_n2", |b| b.iter(|| pl.i_a()));
    g.finish();
}

fn essential(c: &mut Criterion) {
    let p = PosetP::build(2).unwrap();
    let real = Realization::new(LieType::B, 2).unwrap();
    let o = OSet::gt(&p, true);
    let mut g = c.benchmark_group("essential");
    g.sample_size(10);
    g.bench_function("so5_omega1_plus_omega2", |b| {
        b.iter(|| verify_essential_b(&real, &p, &o, black_box(&[1, 1])).unwrap())
    });
    g.finish();
}

criterion_group!(benches, pipes, lattice_points, groebner, essential);
criterion_main!(benches);
