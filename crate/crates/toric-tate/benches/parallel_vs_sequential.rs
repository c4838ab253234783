use criterion::{criterion_group, criterion_main, Criterion};
use toric_tate::cohomology::cohomology_table_fast;
use toric_tate::diagonal::{build_f_prime_weighted, check_acyclicity, BiWindow};
use toric_tate::linalg::PrimeField;
use toric_tate::par;
use toric_tate::smodule::Presentation;
use toric_tate::toric::{Degree, ToricStack, Window};

fn cohomology(c: &mut Criterion) {
    let k = PrimeField::default();
    let x = ToricStack::weighted_projective(&[1, 1, 2]).unwrap();
    let pres = Presentation::free(vec![Degree::zero(1)]);
    let w = Window::interval(-10, 10);
    let mut g = c.benchmark_group("cohomology_table P(1,1,2)");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| cohomology_table_fast(&k, &x, &pres, &w, None).unwrap()));
    g.bench_function("sequential", |b| b.iter(|| par::sequential(|| cohomology_table_fast(&k, &x, &pres, &w, None).unwrap())));
    g.finish();
}

fn acyclicity(c: &mut Criterion) {
    let k = PrimeField::default();
    let x = ToricStack::weighted_projective(&[1, 2]).unwrap();
    let f = build_f_prime_weighted(&k, &x).unwrap();
    let win = BiWindow::square(Window::interval(0, 8));
    let mut g = c.benchmark_group("diagonal acyclicity P(1,2)");
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(|| check_acyclicity(&f, &win)));
    g.bench_function("sequential", |b| b.iter(|| par::sequential(|| check_acyclicity(&f, &win))));
    g.finish();
}

criterion_group!(benches, cohomology, acyclicity);
criterion_main!(benches);
