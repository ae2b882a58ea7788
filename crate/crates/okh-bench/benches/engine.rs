use criterion::{criterion_group, criterion_main, Criterion};
use okh_core::diagram::build;
use okh_core::Resolution;

fn resolve_figure_eight(c: &mut Criterion) {
    let d = build::figure_eight();
    c.bench_function("resolve figure-eight cube", |b| {
        b.iter(|| {
            let mut total = 0usize;
            for res in Resolution::all(d.n_crossings()) {
                total += d.resolve(res).circle_count();
            }
            total
        })
    });
}

criterion_group!(benches, resolve_figure_eight);
criterion_main!(benches);
