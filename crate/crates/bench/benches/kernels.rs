use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ttround::dense::{gaussian_matrix, matmul, qr, svd};

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("dense");
    for (m, n) in [(900, 40), (1800, 100), (6000, 200)] {
        let a = gaussian_matrix(m, n, 1.0, 3);
        // Householder QR: 2 m n^2 - 2 n^3 / 3 for R, the same again for Q.
        let flops = 4.0 * (m * n * n) as f64 - 4.0 * (n * n * n) as f64 / 3.0;
        g.throughput(Throughput::Elements(flops as u64));
        g.bench_with_input(BenchmarkId::new("qr", format!("{m}x{n}")), &a, |b, a| {
            b.iter(|| qr(black_box(a)))
        });
        g.bench_with_input(BenchmarkId::new("svd", format!("{m}x{n}")), &a, |b, a| {
            b.iter(|| svd(black_box(a)))
        });
        let bt = gaussian_matrix(n, n, 1.0, 4);
        g.throughput(Throughput::Elements(2 * (m * n * n) as u64));
        g.bench_with_input(BenchmarkId::new("gemm", format!("{m}x{n}")), &a, |b, a| {
            b.iter(|| matmul(black_box(a), &bt))
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
