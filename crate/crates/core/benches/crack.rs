//! Dictionary crack throughput: sequential scan against the rayon search.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use wsim_core::attacks::crack_dictionary_sequential;
use wsim_core::scenario::bundled;

fn wordlist(len: usize) -> Vec<String> {
    let mut words: Vec<String> = (1..len).map(|i| format!("candidate{i:06}")).collect();
    words.push("12345678".into());
    words
}

fn crack(c: &mut Criterion) {
    let world = bundled("paper_experiment").unwrap().simulate(None).unwrap();
    let hs = world.handshake().cloned().expect("fixture captures a handshake");

    let mut group = c.benchmark_group("crack");
    group.sample_size(10);
    for len in [64usize, 256] {
        let words = wordlist(len);
        group.throughput(Throughput::Elements(len as u64));
        group.bench_with_input(BenchmarkId::new("sequential", len), &words, |b, w| {
            b.iter(|| crack_dictionary_sequential(&hs, w))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", len), &words, |b, w| {
            b.iter(|| wsim_core::attacks::crack_dictionary_parallel(&hs, w))
        });
    }
    group.finish();
}

criterion_group!(benches, crack);
criterion_main!(benches);
