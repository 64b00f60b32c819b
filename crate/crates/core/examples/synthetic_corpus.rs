//! Generate a seeded synthetic corpus for pipeline demos and fixtures.
//!
//! Usage: synthetic_corpus <out_dir> [n_pairs] [n_per_class] [seed]

use deteval_core::corpus::{write_pairs, write_samples};
use deteval_core::synthetic::{generate_pairs, generate_samples};

fn main() {
    let mut args = std::env::args().skip(1);
    let out_dir = std::path::PathBuf::from(args.next().unwrap_or_else(|| "fixtures".into()));
    let n_pairs: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let n_per_class: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(50);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(42);

    std::fs::create_dir_all(&out_dir).expect("create output dir");
    let pairs = generate_pairs(n_pairs, seed);
    write_pairs(&out_dir.join(format!("pairs_{n_pairs}.jsonl")), &pairs).expect("write pairs");
    let samples = generate_samples(n_per_class, seed);
    write_samples(
        &out_dir.join(format!("samples_{}.jsonl", n_per_class * 2)),
        &samples,
    )
    .expect("write samples");
    println!(
        "wrote {} pairs and {} samples to {}",
        pairs.len(),
        samples.len(),
        out_dir.display()
    );
}
