//! Exact-solver integrity: the sphere decoder returns the brute-force
//! minimum while expanding a fraction of the search tree.
//!
//! ```bash
//! cargo run --release --example sphere_vs_brute
//! ```

use vecoder::alphabet::{Alphabet, AlphabetKind, DataPrior};
use vecoder::montecarlo::{
    gramian_inverse, precode_exact, precode_sphere_counted, sample_channel, sample_rng,
};

fn main() {
    println!(
        "{:>5} {:>3} {:>3} {:>14} {:>14} {:>10} {:>10}",
        "inst", "k", "L", "brute e", "sphere e", "nodes", "full tree"
    );
    let mut worst_gap: f64 = 0.0;
    let mut total_nodes = 0u64;
    let mut total_full = 0u64;
    for i in 0..12u64 {
        let k = 4 + (i as usize % 5);
        let l = 1 + (i as usize % 3);
        let a = Alphabet::new(AlphabetKind::OneDimLattice, l).unwrap();
        let prior = DataPrior::uniform(&a);
        let mut rng = sample_rng(2024, i);
        let j = loop {
            let h = sample_channel(k, 2 * k, &mut rng);
            if let Ok(j) = gramian_inverse(&h) {
                break j;
            }
        };
        let s: Vec<u8> = (0..k)
            .map(|_| prior.sample(rand::Rng::gen(&mut rng)))
            .collect();
        let (_, e_brute) = precode_exact(&j, &s, &a).unwrap();
        let (_, e_sphere, nodes) = precode_sphere_counted(&j, &s, &a).unwrap();
        let full = (l as u64).pow(k as u32);
        worst_gap = worst_gap.max((e_brute - e_sphere).abs());
        total_nodes += nodes;
        total_full += full;
        println!("{i:>5} {k:>3} {l:>3} {e_brute:>14.8} {e_sphere:>14.8} {nodes:>10} {full:>10}");
    }
    println!();
    println!("worst |brute - sphere| energy gap: {worst_gap:.2e}");
    println!(
        "tree nodes expanded: {total_nodes} of {total_full} ({:.1}%)",
        100.0 * total_nodes as f64 / total_full as f64
    );

    // A size no one would enumerate by hand still terminates instantly.
    let a = Alphabet::new(AlphabetKind::OneDimLattice, 2).unwrap();
    let k = 20;
    let mut rng = sample_rng(5, 0);
    let j = gramian_inverse(&sample_channel(k, 2 * k, &mut rng)).unwrap();
    let s: Vec<u8> = (0..k).map(|i| (i % 2) as u8).collect();
    let t0 = std::time::Instant::now();
    let (_, e, nodes) = precode_sphere_counted(&j, &s, &a).unwrap();
    println!();
    println!(
        "k = {k}, L = 2: energy {e:.6}, {nodes} nodes of {} in {:?}",
        2u64.pow(k as u32),
        t0.elapsed()
    );
}
