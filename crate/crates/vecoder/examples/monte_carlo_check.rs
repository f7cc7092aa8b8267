//! Desk-scale validation: exact minimization on sampled channels against
//! the large-system replica prediction.
//!
//! ```bash
//! cargo run --release --example monte_carlo_check
//! ```

use vecoder::alphabet::{default_magnitudes, Alphabet, AlphabetKind, DataPrior};
use vecoder::montecarlo::{run_experiment, ChannelConfig, SolverChoice};
use vecoder::replica::{solve_kind, FixedPointConfig, SolverKind};

fn main() {
    let cfg = FixedPointConfig::default();
    println!("inverted channel at alpha = 1/2, 200 realizations per row");
    println!(
        "{:>4} {:>4} {:>4} {:>12} {:>10} {:>12} {:>8}",
        "L", "k", "n", "empirical", "stderr", "replica", "ratio"
    );
    for l in [1usize, 2] {
        for (k, n) in [(4usize, 8usize), (8, 16), (12, 24)] {
            let mags = default_magnitudes(l);
            let alphabet =
                Alphabet::with_magnitudes(AlphabetKind::OneDimLattice, mags.clone()).unwrap();
            let replica = solve_kind(SolverKind::OneDim, 0.5, &mags, &cfg).unwrap();
            let channel = ChannelConfig {
                k,
                n,
                samples: 200,
                seed: 42,
                solver: SolverChoice::Auto,
            };
            let sim = run_experiment(
                &channel,
                &alphabet,
                &DataPrior::uniform(&alphabet),
                Some(&replica),
            )
            .unwrap();
            let replica_es = replica.es.unwrap();
            println!(
                "{l:>4} {k:>4} {n:>4} {:>12.4} {:>10.4} {:>12.4} {:>8.3}",
                sim.mean_es,
                sim.stderr,
                replica_es,
                sim.mean_es / replica_es
            );
        }
    }
    println!();
    println!("the empirical mean approaches the replica value from above as the");
    println!("system grows; at k = 12 the finite-size gap is already inside a few");
    println!("standard errors.");
}
