//! Energy per symbol for the inverted square channel (`alpha = 1`),
//! as a function of the lattice size L.
//!
//! ```bash
//! cargo run --release --example square_channel_table
//! ```

use vecoder::alphabet::default_magnitudes;
use vecoder::replica::{solve_square_1d, FixedPointConfig};

fn main() {
    let cfg = FixedPointConfig::default();
    println!("Inverted square channel: energy per symbol vs lattice size");
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "L", "E_s", "E_s [dB]", "iterations"
    );
    for l in [1usize, 2, 3, 4, 8, 16, 64] {
        let sol = solve_square_1d(&default_magnitudes(l), &cfg).expect("solver");
        match sol.es {
            Some(es) => println!(
                "{:>6} {:>12.6} {:>12.4} {:>12}",
                l,
                es,
                sol.es_db.unwrap(),
                sol.iterations
            ),
            None => println!(
                "{:>6} {:>12} {:>12} {:>12}",
                l, "inf", "inf", sol.iterations
            ),
        }
    }
    println!();
    println!("A single point per symbol (L = 1) leaves nothing to optimize and the");
    println!("inverted square channel needs infinite energy; two points already");
    println!("bring it down to ~2.694, and the gain saturates almost immediately.");
}
