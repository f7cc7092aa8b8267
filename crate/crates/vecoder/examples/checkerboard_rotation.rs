//! Checkerboard precoding of binary data in the complex plane.
//!
//! The checkerboard classes satisfy `B1 = j B0` and are a 45-degree-rotated,
//! 1/sqrt(2)-scaled copy of a quadrature quadrant pair. Because the complex
//! Gaussian kernel of the fixed-point equations is rotation invariant, the
//! checkerboard needs exactly half the energy per symbol of quadrature
//! precoding and the same energy per bit.
//!
//! ```bash
//! cargo run --release --example checkerboard_rotation
//! ```

use vecoder::alphabet::{default_magnitudes, Alphabet, AlphabetKind, DataPrior};
use vecoder::replica::{solve_general, solve_quadrature, FixedPointConfig};
use vecoder::rmt::RTransformSpec;

fn main() {
    let l = 2;
    let cb = Alphabet::new(AlphabetKind::CheckerboardLattice, l).unwrap();
    println!("checkerboard point sets at L = {l}:");
    for s in cb.symbols() {
        let pts: Vec<String> = cb
            .enumerate_points(s)
            .unwrap()
            .iter()
            .map(|p| format!("{:+.2}{:+.2}j", p.re, p.im))
            .collect();
        println!("  B{s} = {{ {} }}", pts.join(", "));
    }
    println!();

    let cfg = FixedPointConfig::default();
    println!(
        "{:>7} {:>6} {:>14} {:>14} {:>12}",
        "alpha", "L", "es checkerboard", "es quadrature", "eb gap"
    );
    for &alpha in &[0.25, 0.5, 1.0, 1.5] {
        for l in [2usize, 6] {
            let a = Alphabet::new(AlphabetKind::CheckerboardLattice, l).unwrap();
            let spec = RTransformSpec::InverseGramian { alpha };
            let cb = solve_general(&spec, &a, &DataPrior::uniform(&a), &cfg).unwrap();
            let quad = solve_quadrature(alpha, &default_magnitudes(l), &cfg).unwrap();
            let (es_cb, es_q) = (cb.es.unwrap(), quad.es.unwrap());
            let gap = (cb.eb.unwrap() - quad.eb.unwrap()).abs() / quad.eb.unwrap();
            println!("{alpha:>7.2} {l:>6} {es_cb:>14.6} {es_q:>14.6} {gap:>12.2e}");
        }
    }
    println!();
    println!("the checkerboard column is half the quadrature column throughout,");
    println!("so the energy per bit (1 bit vs 2 bits per symbol) coincides.");
}
