use clap::Parser;

use vecoder::cli::{run, Cli};

fn main() {
    // VECODER_THREADS caps internal parallelism (sweeps, sample loops).
    if let Ok(threads) = std::env::var("VECODER_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    std::process::exit(run(cli));
}
