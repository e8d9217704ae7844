//! Timing probe for the dense eigenphase pipeline.
//!
//! Run:
//!   cargo run --release -p ubm --example eigbench

use std::time::Instant;
use ubm::model::{Coefficients, PhaseModel, SiteInterval};
use ubm::spectrum::{pooled_eigenphases, truncate, truncate_free};

fn main() {
    let p = Coefficients::<f64>::balanced();
    for n in [200i64, 500, 1000] {
        let phases = PhaseModel::<f64>::uniform()
            .sample(SiteInterval::new(0, n + 1).unwrap(), 7)
            .unwrap();
        let block = truncate(p, &phases, 0, n).unwrap();
        let t0 = Instant::now();
        let m = block.eigenphases().unwrap();
        println!("random block n={n}: {} eigenphases in {:?}", m.len(), t0.elapsed());
    }

    let block = truncate_free::<f64>(p, 0, 2000).unwrap();
    let t0 = Instant::now();
    let m = block.eigenphases().unwrap();
    println!("free block n=2000: {} eigenphases in {:?}", m.len(), t0.elapsed());

    let t0 = Instant::now();
    let pool = pooled_eigenphases(&PhaseModel::<f64>::uniform(), p, 0, 500, 16, 1).unwrap();
    println!(
        "pool 16×500: {} atoms in {:?}, KS to uniform {:.5}",
        pool.len(),
        t0.elapsed(),
        pool.ks_uniform()
    );
}
