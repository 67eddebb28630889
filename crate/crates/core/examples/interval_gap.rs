//! The interval bound can be far from optimal: on the gap family it stays at
//! 2 while the optimum grows with `C`.
//!
//!     cargo run --release --example interval_gap

use ecfs::adversaries::gap_instance;
use ecfs::bounds::{interval_lower_bound, oracle_optimal, Objective, OracleConfig};
use ecfs::rational::Frac;

fn main() {
    for c in 2..=3u64 {
        let inst = gap_instance(c).unwrap();
        let l = interval_lower_bound(&inst);
        let cfg = OracleConfig::new(Objective::MaxResponse, true)
            .budget(10_000_000)
            .horizon(2 * c * c);
        let opt = oracle_optimal(&inst, &cfg).unwrap();
        println!(
            "C={c} jobs={} L={} optimum={} explored={}",
            inst.job_count(),
            Frac(&l.value),
            Frac(&opt.value),
            opt.explored
        );
    }
}
