//! FIFO maximal matching under `(2 + k)` capacity versus its unaugmented
//! variant on a star that overloads the hub.
//!
//!     cargo run --example fifo_matching

use ecfs::bounds::interval_lower_bound;
use ecfs::metrics::response_summary;
use ecfs::model::{Instance, JobSpec};
use ecfs::rational::{int, Frac};
use ecfs::schedulers::{FifoMatching, FifoParams};
use ecfs::sim::{simulate_instance, Scheduler};

fn main() {
    let jobs = (0..12)
        .map(|i| JobSpec::unit(0, 1 + i % 4, 1 + i as u64 / 3))
        .collect();
    let inst = Instance::unit_nodes(5, jobs).unwrap();
    println!("L = {}", Frac(&interval_lower_bound(&inst).value));

    let runs: Vec<(FifoMatching, _)> = vec![
        (FifoMatching::new(FifoParams::new(1).unwrap()), int(3)),
        (FifoMatching::new(FifoParams::new(2).unwrap()), int(4)),
        (FifoMatching::unaugmented(), int(1)),
    ];
    for (alg, aug) in runs {
        let label = format!("{}({})", alg.name(), alg.params());
        let out = simulate_instance(&inst, alg, aug, None).unwrap();
        let m = response_summary(&inst, &out.schedule, &[]).unwrap();
        println!(
            "{label:<16} max_response={:>2} avg={}",
            m.max_response,
            Frac(&m.avg_response)
        );
    }
}
