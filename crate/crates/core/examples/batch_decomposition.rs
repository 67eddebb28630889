//! Batch Decomposition on a unit instance: the waiting batch is split into
//! 2-factors whenever the previous batch is used up.
//!
//!     cargo run --example batch_decomposition

use ecfs::bounds::interval_lower_bound;
use ecfs::metrics::response_summary;
use ecfs::model::{Instance, JobSpec};
use ecfs::rational::{int, Frac};
use ecfs::schedulers::{BatchDecomposition, BatchParams};
use ecfs::sim::simulate_instance;
use ecfs::validate::validate_schedule;

fn main() {
    // a 5-cycle plus a chord, released in two waves
    let mut jobs = Vec::new();
    for r in [1, 3] {
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)] {
            jobs.push(JobSpec::unit(u, v, r));
        }
    }
    let inst = Instance::unit_nodes(5, jobs).unwrap();
    let l = interval_lower_bound(&inst).value;

    for k in [1, 2] {
        let alg = BatchDecomposition::new(BatchParams::new(k).unwrap());
        let aug = int(2 * k as i64);
        let out = simulate_instance(&inst, alg, aug.clone(), None).unwrap();
        assert!(validate_schedule(&inst, &out.schedule, &aug).is_valid());
        let m = response_summary(&inst, &out.schedule, &[]).unwrap();
        println!(
            "k={k} L={} max_response={} makespan={}",
            Frac(&l),
            m.max_response,
            m.makespan
        );
        for rec in &out.history {
            let ids: Vec<String> = rec.assignments.iter().map(|(j, _)| j.to_string()).collect();
            println!("  round {:>2}: {}", rec.round, ids.join(" "));
        }
    }
}
