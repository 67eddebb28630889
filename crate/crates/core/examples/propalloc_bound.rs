//! Proportional Allocation against its `ceil(L / eps)` guarantee on a seeded
//! random corpus.
//!
//!     cargo run --example propalloc_bound

use ecfs::bounds::interval_lower_bound;
use ecfs::generate::{corpus, RandomSpec};
use ecfs::metrics::response_summary;
use ecfs::rational::{ceil_u64, ratio, Frac};
use ecfs::schedulers::{PropAllocParams, ProportionalAllocation};
use ecfs::sim::{simulate_instance, Scheduler};

fn main() {
    let spec = RandomSpec {
        nodes: 2..=6,
        jobs: 1..=30,
        max_demand: 3,
        max_capacity: 3,
        max_release: 10,
    };
    let instances = corpus(2024, 10, &spec);
    println!(
        "{:>4} {:>6} {:>4} {:>6} {:>5}",
        "inst", "eps", "L", "bound", "max"
    );
    for eps in [ratio(1, 2), ratio(1, 1), ratio(2, 1)] {
        for (n, inst) in instances.iter().enumerate() {
            let alg = ProportionalAllocation::new(PropAllocParams::new(eps.clone()).unwrap());
            let aug = alg.augmentation();
            let out = simulate_instance(inst, alg, aug, None).expect("simulation finishes");
            let max = response_summary(inst, &out.schedule, &[]).unwrap().max_response;
            let l = interval_lower_bound(inst).value;
            let bound = ceil_u64(&(&l / &eps));
            println!(
                "{n:>4} {:>6} {:>4} {bound:>6} {max:>5}",
                Frac(&eps).to_string(),
                Frac(&l).to_string()
            );
            assert!(max <= bound);
        }
    }
}
