//! Max versus average response: each of Proportional Allocation and SJF
//! fails one objective on a dedicated family, and the hybrid keeps the
//! max-response guarantee.
//!
//!     cargo run --example simultaneous

use ecfs::adversaries::{propalloc_avg_instance, propalloc_avg_reference, sjf_max_instance};
use ecfs::bounds::interval_lower_bound;
use ecfs::metrics::response_summary;
use ecfs::rational::{ceil_u64, int, Frac};
use ecfs::schedulers::{
    Hybrid, HybridParams, PropAllocParams, ProportionalAllocation, ShortestJobFirst, SjfParams,
};
use ecfs::sim::{simulate_instance, Scheduler};

fn main() {
    for k in [5u64, 10] {
        let inst = propalloc_avg_instance(k).unwrap();
        let reference = response_summary(&inst, &propalloc_avg_reference(k), &[]).unwrap();
        let pa = ProportionalAllocation::new(PropAllocParams::new(int(0)).unwrap());
        let pa = simulate_instance(&inst, pa, int(1), None).unwrap();
        let pa = response_summary(&inst, &pa.schedule, &[]).unwrap();
        let hy = Hybrid::new(HybridParams::new(int(1), int(1)).unwrap());
        let aug = hy.augmentation();
        let hy = simulate_instance(&inst, hy, aug, None).unwrap();
        let hy = response_summary(&inst, &hy.schedule, &[]).unwrap();
        println!(
            "propalloc-avg k={k}: reference sum {} | propalloc sum {} | hybrid sum {} max {} (L/eps1 bound {})",
            reference.total_response(),
            pa.total_response(),
            hy.total_response(),
            hy.max_response,
            ceil_u64(&interval_lower_bound(&inst).value)
        );
    }

    let t = 20;
    let (inst, reference) = sjf_max_instance(t).unwrap();
    let reference = response_summary(&inst, &reference, &[]).unwrap();
    let sjf = ShortestJobFirst::new(SjfParams::new(int(0)).unwrap());
    let out = simulate_instance(&inst, sjf, int(2), None).unwrap();
    let first = out.schedule.by_job()[&0][0].round;
    let sjf = response_summary(&inst, &out.schedule, &[]).unwrap();
    println!(
        "sjf-max T={t}: reference max {} | sjf max {} (j* first runs in round {first}) | avg {}",
        reference.max_response,
        sjf.max_response,
        Frac(&sjf.avg_response)
    );
}
