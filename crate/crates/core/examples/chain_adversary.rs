//! Drives schedulers against the adaptive chain adversary at capacity 1 and
//! reports the response time it forces.
//!
//!     cargo run --release --example chain_adversary [K] [C]

use ecfs::adversaries::chain::PhaseKind;
use ecfs::adversaries::run_adversary;
use ecfs::bounds::{oracle_optimal, Objective, OracleConfig};
use ecfs::rational::{int, Frac};
use ecfs::schedulers::{FifoMatching, PropAllocParams, ProportionalAllocation};
use ecfs::sim::Scheduler;

fn main() {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("integer argument"));
    let big_k = args.next().unwrap_or(1);
    let big_c = args.next().unwrap_or(1);

    let schedulers: Vec<Box<dyn Scheduler>> = vec![
        Box::new(FifoMatching::unaugmented()),
        Box::new(ProportionalAllocation::new(PropAllocParams::new(int(0)).unwrap())),
    ];
    for alg in schedulers {
        let trace = run_adversary(big_k, big_c, alg, int(1)).unwrap();
        println!(
            "{}({}): {} rounds, {} jobs, max_response {} (target {})",
            trace.scheduler,
            trace.params,
            trace.history.len(),
            trace.instance.job_count(),
            trace.max_response,
            big_k * big_c
        );
        for p in trace.phases.iter().filter(|p| p.kind == PhaseKind::Subroutine) {
            println!(
                "  k={} c={} rounds {}..={} returned node {} (min odd-edge load {})",
                p.k,
                p.c,
                p.first_round,
                p.last_round,
                p.returned.unwrap(),
                Frac(p.min_odd_load.as_ref().unwrap())
            );
        }
        if big_k == 1 && big_c == 1 {
            let cfg = OracleConfig::new(Objective::MaxResponse, true).budget(10_000_000);
            let opt = oracle_optimal(&trace.instance, &cfg).unwrap();
            println!("  offline optimum on the emitted instance: {}", Frac(&opt.value));
        }
    }
}
