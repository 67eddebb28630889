//! Exact optima on a small instance read from text, for both objectives.
//!
//!     cargo run --example oracle

use ecfs::bounds::{interval_lower_bound, oracle_optimal, Objective, OracleConfig};
use ecfs::format::{parse_instance, write_schedule};
use ecfs::rational::Frac;

const TRIANGLE: &str = "\
ecfs v1
nodes 3
node 0 1
node 1 1
node 2 1
jobs 3
job 0 0 1 1 1
job 1 1 2 1 1
job 2 0 2 1 1
";

fn main() {
    let inst = parse_instance(TRIANGLE).unwrap();
    println!("L = {}", Frac(&interval_lower_bound(&inst).value));
    for (label, nonsplitting, refinement) in [("nonsplitting", true, 1), ("half units", false, 2)] {
        for objective in [Objective::MaxResponse, Objective::AvgResponse] {
            let cfg = OracleConfig::new(objective, nonsplitting).refinement(refinement);
            let r = oracle_optimal(&inst, &cfg).unwrap();
            println!(
                "{label:<13} {objective:?}: {} ({} states)",
                Frac(&r.value),
                r.explored
            );
        }
    }
    let cfg = OracleConfig::new(Objective::MaxResponse, false).refinement(2);
    print!(
        "{}",
        write_schedule(&oracle_optimal(&inst, &cfg).unwrap().schedule)
    );
}
