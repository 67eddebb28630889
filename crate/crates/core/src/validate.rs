//! Independent schedule checker.
//!
//! Works from the schedule and instance alone; it shares no code path with
//! the simulation engine's per-round checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::model::{Instance, Round, Schedule};
use crate::rational::{Frac, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    Capacity,
    Release,
    Incomplete,
    SplitInNonsplitting,
    Duplicate,
    UnknownJob,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Capacity => "capacity",
            ViolationKind::Release => "release",
            ViolationKind::Incomplete => "incomplete",
            ViolationKind::SplitInNonsplitting => "split-in-nonsplitting",
            ViolationKind::Duplicate => "duplicate",
            ViolationKind::UnknownJob => "unknown-job",
        })
    }
}

/// One failed constraint. `id` is a node id for capacity violations and a job
/// id otherwise; `round` is 0 for whole-schedule violations (incomplete jobs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub id: usize,
    pub round: Round,
    pub magnitude: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.kind,
            self.id,
            self.round,
            Frac(&self.magnitude)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Checks capacity (scaled by `augmentation`), releases, completion, and the
/// nonsplitting discipline when the schedule is flagged nonsplitting.
///
/// Magnitudes: executed load for capacity, the fraction for release and
/// split violations, total executed fraction for incomplete jobs, and the
/// number of entries for duplicates.
pub fn validate_schedule(inst: &Instance, sched: &Schedule, augmentation: &Rational) -> ValidationReport {
    let mut violations = Vec::new();
    let m = inst.job_count();

    let mut entries: BTreeMap<(usize, Round), usize> = BTreeMap::new();
    let mut totals: Vec<Rational> = vec![Rational::zero(); m];
    let mut rounds_per_job: Vec<BTreeSet<Round>> = vec![BTreeSet::new(); m];
    let mut loads: BTreeMap<(Round, usize), Rational> = BTreeMap::new();

    for a in sched.assignments() {
        let Some(job) = inst.jobs().get(a.job) else {
            violations.push(Violation {
                kind: ViolationKind::UnknownJob,
                id: a.job,
                round: a.round,
                magnitude: a.fraction.clone(),
            });
            continue;
        };
        *entries.entry((a.job, a.round)).or_insert(0) += 1;
        if a.round < job.release {
            violations.push(Violation {
                kind: ViolationKind::Release,
                id: a.job,
                round: a.round,
                magnitude: a.fraction.clone(),
            });
        }
        if sched.is_nonsplitting() && !a.fraction.is_one() {
            violations.push(Violation {
                kind: ViolationKind::SplitInNonsplitting,
                id: a.job,
                round: a.round,
                magnitude: a.fraction.clone(),
            });
        }
        totals[a.job] += &a.fraction;
        rounds_per_job[a.job].insert(a.round);
        let executed = &job.demand * &a.fraction;
        for node in job.nodes() {
            *loads.entry((a.round, node)).or_insert_with(Rational::zero) += &executed;
        }
    }

    for (&(job, round), &count) in &entries {
        if count > 1 {
            violations.push(Violation {
                kind: ViolationKind::Duplicate,
                id: job,
                round,
                magnitude: Rational::from_integer(count.into()),
            });
        }
    }

    for (&(round, node), load) in &loads {
        let cap = augmentation * inst.capacity(node);
        if *load > cap {
            violations.push(Violation {
                kind: ViolationKind::Capacity,
                id: node,
                round,
                magnitude: load.clone(),
            });
        }
    }

    for (job, total) in totals.iter().enumerate() {
        if *total < Rational::one() {
            violations.push(Violation {
                kind: ViolationKind::Incomplete,
                id: job,
                round: 0,
                magnitude: total.clone(),
            });
        }
        if sched.is_nonsplitting() && rounds_per_job[job].len() > 1 {
            violations.push(Violation {
                kind: ViolationKind::SplitInNonsplitting,
                id: job,
                round: *rounds_per_job[job].iter().nth(1).unwrap(),
                magnitude: total.clone(),
            });
        }
    }

    violations.sort_by_key(|a| (a.kind, a.round, a.id));
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Assignment, JobSpec};
    use crate::rational::{int, ratio};

    fn two_on_a() -> Instance {
        Instance::unit_nodes(3, vec![JobSpec::unit(0, 1, 1), JobSpec::unit(0, 2, 1)]).unwrap()
    }

    #[test]
    fn single_unit_job_valid() {
        let inst = Instance::unit_nodes(2, vec![JobSpec::unit(0, 1, 1)]).unwrap();
        let mut s = Schedule::new(true);
        s.push(0, 1, int(1));
        assert!(validate_schedule(&inst, &s, &int(1)).is_valid());
    }

    #[test]
    fn shared_node_over_capacity() {
        let inst = two_on_a();
        let mut s = Schedule::new(true);
        s.push(0, 1, int(1));
        s.push(1, 1, int(1));
        let report = validate_schedule(&inst, &s, &int(1));
        assert_eq!(
            report.violations,
            vec![Violation {
                kind: ViolationKind::Capacity,
                id: 0,
                round: 1,
                magnitude: int(2)
            }]
        );
        assert!(validate_schedule(&inst, &s, &int(2)).is_valid());
    }

    #[test]
    fn release_incomplete_split_duplicate() {
        let inst = Instance::unit_nodes(2, vec![JobSpec::unit(0, 1, 2)]).unwrap();
        let s = Schedule::from_assignments(
            true,
            vec![
                Assignment {
                    round: 1,
                    job: 0,
                    fraction: ratio(1, 4),
                },
                Assignment {
                    round: 2,
                    job: 0,
                    fraction: ratio(1, 4),
                },
                Assignment {
                    round: 2,
                    job: 0,
                    fraction: ratio(1, 4),
                },
                Assignment {
                    round: 3,
                    job: 7,
                    fraction: int(1),
                },
            ],
        );
        let r = validate_schedule(&inst, &s, &int(1));
        assert!(!r.is_valid());
        assert_eq!(r.count(ViolationKind::Release), 1);
        assert_eq!(r.count(ViolationKind::Incomplete), 1);
        assert_eq!(r.count(ViolationKind::Duplicate), 1);
        assert_eq!(r.count(ViolationKind::UnknownJob), 1);
        // three fractional entries plus the multi-round entry
        assert_eq!(r.count(ViolationKind::SplitInNonsplitting), 4);
    }

    #[test]
    fn splitting_schedule_may_split() {
        let inst = Instance::unit_nodes(2, vec![JobSpec::unit(0, 1, 1)]).unwrap();
        let mut s = Schedule::new(false);
        s.push(0, 1, ratio(1, 2));
        s.push(0, 2, ratio(1, 2));
        assert!(validate_schedule(&inst, &s, &int(1)).is_valid());
    }
}
