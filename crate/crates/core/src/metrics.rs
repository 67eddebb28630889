//! Response-time and makespan metrics.
//!
//! Response time is `C_j - r_j + 1`: a job finished in its release round
//! scores 1.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::model::{Instance, JobId, Round, Schedule};
use crate::rational::{Frac, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("job {0} is never completed")]
    Incomplete(JobId),
    #[error("schedule references unknown job {0}")]
    UnknownJob(JobId),
}

/// `C_j`: first round where the cumulative executed fraction reaches one.
pub fn completion_times(inst: &Instance, sched: &Schedule) -> Result<Vec<Round>, MetricsError> {
    let m = inst.job_count();
    let mut done: Vec<Rational> = vec![Rational::zero(); m];
    let mut completion: Vec<Option<Round>> = vec![None; m];
    // assignments are sorted by round, so the first crossing is the minimum
    for a in sched.assignments() {
        let total = done.get_mut(a.job).ok_or(MetricsError::UnknownJob(a.job))?;
        *total += &a.fraction;
        if completion[a.job].is_none() && *total >= Rational::one() {
            completion[a.job] = Some(a.round);
        }
    }
    completion
        .into_iter()
        .enumerate()
        .map(|(j, c)| c.ok_or(MetricsError::Incomplete(j)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub completion: Vec<Round>,
    pub response: Vec<u64>,
    pub max_response: u64,
    pub avg_response: Rational,
    /// `p -> sum_j response_j^p`. The p-th root is left to the reader.
    pub lp_sums: BTreeMap<u32, BigInt>,
    pub makespan: Round,
}

impl MetricsReport {
    pub fn total_response(&self) -> u64 {
        self.response.iter().sum()
    }
}

pub fn response_summary(
    inst: &Instance,
    sched: &Schedule,
    p_values: &[u32],
) -> Result<MetricsReport, MetricsError> {
    let completion = completion_times(inst, sched)?;
    let response: Vec<u64> = completion
        .iter()
        .zip(inst.jobs())
        .map(|(&c, job)| c + 1 - job.release)
        .collect();
    let max_response = response.iter().copied().max().unwrap_or(0);
    let m = response.len();
    let avg_response = if m == 0 {
        Rational::zero()
    } else {
        Rational::new(BigInt::from(response.iter().sum::<u64>()), BigInt::from(m))
    };
    let lp_sums = p_values
        .iter()
        .map(|&p| {
            let sum: BigInt = response.iter().map(|&r| BigInt::from(r).pow(p)).sum();
            (p, sum)
        })
        .collect();
    let makespan = completion.iter().copied().max().unwrap_or(0);
    Ok(MetricsReport {
        completion,
        response,
        max_response,
        avg_response,
        lp_sums,
        makespan,
    })
}

pub const CSV_HEADER: [&str; 11] = [
    "instance",
    "scheduler",
    "params",
    "augmentation",
    "max_response",
    "avg_response_num",
    "avg_response_den",
    "makespan",
    "lp_p",
    "lp_sum_num",
    "lp_sum_den",
];

/// Identifies one run in the CSV output.
#[derive(Debug, Clone)]
pub struct RunLabel {
    pub instance: String,
    pub scheduler: String,
    pub params: String,
    pub augmentation: Rational,
}

/// Writes one row per requested p (rows are identical except for the ℓp
/// columns). Emits the header when `header` is set.
pub fn write_csv<W: Write>(
    out: W,
    header: bool,
    rows: &[(RunLabel, MetricsReport)],
) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record(CSV_HEADER)?;
    }
    for (label, report) in rows {
        for (p, sum) in &report.lp_sums {
            w.write_record([
                label.instance.clone(),
                label.scheduler.clone(),
                label.params.clone(),
                Frac(&label.augmentation).to_string(),
                report.max_response.to_string(),
                report.avg_response.numer().to_string(),
                report.avg_response.denom().to_string(),
                report.makespan.to_string(),
                p.to_string(),
                sum.to_string(),
                "1".to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JobSpec;
    use crate::rational::{int, ratio};

    fn one_job(release: u64) -> Instance {
        Instance::unit_nodes(2, vec![JobSpec::unit(0, 1, release)]).unwrap()
    }

    #[test]
    fn completion_cases() {
        let inst = one_job(1);
        let mut s = Schedule::new(false);
        s.push(0, 1, int(1));
        assert_eq!(completion_times(&inst, &s).unwrap(), vec![1]);

        let mut s = Schedule::new(false);
        s.push(0, 1, ratio(1, 2));
        s.push(0, 2, ratio(1, 2));
        assert_eq!(completion_times(&inst, &s).unwrap(), vec![2]);

        let mut s = Schedule::new(false);
        s.push(0, 3, int(1));
        assert_eq!(completion_times(&inst, &s).unwrap(), vec![3]);

        let mut s = Schedule::new(false);
        s.push(0, 1, ratio(1, 3));
        assert_eq!(completion_times(&inst, &s), Err(MetricsError::Incomplete(0)));
    }

    #[test]
    fn executed_on_arrival_scores_one() {
        let inst = one_job(4);
        let mut s = Schedule::new(true);
        s.push(0, 4, int(1));
        let r = response_summary(&inst, &s, &[1, 2]).unwrap();
        assert_eq!(r.max_response, 1);
        assert_eq!(r.avg_response, int(1));
        assert_eq!(r.makespan, 4);
    }

    #[test]
    fn aggregates() {
        let inst = Instance::unit_nodes(2, vec![JobSpec::unit(0, 1, 1), JobSpec::unit(0, 1, 1)]).unwrap();
        let mut s = Schedule::new(true);
        s.push(0, 1, int(1));
        s.push(1, 3, int(1));
        let r = response_summary(&inst, &s, &[1, 2]).unwrap();
        assert_eq!(r.response, vec![1, 3]);
        assert_eq!(r.max_response, 3);
        assert_eq!(r.avg_response, int(2));
        assert_eq!(r.lp_sums[&1], BigInt::from(4));
        assert_eq!(r.lp_sums[&2], BigInt::from(10));
    }

    #[test]
    fn csv_row_layout() {
        let inst = one_job(1);
        let mut s = Schedule::new(true);
        s.push(0, 2, int(1));
        let r = response_summary(&inst, &s, &[2]).unwrap();
        let label = RunLabel {
            instance: "x.ecfs".into(),
            scheduler: "fifo".into(),
            params: "k=1".into(),
            augmentation: int(3),
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, true, &[(label, r)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "instance,scheduler,params,augmentation,max_response,avg_response_num,avg_response_den,makespan,lp_p,lp_sum_num,lp_sum_den\n\
             x.ecfs,fifo,k=1,3,2,2,1,2,2,4,1\n"
        );
    }
}
