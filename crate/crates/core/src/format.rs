//! Text formats for instances (`ecfs v1`) and schedules (`ecfs-sched v1`).
//!
//! Both formats are line oriented, LF terminated, with space separated
//! tokens. Blank lines and `#` comments are ignored by the readers; the
//! writers never emit them.

use std::fmt::Write as _;
use std::io::Read;

use num_traits::{One, Zero};

use crate::model::{check_capacity, check_job, make_job, Assignment, Instance, JobSpec, Node, Schedule};
use crate::rational::{parse_rational, Frac, Rational};

pub const INSTANCE_HEADER: &str = "ecfs v1";
pub const SCHEDULE_HEADER: &str = "ecfs-sched v1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn perr(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line with comments stripped, as (line number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (idx, raw) in self.inner.by_ref() {
            self.last = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((idx + 1, tokens));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), ParseError> {
        self.next_tokens()
            .ok_or_else(|| perr(self.last + 1, format!("unexpected end of input, expected {what}")))
    }
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| perr(line, format!("invalid {what} `{tok}`")))
}

fn parse_frac(line: usize, tok: &str, what: &str) -> Result<Rational, ParseError> {
    parse_rational(tok).map_err(|_| perr(line, format!("invalid {what} `{tok}`")))
}

fn keyword(line: usize, tokens: &[&str], kw: &str, arity: usize) -> Result<(), ParseError> {
    if tokens[0] != kw {
        return Err(perr(line, format!("expected `{kw}`, found `{}`", tokens[0])));
    }
    if tokens.len() != arity + 1 {
        return Err(perr(
            line,
            format!("`{kw}` takes {arity} argument(s), found {}", tokens.len() - 1),
        ));
    }
    Ok(())
}

fn check_header(lines: &mut Lines<'_>, header: &str) -> Result<(), ParseError> {
    let (line, tokens) = lines.expect("header")?;
    if tokens.join(" ") != header {
        return Err(perr(line, format!("expected header `{header}`")));
    }
    Ok(())
}

/// Reads an `ecfs v1` instance. Ids must appear in order `0, 1, ...`.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = Lines::new(text);
    check_header(&mut lines, INSTANCE_HEADER)?;

    let (line, tokens) = lines.expect("`nodes <n>`")?;
    keyword(line, &tokens, "nodes", 1)?;
    let n = parse_usize(line, tokens[1], "node count")?;
    let mut nodes = Vec::with_capacity(n);
    for expected in 0..n {
        let (line, tokens) = lines.expect("`node <id> <capacity>`")?;
        keyword(line, &tokens, "node", 2)?;
        let id = parse_usize(line, tokens[1], "node id")?;
        if id < expected {
            return Err(perr(line, format!("duplicate node id {id}")));
        }
        if id != expected {
            return Err(perr(line, format!("expected node id {expected}, found {id}")));
        }
        let capacity = parse_frac(line, tokens[2], "capacity")?;
        check_capacity(id, &capacity).map_err(|e| perr(line, e.to_string()))?;
        nodes.push(Node { id, capacity });
    }

    let (line, tokens) = lines.expect("`jobs <m>`")?;
    keyword(line, &tokens, "jobs", 1)?;
    let m = parse_usize(line, tokens[1], "job count")?;
    let mut jobs = Vec::with_capacity(m);
    for expected in 0..m {
        let (line, tokens) = lines.expect("`job <id> <u> <v> <demand> <release>`")?;
        keyword(line, &tokens, "job", 5)?;
        let id = parse_usize(line, tokens[1], "job id")?;
        if id < expected {
            return Err(perr(line, format!("duplicate job id {id}")));
        }
        if id != expected {
            return Err(perr(line, format!("expected job id {expected}, found {id}")));
        }
        let u = parse_usize(line, tokens[2], "endpoint")?;
        let v = parse_usize(line, tokens[3], "endpoint")?;
        let demand = parse_frac(line, tokens[4], "demand")?;
        let release = tokens[5]
            .parse::<u64>()
            .map_err(|_| perr(line, format!("invalid release `{}`", tokens[5])))?;
        let job = make_job(id, JobSpec::new(u, v, demand, release));
        check_job(&job, n).map_err(|e| perr(line, e.to_string()))?;
        jobs.push(job);
    }

    if let Some((line, tokens)) = lines.next_tokens() {
        return Err(perr(line, format!("unexpected trailing `{}`", tokens[0])));
    }
    Ok(Instance::from_parts(nodes, jobs))
}

pub fn read_instance(mut reader: impl Read) -> Result<Instance, ParseError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| perr(0, format!("read failed: {e}")))?;
    parse_instance(&text)
}

pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "{INSTANCE_HEADER}").unwrap();
    writeln!(out, "nodes {}", inst.node_count()).unwrap();
    for node in inst.nodes() {
        writeln!(out, "node {} {}", node.id, Frac(&node.capacity)).unwrap();
    }
    writeln!(out, "jobs {}", inst.job_count()).unwrap();
    for job in inst.jobs() {
        writeln!(
            out,
            "job {} {} {} {} {}",
            job.id,
            job.endpoints.0,
            job.endpoints.1,
            Frac(&job.demand),
            job.release
        )
        .unwrap();
    }
    out
}

/// Reads an `ecfs-sched v1` schedule. Fractions must lie in `(0, 1]` and
/// rounds must be positive; duplicate `(job, round)` entries are kept so the
/// validator can flag them.
pub fn parse_schedule(text: &str) -> Result<Schedule, ParseError> {
    let mut lines = Lines::new(text);
    check_header(&mut lines, SCHEDULE_HEADER)?;
    let (line, tokens) = lines.expect("`nonsplitting <0|1>`")?;
    keyword(line, &tokens, "nonsplitting", 1)?;
    let nonsplitting = match tokens[1] {
        "0" => false,
        "1" => true,
        other => return Err(perr(line, format!("invalid nonsplitting flag `{other}`"))),
    };
    let mut assignments = Vec::new();
    while let Some((line, tokens)) = lines.next_tokens() {
        keyword(line, &tokens, "assign", 3)?;
        let job = parse_usize(line, tokens[1], "job id")?;
        let round = tokens[2]
            .parse::<u64>()
            .ok()
            .filter(|&r| r > 0)
            .ok_or_else(|| perr(line, format!("invalid round `{}`", tokens[2])))?;
        let fraction = parse_frac(line, tokens[3], "fraction")?;
        if fraction <= Rational::zero() || fraction > Rational::one() {
            return Err(perr(line, format!("fraction {} outside (0, 1]", Frac(&fraction))));
        }
        assignments.push(Assignment { round, job, fraction });
    }
    Ok(Schedule::from_assignments(nonsplitting, assignments))
}

pub fn write_schedule(sched: &Schedule) -> String {
    let mut out = String::new();
    writeln!(out, "{SCHEDULE_HEADER}").unwrap();
    writeln!(out, "nonsplitting {}", u8::from(sched.is_nonsplitting())).unwrap();
    for a in sched.assignments() {
        writeln!(out, "assign {} {} {}", a.job, a.round, Frac(&a.fraction)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const SMALLEST: &str = "ecfs v1\nnodes 2\nnode 0 1\nnode 1 1\njobs 1\njob 0 0 1 1 1\n";

    #[test]
    fn smallest_file() {
        let inst = parse_instance(SMALLEST).unwrap();
        assert_eq!(inst.node_count(), 2);
        assert_eq!(inst.job_count(), 1);
        assert!(inst.is_unit());
        assert_eq!(write_instance(&inst), SMALLEST);
    }

    #[test]
    fn self_loop_names_line() {
        let text = "ecfs v1\nnodes 2\nnode 0 1\nnode 1 1\njobs 1\njob 0 0 0 1 1\n";
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.line, 6);
        assert!(err.message.contains("self-loop"), "{err}");
    }

    #[test]
    fn rational_demand() {
        let text = "ecfs v1\nnodes 2\nnode 0 1\nnode 1 1\njobs 1\njob 0 0 1 9/2 3\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.job(0).demand, ratio(9, 2));
        assert_eq!(inst.job(0).release, 3);
        assert!(!inst.is_unit());
    }

    #[test]
    fn readers_reduce() {
        let text = "ecfs v1\nnodes 2\nnode 0 4/2\nnode 1 1\njobs 1\njob 0 1 0 2/4 1\n";
        let inst = parse_instance(text).unwrap();
        let out = write_instance(&inst);
        assert!(out.contains("node 0 2\n"));
        assert!(out.contains("job 0 0 1 1/2 1\n"));
    }

    #[test]
    fn error_cases() {
        let cases = [
            ("ecfs v2\n", 1),
            ("ecfs v1\nnodes 1\nnode 0 0\njobs 0\n", 3),
            ("ecfs v1\nnodes 2\nnode 0 1\nnode 0 1\njobs 0\n", 4),
            (
                "ecfs v1\nnodes 2\nnode 0 1\nnode 1 1\njobs 2\njob 0 0 1 1 1\njob 0 0 1 1 1\n",
                7,
            ),
            (
                "ecfs v1\nnodes 2\nnode 0 1\nnode 1 1\njobs 1\njob 0 0 1 -1 1\n",
                6,
            ),
            ("ecfs v1\nnodes 2\nnode 0 1\nnode 1 1\njobs 1\njob 0 0 1 1 0\n", 6),
            ("ecfs v1\nnodes 2\nnode 0 1\nnode 1 1\njobs 1\njob 0 0 1 1\n", 6),
            ("ecfs v1\nnodes 2\nnode 0 1\nnode 1 1\njobs 1\n", 6),
        ];
        for (text, line) in cases {
            let err = parse_instance(text).unwrap_err();
            assert_eq!(err.line, line, "{text:?}: {err}");
        }
    }

    #[test]
    fn schedule_roundtrip_and_order() {
        let text = "ecfs-sched v1\nnonsplitting 0\nassign 1 2 1\nassign 0 1 2/4\nassign 0 2 1/2\n";
        let s = parse_schedule(text).unwrap();
        assert_eq!(
            write_schedule(&s),
            "ecfs-sched v1\nnonsplitting 0\nassign 0 1 1/2\nassign 0 2 1/2\nassign 1 2 1\n"
        );
        assert!(parse_schedule("ecfs-sched v1\nnonsplitting 1\nassign 0 1 3/2\n").is_err());
        assert!(parse_schedule("ecfs-sched v1\nnonsplitting 1\nassign 0 0 1\n").is_err());
        assert!(parse_schedule("ecfs-sched v1\nnonsplitting 2\n").is_err());
    }
}
