//! JSON-lines round traces: one object per round with the arrivals, the
//! executed fractions and the pending load of every node.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::model::{JobId, Round};
use crate::rational::{Frac, Rational};
use crate::sim::RoundRecord;

struct FracStr<'a>(&'a Rational);

impl Serialize for FracStr<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&Frac(self.0))
    }
}

/// Node loads keyed by node id, in id order.
struct Loads<'a>(&'a [Rational]);

impl Serialize for Loads<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (node, load) in self.0.iter().enumerate() {
            map.serialize_entry(&node.to_string(), &FracStr(load))?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct Executed<'a> {
    job: JobId,
    frac: FracStr<'a>,
}

#[derive(Serialize)]
struct Line<'a> {
    round: Round,
    arrivals: &'a [JobId],
    assignments: Vec<Executed<'a>>,
    loads: Loads<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase: Option<&'a str>,
}

/// One JSON object per record, each followed by `\n`. `phases`, when given,
/// labels each record (same length as `history`).
pub fn to_jsonl(history: &[RoundRecord], phases: Option<&[String]>) -> String {
    let mut out = String::new();
    for (k, rec) in history.iter().enumerate() {
        let line = Line {
            round: rec.round,
            arrivals: &rec.arrivals,
            assignments: rec
                .assignments
                .iter()
                .map(|(job, x)| Executed {
                    job: *job,
                    frac: FracStr(x),
                })
                .collect(),
            loads: Loads(&rec.loads),
            phase: phases.and_then(|p| p.get(k)).map(String::as_str),
        };
        out.push_str(&serde_json::to_string(&line).expect("trace serializes"));
        out.push('\n');
    }
    out
}
