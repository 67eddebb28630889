//! Online scheduling rules.
//!
//! | rule | augmentation | setting |
//! |------|--------------|---------|
//! | [`ProportionalAllocation`] | `1 + ε` | splittable, general demands |
//! | [`BatchDecomposition`] | `2k` | nonsplitting, unit |
//! | [`FifoMatching`] | `2 + k` | nonsplitting, unit |
//! | [`ShortestJobFirst`] | `2 + ε` | splittable, general demands |
//! | [`Hybrid`] | `3 + ε1 + ε2` | splittable, general demands |

mod batch;
mod fifo;
mod hybrid;
mod propalloc;
mod sjf;

use std::fmt;

pub use batch::{BatchDecomposition, BatchParams};
pub use fifo::{FifoMatching, FifoParams};
pub use hybrid::{Hybrid, HybridParams};
pub use propalloc::{PropAllocParams, ProportionalAllocation};
pub use sjf::{ShortestJobFirst, SjfParams};

use crate::rational::{Frac, Rational};
use crate::sim::Scheduler;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(String),
    #[error("batch k must be 1 or 2, got {0}")]
    BatchK(u64),
    #[error("fifo k must be a positive integer")]
    FifoK,
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
}

pub(crate) fn check_epsilon(eps: &Rational) -> Result<(), ParamError> {
    if *eps < Rational::from_integer(0.into()) {
        return Err(ParamError::NegativeEpsilon(Frac(eps).to_string()));
    }
    Ok(())
}

/// A rule plus its parameters, as named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Algorithm {
    PropAlloc(PropAllocParams),
    Batch(BatchParams),
    Fifo(FifoParams),
    Sjf(SjfParams),
    Hybrid(HybridParams),
}

impl Algorithm {
    /// `eps` feeds propalloc, sjf and the first hybrid share; `eps2` the
    /// second hybrid share (defaults to `eps`); `k` feeds batch and fifo.
    pub fn from_name(name: &str, eps: Rational, eps2: Option<Rational>, k: u64) -> Result<Self, ParamError> {
        Ok(match name {
            "propalloc" => Algorithm::PropAlloc(PropAllocParams::new(eps)?),
            "batch" => Algorithm::Batch(BatchParams::new(k)?),
            "fifo" => Algorithm::Fifo(FifoParams::new(k)?),
            "sjf" => Algorithm::Sjf(SjfParams::new(eps)?),
            "hybrid" => {
                let eps2 = eps2.unwrap_or_else(|| eps.clone());
                Algorithm::Hybrid(HybridParams::new(eps, eps2)?)
            }
            other => return Err(ParamError::UnknownAlgorithm(other.to_string())),
        })
    }

    pub fn build(&self) -> Box<dyn Scheduler + Send> {
        match self {
            Algorithm::PropAlloc(p) => Box::new(ProportionalAllocation::new(p.clone())),
            Algorithm::Batch(p) => Box::new(BatchDecomposition::new(*p)),
            Algorithm::Fifo(p) => Box::new(FifoMatching::new(*p)),
            Algorithm::Sjf(p) => Box::new(ShortestJobFirst::new(p.clone())),
            Algorithm::Hybrid(p) => Box::new(Hybrid::new(p.clone())),
        }
    }

    /// The augmentation its guarantee is stated for.
    pub fn augmentation(&self) -> Rational {
        self.build().augmentation()
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.build();
        write!(f, "{}({})", s.name(), s.params())
    }
}
