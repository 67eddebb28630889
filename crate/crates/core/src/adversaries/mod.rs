//! Adversarial inputs: the adaptive chain adversary and fixed hard families.

pub mod chain;
pub mod families;

pub use chain::{
    build_chain, run_adversary, run_subroutine, AdversaryError, AdversaryTrace, ChainSession, ChainTopology,
};
pub use families::{gap_instance, propalloc_avg_instance, propalloc_avg_reference, sjf_max_instance};
