//! Exhaustive checks of the calculus up to a size bound.
//!
//! [`enumerate_terms`] lists every well-typed term within a size and type
//! depth bound. [`run_census`] reduces each one, checks subject reduction
//! at every step, tallies how runs end and optionally checks local
//! joinability and the print/parse round trip. [`report`] renders a census
//! as an aligned table or as JSON lines.

mod census;
mod enumerate;
mod join;
pub mod report;

pub use census::{
    run_census, CensusReport, EnumConfig, JoinConfig, RoundtripSummary, SeedRow, SizeRow, Timings,
    Violation, KEPT_VIOLATIONS,
};
pub use enumerate::{
    all_shapes, atoms, enumerate_by_size, enumerate_terms, subscripts_within, Buckets,
};
pub use join::{joinability_check, JoinOutcome, JoinWitness, JOIN_STATE_LIMIT};
