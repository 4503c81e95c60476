//! Effective sampling regions and the maximum error rate of the failure
//! probability estimate.

mod bound;
mod partition;
pub mod poisson_binomial;

pub use bound::{
    eps_max_from_range, max_error_rate, safe_wse_interval, BoundSettings, ErrorBound,
    WrongSignCounts,
};
pub use partition::{build_partition, omega2_size, DensityRanking, EsrPartition};
