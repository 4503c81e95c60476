//! Marginal distributions, independent random vectors and seeded sampling.

mod marginal;
mod sampling;
mod vector;

pub use marginal::{Marginal, MarginalKind, EULER_GAMMA};
pub use sampling::{
    lhs_sample, lhs_sample_with, plain_sample, plain_sample_with, SampleMatrix,
};
pub use vector::RandomVector;
