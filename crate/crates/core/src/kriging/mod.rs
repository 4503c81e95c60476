//! Ordinary Kriging with a constant trend and Gaussian correlation.

mod cache;
mod cholesky;
mod correlation;
mod mle;
mod model;

pub use cache::QueryCache;
pub use cholesky::Cholesky;
pub use correlation::gaussian_correlation;
pub use model::{
    profile_beta_sigma2, Extension, KrigingModel, KrigingOptions, ModelSummary, Prediction,
    PredictionBatch, Profile, DUPLICATE_TOL, NUGGET_MAX, NUGGET_START_PER_POINT,
};
