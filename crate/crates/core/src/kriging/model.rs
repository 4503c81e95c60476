use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cholesky::{dot, Cholesky};
use super::correlation::correlation;
use super::mle;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Two training points closer than this in every raw coordinate are duplicates.
pub const DUPLICATE_TOL: f64 = 1e-12;

/// First nugget tried is `NUGGET_START_PER_POINT · m`; escalated ×10 until
/// the factorization succeeds or `NUGGET_MAX` is exceeded.
pub const NUGGET_START_PER_POINT: f64 = 1e-12;
pub const NUGGET_MAX: f64 = 1e-6;

/// Hyperparameter search settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrigingOptions {
    /// Standardize inputs per dimension before fitting; θ lives in that space.
    pub standardize: bool,
    pub theta_bounds: (f64, f64),
    /// Range of the log-uniform random starts.
    pub start_range: (f64, f64),
    pub starts: usize,
    /// Pattern-search evaluations per input dimension, shared by all starts.
    pub budget_per_dim: usize,
    /// Points of the isotropic log-grid scanned before the pattern search;
    /// its best point seeds one extra start. Zero disables it.
    pub prescan: usize,
    pub seed: u64,
    /// Extra start, typically the θ of a previous fit.
    pub warm_start: Option<Vec<f64>>,
}

impl Default for KrigingOptions {
    fn default() -> Self {
        Self {
            standardize: true,
            theta_bounds: (1e-3, 10.0),
            start_range: (1e-2, 10.0),
            starts: 5,
            budget_per_dim: 200,
            prescan: 20,
            seed: 0,
            warm_start: None,
        }
    }
}

/// Generalized-least-squares profile of (β, σ²) for a fixed θ.
///
/// With R = LLᵀ: `u = L⁻¹1`, `z = L⁻¹y`, `β = uᵀz / uᵀu`,
/// `e = z − βu = L⁻¹(y − β1)` and `σ² = eᵀe / m`.
#[derive(Clone, Debug)]
pub struct Profile<T> {
    pub beta: T,
    pub sigma2: T,
    pub nugget: T,
    pub factor: Cholesky<T>,
    u: Vec<T>,
    z: Vec<T>,
    e: Vec<T>,
    uu: T,
    log_det: T,
}

impl<T: Scalar> Profile<T> {
    /// ln ψ = ln(|R|^{1/m} σ²), the concentrated likelihood objective.
    pub fn log_psi(&self) -> T {
        let m = T::of_usize(self.u.len());
        self.log_det / m + self.sigma2.ln()
    }

    fn from_factor(factor: Cholesky<T>, nugget: T, y: &[T]) -> Self {
        let ones = vec![T::one(); y.len()];
        let u = factor.solve_lower(&ones);
        let z = factor.solve_lower(y);
        let log_det = factor.log_det();
        let mut p = Self {
            beta: T::zero(),
            sigma2: T::zero(),
            nugget,
            factor,
            u,
            z,
            e: Vec::new(),
            uu: T::zero(),
            log_det,
        };
        p.refresh_regression();
        p
    }

    fn refresh_regression(&mut self) {
        self.uu = dot(&self.u, &self.u);
        self.beta = dot(&self.u, &self.z) / self.uu;
        let beta = self.beta;
        self.e = self
            .z
            .iter()
            .zip(&self.u)
            .map(|(&z, &u)| z - beta * u)
            .collect();
        self.sigma2 = (dot(&self.e, &self.e) / T::of_usize(self.e.len())).max(T::zero());
    }
}

/// Correlation matrix of the rows of `x` (m × dim), row-major.
fn correlation_matrix<T: Scalar>(x: &[T], dim: usize, theta: &[T], nugget: T) -> Vec<T> {
    let m = x.len() / dim;
    let mut r = vec![T::zero(); m * m];
    for i in 0..m {
        let xi = &x[i * dim..(i + 1) * dim];
        r[i * m + i] = T::one() + nugget;
        for j in 0..i {
            let c = correlation(xi, &x[j * dim..(j + 1) * dim], theta);
            r[i * m + j] = c;
            r[j * m + i] = c;
        }
    }
    r
}

/// Profiles β and σ² for fixed θ on inputs `x` (m × dim, used as given),
/// escalating the diagonal nugget until R + nugget·I factors.
pub fn profile_beta_sigma2<T: Scalar>(x: &[T], dim: usize, y: &[T], theta: &[T]) -> Result<Profile<T>> {
    let m = y.len();
    if x.len() != m * dim {
        return Err(Error::DimensionMismatch {
            expected: m * dim,
            got: x.len(),
        });
    }
    if theta.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: theta.len(),
        });
    }
    let base = correlation_matrix(x, dim, theta, T::zero());
    let mut nugget = NUGGET_START_PER_POINT * m as f64;
    loop {
        let mut r = base.clone();
        let n = T::of(nugget);
        for i in 0..m {
            r[i * m + i] += n;
        }
        if let Some(factor) = Cholesky::factor(&r, m) {
            return Ok(Profile::from_factor(factor, n, y));
        }
        nugget *= 10.0;
        if nugget > NUGGET_MAX * (1.0 + 1e-9) {
            return Err(Error::IllConditioned { nugget: nugget / 10.0 });
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction<T> {
    pub mean: T,
    /// Clamped at zero from below.
    pub variance: T,
}

impl<T: Scalar> Prediction<T> {
    pub fn sd(&self) -> T {
        self.variance.sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionBatch<T> {
    pub mean: Vec<T>,
    pub variance: Vec<T>,
    /// Number of variances that came out negative and were clamped to zero.
    pub clamped: usize,
}

/// New bordering row produced by [`KrigingModel::extend`].
#[derive(Clone, Debug)]
pub struct Extension<T> {
    /// Position of the new point in the training set.
    pub index: usize,
    /// The new point in the model's (possibly standardized) input space.
    pub x_scaled: Vec<T>,
    pub l: Vec<T>,
    pub d: T,
}

/// Serializable snapshot of the fitted hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub n_train: usize,
    pub theta: Vec<f64>,
    pub beta: f64,
    pub sigma2: f64,
    pub nugget: f64,
}

/// Ordinary Kriging model with constant trend and Gaussian correlation.
#[derive(Clone, Debug)]
pub struct KrigingModel<T> {
    dim: usize,
    x_raw: Vec<T>,
    y: Vec<T>,
    shift: Vec<T>,
    scale: Vec<T>,
    x_scaled: Vec<T>,
    theta: Vec<T>,
    profile: Profile<T>,
    /// R⁻¹(y − β1)
    weights: Vec<T>,
}

fn check_training<T: Scalar>(x: &[T], dim: usize, y: &[T]) -> Result<()> {
    if dim == 0 || x.len() != y.len() * dim {
        return Err(Error::DimensionMismatch {
            expected: y.len() * dim.max(1),
            got: x.len(),
        });
    }
    let m = y.len();
    if m < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: m });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training data"));
    }
    for i in 1..m {
        let xi = &x[i * dim..(i + 1) * dim];
        if (0..i).any(|j| is_duplicate(xi, &x[j * dim..(j + 1) * dim])) {
            return Err(Error::DuplicatePoint { index: i });
        }
    }
    Ok(())
}

#[inline]
fn is_duplicate<T: Scalar>(a: &[T], b: &[T]) -> bool {
    let tol = T::of(DUPLICATE_TOL);
    a.iter().zip(b).all(|(&p, &q)| (p - q).abs() <= tol)
}

fn scaling<T: Scalar>(x: &[T], dim: usize, standardize: bool) -> (Vec<T>, Vec<T>) {
    let m = x.len() / dim;
    if !standardize {
        return (vec![T::zero(); dim], vec![T::one(); dim]);
    }
    let mut shift = vec![T::zero(); dim];
    let mut scale = vec![T::one(); dim];
    for j in 0..dim {
        let col = x.iter().skip(j).step_by(dim);
        let mean = col.clone().copied().sum::<T>() / T::of_usize(m);
        let var = col.map(|&v| (v - mean) * (v - mean)).sum::<T>() / T::of_usize(m - 1);
        shift[j] = mean;
        let sd = var.sqrt();
        if sd > T::zero() && sd.is_finite() {
            scale[j] = sd;
        }
    }
    (shift, scale)
}

impl<T: Scalar> KrigingModel<T> {
    /// Fits θ by maximum likelihood (minimizing ψ(θ) = |R|^{1/m}·σ²).
    pub fn fit(x: &[T], dim: usize, y: &[T], options: &KrigingOptions) -> Result<Self> {
        check_training(x, dim, y)?;
        let (shift, scale) = scaling(x, dim, options.standardize);
        let x_scaled = apply_scaling(x, &shift, &scale);
        let (theta, profile) = mle::search(&x_scaled, dim, y, options)?;
        Ok(Self::assemble(x, dim, y, shift, scale, x_scaled, theta, profile))
    }

    /// Builds the model for a fixed θ (in the scaled space when `standardize`).
    pub fn with_theta(x: &[T], dim: usize, y: &[T], theta: &[T], standardize: bool) -> Result<Self> {
        check_training(x, dim, y)?;
        if theta.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: theta.len(),
            });
        }
        let (shift, scale) = scaling(x, dim, standardize);
        let x_scaled = apply_scaling(x, &shift, &scale);
        let profile = profile_beta_sigma2(&x_scaled, dim, y, theta)?;
        Ok(Self::assemble(
            x,
            dim,
            y,
            shift,
            scale,
            x_scaled,
            theta.to_vec(),
            profile,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        x: &[T],
        dim: usize,
        y: &[T],
        shift: Vec<T>,
        scale: Vec<T>,
        x_scaled: Vec<T>,
        theta: Vec<T>,
        profile: Profile<T>,
    ) -> Self {
        let mut model = Self {
            dim,
            x_raw: x.to_vec(),
            y: y.to_vec(),
            shift,
            scale,
            x_scaled,
            theta,
            profile,
            weights: Vec::new(),
        };
        model.refresh_weights();
        model
    }

    fn refresh_weights(&mut self) {
        let mut w = self.profile.e.clone();
        self.profile.factor.solve_upper_in_place(&mut w);
        self.weights = w;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_train(&self) -> usize {
        self.y.len()
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn beta(&self) -> T {
        self.profile.beta
    }

    pub fn sigma2(&self) -> T {
        self.profile.sigma2
    }

    pub fn nugget(&self) -> T {
        self.profile.nugget
    }

    pub fn profile(&self) -> &Profile<T> {
        &self.profile
    }

    /// ψ(θ) = |R|^{1/m}·σ² at the fitted θ.
    pub fn psi(&self) -> T {
        self.profile.log_psi().exp()
    }

    pub fn training_x(&self) -> &[T] {
        &self.x_raw
    }

    pub fn training_y(&self) -> &[T] {
        &self.y
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.x_raw.chunks_exact(self.dim).any(|row| is_duplicate(row, x))
    }

    pub fn summary(&self) -> ModelSummary {
        ModelSummary {
            n_train: self.n_train(),
            theta: self.theta.iter().map(|t| t.as_f64()).collect(),
            beta: self.beta().as_f64(),
            sigma2: self.sigma2().as_f64(),
            nugget: self.nugget().as_f64(),
        }
    }

    #[inline]
    pub(crate) fn scale_into(&self, x: &[T], out: &mut [T]) {
        for j in 0..self.dim {
            out[j] = (x[j] - self.shift[j]) / self.scale[j];
        }
    }

    /// Correlations between a scaled query point and every training point.
    #[inline]
    pub(crate) fn correlations_into(&self, xs: &[T], out: &mut [T]) {
        for (o, row) in out.iter_mut().zip(self.x_scaled.chunks_exact(self.dim)) {
            *o = correlation(xs, row, &self.theta);
        }
    }

    /// Mean and unclamped variance from the projection v = L⁻¹r.
    #[inline]
    pub(crate) fn finish(&self, v: &[T]) -> (T, T) {
        let p = &self.profile;
        let mean = p.beta + dot(v, &p.e);
        let gls = dot(&p.u, v) - T::one();
        let var = p.sigma2 * (T::one() - dot(v, v) + gls * gls / p.uu);
        (mean, var)
    }

    pub(crate) fn project_scaled(&self, xs: &[T]) -> Vec<T> {
        let mut v = vec![T::zero(); self.n_train()];
        self.correlations_into(xs, &mut v);
        self.profile.factor.solve_lower_in_place(&mut v);
        v
    }

    /// Mean and variance before clamping.
    pub fn predict_raw(&self, x: &[T]) -> (T, T) {
        assert_eq!(x.len(), self.dim, "query dimension");
        let mut xs = vec![T::zero(); self.dim];
        self.scale_into(x, &mut xs);
        let v = self.project_scaled(&xs);
        self.finish(&v)
    }

    pub fn predict(&self, x: &[T]) -> Prediction<T> {
        let (mean, var) = self.predict_raw(x);
        Prediction {
            mean,
            variance: var.max(T::zero()),
        }
    }

    /// Mean only, via the precomputed weights: β + r(x)ᵀR⁻¹(y − β1).
    pub fn predict_mean(&self, x: &[T]) -> T {
        let mut xs = vec![T::zero(); self.dim];
        self.scale_into(x, &mut xs);
        let mut r = vec![T::zero(); self.n_train()];
        self.correlations_into(&xs, &mut r);
        self.profile.beta + dot(&r, &self.weights)
    }

    /// Predicts every row of `points` (row-major, `dim` columns). The work
    /// is split across threads; results do not depend on the split.
    pub fn predict_batch(&self, points: &[T]) -> PredictionBatch<T> {
        let raw: Vec<(T, T)> = points
            .par_chunks(self.dim)
            .map(|x| self.predict_raw(x))
            .collect();
        let mut clamped = 0;
        let mut mean = Vec::with_capacity(raw.len());
        let mut variance = Vec::with_capacity(raw.len());
        for (mu, var) in raw {
            mean.push(mu);
            if var < T::zero() {
                clamped += 1;
            }
            variance.push(var.max(T::zero()));
        }
        PredictionBatch {
            mean,
            variance,
            clamped,
        }
    }

    /// Adds one training point keeping θ, the input scaling and the nugget
    /// fixed: the factor is bordered with one row and (β, σ²) re-profiled.
    pub fn extend(&mut self, x: &[T], y: T) -> Result<Extension<T>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training point"));
        }
        if self.contains(x) {
            return Err(Error::DuplicatePoint {
                index: self.n_train(),
            });
        }
        let mut xs = vec![T::zero(); self.dim];
        self.scale_into(x, &mut xs);
        let l = self.project_scaled(&xs);
        let nugget = self.profile.nugget;
        let d2 = T::one() + nugget - dot(&l, &l);
        // The Schur complement of R + nugget·I is at least the nugget.
        if !(d2 > nugget * T::of(0.5)) {
            return Err(Error::IllConditioned {
                nugget: nugget.as_f64(),
            });
        }
        let d = d2.sqrt();
        let p = &mut self.profile;
        let u_new = (T::one() - dot(&l, &p.u)) / d;
        let z_new = (y - dot(&l, &p.z)) / d;
        p.factor.push_row(&l, d);
        p.u.push(u_new);
        p.z.push(z_new);
        p.log_det += d2.ln();
        p.refresh_regression();
        self.x_raw.extend_from_slice(x);
        self.x_scaled.extend_from_slice(&xs);
        self.y.push(y);
        self.refresh_weights();
        Ok(Extension {
            index: self.n_train() - 1,
            x_scaled: xs,
            l,
            d,
        })
    }
}

fn apply_scaling<T: Scalar>(x: &[T], shift: &[T], scale: &[T]) -> Vec<T> {
    let dim = shift.len();
    x.chunks_exact(dim)
        .flat_map(|row| {
            row.iter()
                .zip(shift)
                .zip(scale)
                .map(|((&v, &s), &c)| (v - s) / c)
        })
        .collect()
}
