use rayon::prelude::*;

use super::cholesky::dot;
use super::correlation::correlation;
use super::model::{Extension, KrigingModel, PredictionBatch};
use crate::scalar::Scalar;

/// Predictions over a fixed set of query points, kept current as the model
/// grows one training point at a time.
///
/// For every query point the projection v = L⁻¹r(x) is stored. Bordering the
/// factor with `[l, d]` appends one entry `(r_new(x) − lᵀv) / d` to v, so an
/// update costs O(m) per point instead of O(m²). When storing v for all
/// points would exceed `max_entries` scalars the cache keeps no projections
/// and recomputes predictions from scratch.
#[derive(Clone, Debug)]
pub struct QueryCache<T> {
    dim: usize,
    points: Vec<T>,
    scaled: Vec<T>,
    proj: Option<Vec<Vec<T>>>,
    max_entries: usize,
    mean: Vec<T>,
    raw_variance: Vec<T>,
}

impl<T: Scalar> QueryCache<T> {
    pub fn new(model: &KrigingModel<T>, points: &[T], max_entries: usize) -> Self {
        let dim = model.dim();
        assert_eq!(points.len() % dim, 0, "ragged query points");
        let mut cache = Self {
            dim,
            points: Vec::new(),
            scaled: Vec::new(),
            proj: None,
            max_entries,
            mean: Vec::new(),
            raw_variance: Vec::new(),
        };
        cache.rebuild_with(model, points.to_vec());
        cache
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn is_incremental(&self) -> bool {
        self.proj.is_some()
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    /// Unclamped variances.
    pub fn raw_variance(&self) -> &[T] {
        &self.raw_variance
    }

    /// Clamped predictions with the number of clamped variances.
    pub fn batch(&self) -> PredictionBatch<T> {
        let clamped = self.raw_variance.iter().filter(|v| **v < T::zero()).count();
        PredictionBatch {
            mean: self.mean.clone(),
            variance: self.raw_variance.iter().map(|v| v.max(T::zero())).collect(),
            clamped,
        }
    }

    pub fn sd(&self, i: usize) -> T {
        self.raw_variance[i].max(T::zero()).sqrt()
    }

    fn fits(&self, n: usize, m: usize) -> bool {
        n.saturating_mul(m) <= self.max_entries
    }

    /// Recomputes everything, e.g. after θ or the input scaling changed.
    pub fn rebuild(&mut self, model: &KrigingModel<T>) {
        let points = std::mem::take(&mut self.points);
        self.rebuild_with(model, points);
    }

    fn rebuild_with(&mut self, model: &KrigingModel<T>, points: Vec<T>) {
        let dim = self.dim;
        let n = points.len() / dim;
        self.scaled = scale_all(model, &points);
        self.points = points;
        if self.fits(n, model.n_train()) {
            let proj: Vec<Vec<T>> = self
                .scaled
                .par_chunks(dim)
                .map(|xs| project(model, xs))
                .collect();
            let (mean, var) = finish_all(model, &proj);
            self.mean = mean;
            self.raw_variance = var;
            self.proj = Some(proj);
        } else {
            self.proj = None;
            self.recompute_direct(model);
        }
    }

    fn recompute_direct(&mut self, model: &KrigingModel<T>) {
        let (mean, var): (Vec<T>, Vec<T>) = self
            .scaled
            .par_chunks(self.dim)
            .map(|xs| model.finish(&model.project_scaled(xs)))
            .unzip();
        self.mean = mean;
        self.raw_variance = var;
    }

    /// Brings the cache in line with `model` right after `model.extend`
    /// returned `ext`.
    pub fn update(&mut self, model: &KrigingModel<T>, ext: &Extension<T>) {
        let n = self.len();
        if !self.fits(n, model.n_train()) {
            self.proj = None;
        }
        let Some(proj) = self.proj.as_mut() else {
            self.recompute_direct(model);
            return;
        };
        debug_assert_eq!(ext.index + 1, model.n_train());
        let theta = model.theta();
        let dim = self.dim;
        proj.par_iter_mut()
            .zip(self.scaled.par_chunks(dim))
            .for_each(|(v, xs)| {
                let r = correlation(xs, &ext.x_scaled, theta);
                let next = (r - dot(&ext.l, v)) / ext.d;
                v.push(next);
            });
        let (mean, var) = finish_all(model, proj);
        self.mean = mean;
        self.raw_variance = var;
    }

    /// Adds query points (row-major) at the end.
    pub fn append(&mut self, model: &KrigingModel<T>, points: &[T]) {
        let dim = self.dim;
        assert_eq!(points.len() % dim, 0, "ragged query points");
        let scaled = scale_all(model, points);
        let n = self.len() + points.len() / dim;
        self.points.extend_from_slice(points);
        if !self.fits(n, model.n_train()) {
            self.proj = None;
        }
        match self.proj.as_mut() {
            Some(proj) => {
                let fresh: Vec<Vec<T>> = scaled.par_chunks(dim).map(|xs| project(model, xs)).collect();
                let (mean, var) = finish_all(model, &fresh);
                proj.extend(fresh);
                self.mean.extend(mean);
                self.raw_variance.extend(var);
                self.scaled.extend(scaled);
            }
            None => {
                self.scaled.extend(scaled);
                self.recompute_direct(model);
            }
        }
    }
}

fn scale_all<T: Scalar>(model: &KrigingModel<T>, points: &[T]) -> Vec<T> {
    let dim = model.dim();
    let mut out = vec![T::zero(); points.len()];
    for (o, x) in out.chunks_exact_mut(dim).zip(points.chunks_exact(dim)) {
        model.scale_into(x, o);
    }
    out
}

fn project<T: Scalar>(model: &KrigingModel<T>, xs: &[T]) -> Vec<T> {
    let mut v = Vec::with_capacity(model.n_train() + model.n_train() / 2 + 8);
    v.resize(model.n_train(), T::zero());
    model.correlations_into(xs, &mut v);
    model.profile().factor.solve_lower_in_place(&mut v);
    v
}

fn finish_all<T: Scalar>(model: &KrigingModel<T>, proj: &[Vec<T>]) -> (Vec<T>, Vec<T>) {
    proj.par_iter().map(|v| model.finish(v)).unzip()
}
