//! Analytic limit-state functions with their random-variable models.
//!
//! The cantilever tube works in N, mm and MPa: forces given in kN and the
//! torque given in N·m are converted when its random vector is built.

use serde::{Deserialize, Serialize};

use crate::engine::LimitState;
use crate::error::{Error, Result};
use crate::random::{Marginal, RandomVector};
use crate::scalar::Scalar;

/// Four-branch series system in two standard normal variables.
pub fn series_system<T: Scalar>(x1: T, x2: T) -> T {
    let c = T::of(0.1);
    let three = T::of(3.0);
    let s = T::of(std::f64::consts::FRAC_1_SQRT_2);
    let six = T::of(6.0) * s;
    let d = x1 - x2;
    let sum = (x1 + x2) * s;
    let b1 = three + c * d * d - sum;
    let b2 = three + c * d * d + sum;
    let b3 = d + six;
    let b4 = -d + six;
    b1.min(b2).min(b3.min(b4))
}

/// 10 − Σ (xᵢ² − 5 cos 2πxᵢ).
pub fn rastrigin_mod<T: Scalar>(x1: T, x2: T) -> T {
    let term = |x: T| x * x - T::of(5.0) * (T::TAU() * x).cos();
    T::of(10.0) - term(x1) - term(x2)
}

/// Undamped single-degree-of-freedom oscillator under a rectangular pulse.
pub fn oscillator<T: Scalar>(c1: T, c2: T, m: T, r: T, t1: T, f1: T) -> Result<T> {
    let k = c1 + c2;
    if !(m > T::zero()) || !(k > T::zero()) {
        return Err(Error::Domain(format!(
            "oscillator needs positive mass and stiffness, got m={m}, c1+c2={k}"
        )));
    }
    let w0 = (k / m).sqrt();
    let two = T::of(2.0);
    Ok(T::of(3.0) * r - (two * f1 / (m * w0 * w0) * (w0 * t1 / two).sin()).abs())
}

/// Load angles of the tube, in degrees.
pub const TUBE_THETA1_DEG: f64 = 5.0;
pub const TUBE_THETA2_DEG: f64 = 10.0;

/// Stress state of the cantilever tube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeStress<T> {
    pub area: T,
    pub moment: T,
    pub inertia: T,
    pub sigma_x: T,
    pub tau_zx: T,
    pub sigma_max: T,
}

#[allow(clippy::too_many_arguments)]
pub fn tube_stress<T: Scalar>(t: T, d: T, f1: T, f2: T, torque: T, l1: T, l2: T, p: T) -> Result<TubeStress<T>> {
    let two = T::of(2.0);
    if !(t > T::zero()) || !(d > two * t) {
        return Err(Error::Domain(format!(
            "tube wall needs d > 2t > 0, got t={t}, d={d}"
        )));
    }
    let (th1, th2) = (T::of(TUBE_THETA1_DEG.to_radians()), T::of(TUBE_THETA2_DEG.to_radians()));
    let inner = d - two * t;
    let pi = T::PI();
    let area = pi / T::of(4.0) * (d * d - inner * inner);
    let moment = f1 * l1 * th1.cos() + f2 * l2 * th2.cos();
    let c = d / two;
    let inertia = pi / T::of(64.0) * (d.powi(4) - inner.powi(4));
    let sigma_x = (p + f1 * th1.sin() + f2 * th2.sin()) / area + moment * c / inertia;
    let polar = two * inertia;
    let tau_zx = torque * d / (two * polar);
    let sigma_max = (sigma_x * sigma_x + T::of(3.0) * tau_zx * tau_zx).sqrt();
    Ok(TubeStress {
        area,
        moment,
        inertia,
        sigma_x,
        tau_zx,
        sigma_max,
    })
}

/// σ_cap − von Mises stress.
#[allow(clippy::too_many_arguments)]
pub fn cantilever_tube<T: Scalar>(
    t: T,
    d: T,
    f1: T,
    f2: T,
    torque: T,
    sigma_cap: T,
    l1: T,
    l2: T,
    p: T,
) -> Result<T> {
    Ok(sigma_cap - tube_stress(t, d, f1, f2, torque, l1, l2, p)?.sigma_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BenchmarkKind {
    #[serde(rename = "series4")]
    Series4,
    #[serde(rename = "rastrigin2")]
    Rastrigin2,
    #[serde(rename = "oscillator6")]
    Oscillator6,
    #[serde(rename = "tube9")]
    Tube9,
}

impl BenchmarkKind {
    pub const ALL: [BenchmarkKind; 4] = [
        BenchmarkKind::Series4,
        BenchmarkKind::Rastrigin2,
        BenchmarkKind::Oscillator6,
        BenchmarkKind::Tube9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkKind::Series4 => "series4",
            BenchmarkKind::Rastrigin2 => "rastrigin2",
            BenchmarkKind::Oscillator6 => "oscillator6",
            BenchmarkKind::Tube9 => "tube9",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Reference crude Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePf {
    pub pf: f64,
    pub cov: f64,
    pub n_mcs: usize,
}

/// A registered limit state with its random vector and default settings.
#[derive(Clone, Debug)]
pub struct Benchmark<T> {
    kind: BenchmarkKind,
    rv: RandomVector<T>,
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl<T: Scalar> Benchmark<T> {
    pub fn new(kind: BenchmarkKind) -> Self {
        let n = |m: f64, s: f64| Marginal::normal(T::of(m), T::of(s)).expect("valid constant");
        let rv = match kind {
            BenchmarkKind::Series4 | BenchmarkKind::Rastrigin2 => RandomVector::standard_normal(2),
            BenchmarkKind::Oscillator6 => RandomVector::with_names(
                names(&["c1", "c2", "m", "r", "t1", "F1"]),
                vec![n(1.0, 0.1), n(0.1, 0.01), n(1.0, 0.05), n(0.5, 0.05), n(1.0, 0.2), n(1.0, 0.2)],
            ),
            BenchmarkKind::Tube9 => RandomVector::with_names(
                names(&["t", "d", "F1", "F2", "T", "sigma_cap", "L1", "L2", "P"]),
                vec![
                    n(5.0, 0.1),
                    n(42.0, 0.5),
                    n(3.0e3, 0.3e3),
                    n(3.0e3, 0.3e3),
                    n(90.0e3, 9.0e3),
                    n(220.0, 22.0),
                    Marginal::uniform(T::of(119.75), T::of(120.25)).expect("valid constant"),
                    Marginal::uniform(T::of(59.75), T::of(60.25)).expect("valid constant"),
                    Marginal::gumbel(T::of(27.0e3), T::of(2.7e3)).expect("valid constant"),
                ],
            ),
        }
        .expect("valid constant");
        Self { kind, rv }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        BenchmarkKind::from_name(name).map(Self::new)
    }

    pub fn all() -> Vec<Self> {
        BenchmarkKind::ALL.into_iter().map(Self::new).collect()
    }

    pub fn kind(&self) -> BenchmarkKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn rv(&self) -> &RandomVector<T> {
        &self.rv
    }

    pub fn reference(&self) -> ReferencePf {
        let (pf, cov, n_mcs) = match self.kind {
            BenchmarkKind::Series4 => (4.498e-3, 0.015, 1_000_000),
            BenchmarkKind::Rastrigin2 => (7.308e-2, 0.015, 60_000),
            BenchmarkKind::Oscillator6 => (2.847e-2, 0.022, 70_000),
            BenchmarkKind::Tube9 => (6.850e-3, 0.05, 60_000),
        };
        ReferencePf { pf, cov, n_mcs }
    }

    /// Initial pool size and pool increment.
    pub fn default_pool(&self) -> (usize, usize) {
        match self.kind {
            BenchmarkKind::Series4 => (100_000, 100_000),
            _ => (10_000, 10_000),
        }
    }

    pub fn default_cov_thr(&self) -> f64 {
        match self.kind {
            BenchmarkKind::Series4 | BenchmarkKind::Rastrigin2 => 0.015,
            BenchmarkKind::Oscillator6 => 0.022,
            BenchmarkKind::Tube9 => 0.05,
        }
    }

    /// Reference mean number of calls of AK-MCS over repeated runs.
    pub fn reference_ak_mcs_calls(&self) -> f64 {
        match self.kind {
            BenchmarkKind::Series4 => 90.96,
            BenchmarkKind::Rastrigin2 => 510.40,
            BenchmarkKind::Oscillator6 => 60.56,
            BenchmarkKind::Tube9 => 83.12,
        }
    }

    pub fn g(&self, x: &[T]) -> Result<T> {
        if x.len() != self.rv.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.rv.dim(),
                got: x.len(),
            });
        }
        match self.kind {
            BenchmarkKind::Series4 => Ok(series_system(x[0], x[1])),
            BenchmarkKind::Rastrigin2 => Ok(rastrigin_mod(x[0], x[1])),
            BenchmarkKind::Oscillator6 => oscillator(x[0], x[1], x[2], x[3], x[4], x[5]),
            BenchmarkKind::Tube9 => cantilever_tube(x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[8]),
        }
    }
}

impl<T: Scalar> LimitState<T> for Benchmark<T> {
    fn dim(&self) -> usize {
        self.rv.dim()
    }

    fn evaluate(&self, x: &[T]) -> std::result::Result<T, String> {
        self.g(x).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn series_examples_and_symmetry() {
        assert_abs_diff_eq!(series_system(0.0, 0.0), 3.0, epsilon = 1e-15);
        let a = 3.0 / 2f64.sqrt();
        assert_abs_diff_eq!(series_system(a, a), 0.0, epsilon = 1e-14);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (x, y): (f64, f64) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            assert_eq!(series_system(x, y), series_system(y, x));
            assert_abs_diff_eq!(series_system(x, y), series_system(-x, -y), epsilon = 1e-14);
        }
    }

    #[test]
    fn rastrigin_examples_and_parity() {
        assert_abs_diff_eq!(rastrigin_mod(0.0, 0.0), 20.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rastrigin_mod(0.5, 0.0), 9.75, epsilon = 1e-14);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let (x, y): (f64, f64) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            assert_eq!(rastrigin_mod(x, y), rastrigin_mod(-x, y));
            assert_eq!(rastrigin_mod(x, y), rastrigin_mod(x, -y));
        }
    }

    #[test]
    fn oscillator_examples() {
        let g = oscillator(1.0, 0.1, 1.0, 0.5, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(g, 0.589_640_8, epsilon = 1e-6);
        assert_eq!(oscillator(1.0, 0.1, 1.0, 0.5, 1.0, 0.0).unwrap(), 1.5);
        assert_eq!(oscillator(1.0, 0.1, 1.0, 0.5, 0.0, 1.0).unwrap(), 1.5);
        assert!(oscillator(1.0, 0.1, 0.0, 0.5, 1.0, 1.0).is_err());
        assert!(oscillator(-1.0, 0.1, 1.0, 0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn tube_mean_point() {
        let s = tube_stress(5.0, 42.0, 3e3, 3e3, 90e3, 120.0, 60.0, 27e3).unwrap();
        assert_abs_diff_eq!(s.area, 581.19, epsilon = 0.01);
        assert_abs_diff_eq!(s.moment, 5.359e5, epsilon = 50.0);
        assert_abs_diff_eq!(s.inertia, 1.0127e5, epsilon = 5.0);
        assert_abs_diff_eq!(s.sigma_x, 158.9, epsilon = 0.05);
        assert_abs_diff_eq!(s.tau_zx, 9.33, epsilon = 0.005);
        let b = Benchmark::<f64>::new(BenchmarkKind::Tube9);
        let g = b.g(&b.rv().means()).unwrap();
        assert_abs_diff_eq!(g, 60.3, epsilon = 0.05);
    }

    #[test]
    fn tube_without_torque_and_monotone_in_axial_load() {
        let s = tube_stress::<f64>(5.0, 42.0, 3e3, 3e3, 0.0, 120.0, 60.0, 27e3).unwrap();
        assert_eq!(s.sigma_max, s.sigma_x.abs());
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let p = 20e3 + 1e3 * k as f64;
            let g = cantilever_tube(5.0, 42.0, 3e3, 3e3, 90e3, 220.0, 120.0, 60.0, p).unwrap();
            assert!(g < prev);
            prev = g;
        }
        assert!(cantilever_tube(21.0, 42.0, 3e3, 3e3, 90e3, 220.0, 120.0, 60.0, 27e3).is_err());
        assert!(cantilever_tube(0.0, 42.0, 3e3, 3e3, 90e3, 220.0, 120.0, 60.0, 27e3).is_err());
    }

    #[test]
    fn tube_stresses_are_unit_homogeneous() {
        // Lengths ×10 and forces ×100 leave stresses unchanged.
        let a = tube_stress(5.0, 42.0, 3e3, 3e3, 90e3, 120.0, 60.0, 27e3).unwrap();
        let b = tube_stress(50.0, 420.0, 3e5, 3e5, 90e3 * 1e3, 1200.0, 600.0, 27e5).unwrap();
        assert_abs_diff_eq!(a.sigma_x, b.sigma_x, epsilon = 1e-10);
        assert_abs_diff_eq!(a.tau_zx, b.tau_zx, epsilon = 1e-10);
    }

    #[test]
    fn registry() {
        for name in ["series4", "rastrigin2", "oscillator6", "tube9"] {
            let b = Benchmark::<f64>::by_name(name).unwrap();
            assert_eq!(b.name(), name);
            assert_eq!(LimitState::dim(&b), b.rv().dim());
        }
        assert!(Benchmark::<f64>::by_name("nope").is_none());
        let dims: Vec<usize> = Benchmark::<f64>::all().iter().map(|b| b.rv().dim()).collect();
        assert_eq!(dims, vec![2, 2, 6, 9]);
    }

    #[test]
    fn batch_equals_pointwise() {
        let b = Benchmark::<f64>::new(BenchmarkKind::Oscillator6);
        let pts = crate::random::lhs_sample(b.rv(), 64, 1);
        let batch = b.evaluate_batch(pts.values());
        for (row, r) in pts.iter_rows().zip(batch) {
            assert_eq!(r.unwrap().to_bits(), b.g(row).unwrap().to_bits());
        }
    }
}
