//! Ordinary Kriging computed by inverting the correlation matrix directly.

/// Gauss-Jordan inverse with partial pivoting.
fn invert(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap();
        for k in 0..n {
            m.swap(col * n + k, piv * n + k);
            inv.swap(col * n + k, piv * n + k);
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = m[i * n + col];
                for k in 0..n {
                    m[i * n + k] -= f * m[col * n + k];
                    inv[i * n + k] -= f * inv[col * n + k];
                }
            }
        }
    }
    inv
}

fn corr(a: &[f64], b: &[f64], theta: &[f64]) -> f64 {
    let s: f64 = a.iter().zip(b).zip(theta).map(|((x, y), t)| t * (x - y) * (x - y)).sum();
    (-s).exp()
}

pub struct Naive {
    pub beta: f64,
    pub sigma2: f64,
    rinv: Vec<f64>,
    x: Vec<f64>,
    resid: Vec<f64>,
    one_rinv_one: f64,
    theta: Vec<f64>,
    dim: usize,
}

impl Naive {
    pub fn new(x: &[f64], dim: usize, y: &[f64], theta: &[f64], nugget: f64) -> Self {
        let m = y.len();
        let mut r = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                r[i * m + j] = corr(&x[i * dim..][..dim], &x[j * dim..][..dim], theta);
            }
            r[i * m + i] += nugget;
        }
        let rinv = invert(&r, m);
        let mul = |v: &[f64]| -> Vec<f64> { (0..m).map(|i| (0..m).map(|j| rinv[i * m + j] * v[j]).sum()).collect() };
        let ones = vec![1.0; m];
        let rinv_one = mul(&ones);
        let one_rinv_one: f64 = rinv_one.iter().sum();
        let beta = rinv_one.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / one_rinv_one;
        let resid: Vec<f64> = y.iter().map(|v| v - beta).collect();
        let sigma2 = resid.iter().zip(mul(&resid)).map(|(a, b)| a * b).sum::<f64>() / m as f64;
        Self {
            beta,
            sigma2,
            rinv,
            x: x.to_vec(),
            resid,
            one_rinv_one,
            theta: theta.to_vec(),
            dim,
        }
    }

    pub fn predict(&self, q: &[f64]) -> (f64, f64) {
        let m = self.resid.len();
        let r: Vec<f64> = (0..m).map(|i| corr(&self.x[i * self.dim..][..self.dim], q, &self.theta)).collect();
        let rinv_r: Vec<f64> = (0..m).map(|i| (0..m).map(|j| self.rinv[i * m + j] * r[j]).sum()).collect();
        let mean = self.beta + rinv_r.iter().zip(&self.resid).map(|(a, b)| a * b).sum::<f64>();
        let r_rinv_r: f64 = r.iter().zip(&rinv_r).map(|(a, b)| a * b).sum();
        let one_rinv_r: f64 = rinv_r.iter().sum();
        let var = self.sigma2 * (1.0 - r_rinv_r + (one_rinv_r - 1.0).powi(2) / self.one_rinv_one);
        (mean, var)
    }
}
