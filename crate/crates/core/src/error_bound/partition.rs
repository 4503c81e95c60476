use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Pool indices ordered by increasing density, ties by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityRanking {
    order: Vec<usize>,
}

impl DensityRanking {
    pub fn new<T: Scalar>(density: &[T]) -> Self {
        let mut order: Vec<usize> = (0..density.len()).collect();
        // Stable sort keeps equal densities in index order.
        order.sort_by(|&a, &b| density[a].partial_cmp(&density[b]).unwrap_or(std::cmp::Ordering::Equal));
        Self { order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Split of the pool into the effective sampling region Ω₁ and the
/// excluded low-density set Ω₂.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsrPartition {
    pub esr_alpha: f64,
    /// Largest density inside Ω₂; zero when Ω₂ is empty.
    pub rho_thr: f64,
    pub omega1_idx: Vec<usize>,
    pub omega2_idx: Vec<usize>,
    pub pf_ref: f64,
    /// The requested Ω₂ size exceeded the pool; every point went to Ω₂.
    pub degenerate: bool,
}

impl EsrPartition {
    /// Membership flags for Ω₁ over `n` pool points.
    pub fn esr_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![true; n];
        for &i in &self.omega2_idx {
            mask[i] = false;
        }
        mask
    }
}

/// Number of excluded points: α·pf_ref·N rounded half to even.
pub fn omega2_size(esr_alpha: f64, pf_ref: f64, n: usize) -> (usize, bool) {
    let k = (esr_alpha * pf_ref * n as f64).round_ties_even();
    if !(k > 0.0) {
        (0, false)
    } else if k > n as f64 {
        (n, true)
    } else {
        (k as usize, false)
    }
}

/// Ω₂ = the round(α·pf_ref·N) lowest-density points.
pub fn build_partition<T: Scalar>(
    ranking: &DensityRanking,
    density: &[T],
    esr_alpha: f64,
    pf_ref: f64,
) -> EsrPartition {
    let n = ranking.len();
    assert_eq!(density.len(), n, "ranking and density lengths differ");
    let (k, degenerate) = omega2_size(esr_alpha, pf_ref, n);
    let mut omega2_idx = ranking.order()[..k].to_vec();
    let rho_thr = if k == 0 { 0.0 } else { density[ranking.order()[k - 1]].as_f64() };
    let mut in_two = vec![false; n];
    for &i in &omega2_idx {
        in_two[i] = true;
    }
    omega2_idx.sort_unstable();
    let omega1_idx = (0..n).filter(|&i| !in_two[i]).collect();
    EsrPartition {
        esr_alpha,
        rho_thr,
        omega1_idx,
        omega2_idx,
        pf_ref,
        degenerate,
    }
}
