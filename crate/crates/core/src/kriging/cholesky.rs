use crate::scalar::Scalar;

/// Lower-triangular Cholesky factor stored row-packed, so a row can be
/// appended when the factored matrix grows by one bordering row/column.
#[derive(Clone, Debug, PartialEq)]
pub struct Cholesky<T> {
    n: usize,
    packed: Vec<T>,
}

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl<T: Scalar> Cholesky<T> {
    /// Factors the symmetric `n × n` row-major matrix `a`. Only the lower
    /// triangle is read. Returns `None` on a non-positive or non-finite pivot.
    pub fn factor(a: &[T], n: usize) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut packed = vec![T::zero(); row_start(n)];
        for i in 0..n {
            let ri = row_start(i);
            for j in 0..=i {
                let rj = row_start(j);
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= packed[ri + k] * packed[rj + k];
                }
                if i == j {
                    if !(s > T::zero()) || !s.is_finite() {
                        return None;
                    }
                    packed[ri + i] = s.sqrt();
                } else {
                    packed[ri + j] = s / packed[rj + j];
                }
            }
        }
        Some(Self { n, packed })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.packed[row_start(i)..row_start(i + 1)]
    }

    pub fn diag(&self, i: usize) -> T {
        self.packed[row_start(i) + i]
    }

    /// ln det(A) = 2 Σ ln L_ii.
    pub fn log_det(&self) -> T {
        (0..self.n).map(|i| self.diag(i).ln()).sum::<T>() * T::of(2.0)
    }

    /// In-place forward substitution: b ← L⁻¹ b.
    pub fn solve_lower_in_place(&self, b: &mut [T]) {
        debug_assert_eq!(b.len(), self.n);
        for i in 0..self.n {
            let row = self.row(i);
            let mut s = b[i];
            for k in 0..i {
                s -= row[k] * b[k];
            }
            b[i] = s / row[i];
        }
    }

    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_lower_in_place(&mut x);
        x
    }

    /// In-place back substitution: b ← L⁻ᵀ b.
    pub fn solve_upper_in_place(&self, b: &mut [T]) {
        debug_assert_eq!(b.len(), self.n);
        for i in (0..self.n).rev() {
            let bi = b[i] / self.diag(i);
            b[i] = bi;
            let row = self.row(i);
            for k in 0..i {
                b[k] -= row[k] * bi;
            }
        }
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = self.solve_lower(b);
        self.solve_upper_in_place(&mut x);
        x
    }

    /// Borders the factor with a new last row `[l, d]`, where `l = L⁻¹ a`
    /// for the new off-diagonal column `a` and `d² = a_nn − lᵀl`.
    pub fn push_row(&mut self, l: &[T], d: T) {
        debug_assert_eq!(l.len(), self.n);
        self.packed.extend_from_slice(l);
        self.packed.push(d);
        self.n += 1;
    }
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}
