use crate::error::{Error, Result};
use crate::random::Marginal;
use crate::scalar::Scalar;

/// Independent random vector: an ordered list of marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomVector<T> {
    names: Vec<String>,
    marginals: Vec<Marginal<T>>,
}

impl<T: Scalar> RandomVector<T> {
    /// Variables are named `x1`, `x2`, ... in order.
    pub fn new(marginals: Vec<Marginal<T>>) -> Result<Self> {
        let names = (1..=marginals.len()).map(|i| format!("x{i}")).collect();
        Self::with_names(names, marginals)
    }

    pub fn with_names(names: Vec<String>, marginals: Vec<Marginal<T>>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::EmptyRandomVector);
        }
        if names.len() != marginals.len() {
            return Err(Error::DimensionMismatch {
                expected: marginals.len(),
                got: names.len(),
            });
        }
        Ok(Self { names, marginals })
    }

    /// `n` i.i.d. standard normals.
    pub fn standard_normal(n: usize) -> Result<Self> {
        Self::new(vec![Marginal::standard_normal(); n])
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[Marginal<T>] {
        &self.marginals
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn means(&self) -> Vec<T> {
        self.marginals.iter().map(Marginal::mean).collect()
    }

    /// Product of the marginal densities, multiplied left to right starting
    /// from one, so it equals the same product written out by hand.
    pub fn joint_pdf(&self, x: &[T]) -> Result<T> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.joint_pdf_unchecked(x))
    }

    pub(crate) fn joint_pdf_unchecked(&self, x: &[T]) -> T {
        self.marginals
            .iter()
            .zip(x)
            .fold(T::one(), |acc, (m, &xi)| acc * m.pdf(xi))
    }
}
