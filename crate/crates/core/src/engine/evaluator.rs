use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::scalar::Scalar;

/// A performance function g: ℝⁿ → ℝ; g ≤ 0 is failure.
pub trait LimitState<T>: Send + Sync {
    fn dim(&self) -> usize;

    fn evaluate(&self, x: &[T]) -> Result<T, String>;

    /// Evaluates every row of `points`; equal to pointwise evaluation.
    fn evaluate_batch(&self, points: &[T]) -> Vec<Result<T, String>>
    where
        T: Scalar,
    {
        points.par_chunks(self.dim()).map(|x| self.evaluate(x)).collect()
    }
}

impl<T, L: LimitState<T> + ?Sized> LimitState<T> for &L {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn evaluate(&self, x: &[T]) -> Result<T, String> {
        (**self).evaluate(x)
    }
}

impl<T, L: LimitState<T> + ?Sized> LimitState<T> for Box<L> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn evaluate(&self, x: &[T]) -> Result<T, String> {
        (**self).evaluate(x)
    }
}

/// Wraps a plain function or closure.
pub struct FnLimitState<F> {
    dim: usize,
    f: F,
}

impl<F> FnLimitState<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T, F> LimitState<T> for FnLimitState<F>
where
    F: Fn(&[T]) -> T + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[T]) -> Result<T, String> {
        Ok((self.f)(x))
    }
}

struct Pipe {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

/// External model behind a line protocol: for every point one line of
/// whitespace-separated inputs is written to the child's stdin, and one
/// line holding a single number is read back from its stdout.
pub struct SubprocessEvaluator {
    dim: usize,
    pipe: Mutex<Pipe>,
}

impl SubprocessEvaluator {
    /// Starts `program` with `args`.
    pub fn spawn(program: &str, args: &[String], dim: usize) -> std::io::Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self {
            dim,
            pipe: Mutex::new(Pipe {
                child,
                stdin,
                stdout,
            }),
        })
    }
}

impl Drop for SubprocessEvaluator {
    fn drop(&mut self) {
        if let Ok(pipe) = self.pipe.get_mut() {
            let _ = pipe.child.kill();
            let _ = pipe.child.wait();
        }
    }
}

impl<T: Scalar> LimitState<T> for SubprocessEvaluator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[T]) -> Result<T, String> {
        let mut pipe = self.pipe.lock().map_err(|_| "evaluator poisoned".to_string())?;
        let line = x
            .iter()
            .map(|v| format!("{:?}", v.as_f64()))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(pipe.stdin, "{line}")
            .and_then(|_| pipe.stdin.flush())
            .map_err(|e| format!("write to evaluator: {e}"))?;
        let mut reply = String::new();
        let n = pipe
            .stdout
            .read_line(&mut reply)
            .map_err(|e| format!("read from evaluator: {e}"))?;
        if n == 0 {
            return Err("evaluator closed its output".into());
        }
        let value: f64 = reply
            .trim()
            .parse()
            .map_err(|_| format!("unparsable evaluator output {:?}", reply.trim()))?;
        Ok(T::of(value))
    }

    fn evaluate_batch(&self, points: &[T]) -> Vec<Result<T, String>> {
        points.chunks(self.dim).map(|x| self.evaluate(x)).collect()
    }
}
