//! Power-iteration estimates of discretized `L² → L²` operator norms.

use crate::error::{Error, Result};

use super::scalar::SparseOperator;

/// A linear map between weighted sample spaces `ℓ²(w_in) → ℓ²(w_out)`.
pub trait LinearMap {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, v: &[f64]) -> Vec<f64>;
    /// The transpose with respect to the unweighted pairing.
    fn apply_transpose(&self, v: &[f64]) -> Vec<f64>;
}

impl LinearMap for SparseOperator {
    fn dim_in(&self) -> usize {
        SparseOperator::dim_in(self)
    }
    fn dim_out(&self) -> usize {
        SparseOperator::dim_out(self)
    }
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        SparseOperator::apply(self, v)
    }
    fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        SparseOperator::apply_transpose(self, v)
    }
}

/// Result of a power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// Relative change of the estimate over the last iteration.
    pub last_change: f64,
    pub converged: bool,
}

impl NormEstimate {
    pub fn require(self) -> Result<f64> {
        if !self.converged {
            return Err(Error::nonconvergence(
                "operator_norm_estimate",
                format!(
                    "{} iterations, last relative change {:e}",
                    self.iterations, self.last_change
                ),
            ));
        }
        Ok(self.value)
    }
}

fn weighted_norm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| a * a * b).sum::<f64>().sqrt()
}

/// Estimates `‖A‖` from `ℓ²(w_in)` to `ℓ²(w_out)` by power iteration on
/// `A*A` with `A* = W_in^{−1} Aᵀ W_out`, started from the constant vector.
pub fn operator_norm_estimate(
    op: &impl LinearMap,
    w_in: &[f64],
    w_out: &[f64],
    max_iterations: usize,
    rel_tol: f64,
) -> Result<NormEstimate> {
    if w_in.len() != op.dim_in() || w_out.len() != op.dim_out() {
        return Err(Error::precondition(
            "operator_norm_estimate",
            "weights do not match the operator dimensions",
        ));
    }
    if w_in.iter().chain(w_out).any(|&w| !(w > 0.0)) {
        return Err(Error::precondition(
            "operator_norm_estimate",
            "weights must be positive",
        ));
    }
    let mut v = vec![1.0; op.dim_in()];
    let n0 = weighted_norm(&v, w_in);
    v.iter_mut().for_each(|x| *x /= n0);
    let mut est = 0.0;
    let mut change = f64::INFINITY;
    for it in 1..=max_iterations {
        let av = op.apply(&v);
        let next = weighted_norm(&av, w_out);
        if next == 0.0 {
            return Ok(NormEstimate {
                value: 0.0,
                iterations: it,
                last_change: 0.0,
                converged: true,
            });
        }
        change = if est > 0.0 {
            (next - est).abs() / next
        } else {
            f64::INFINITY
        };
        est = next;
        if change <= rel_tol {
            return Ok(NormEstimate {
                value: est,
                iterations: it,
                last_change: change,
                converged: true,
            });
        }
        let weighted: Vec<f64> = av.iter().zip(w_out).map(|(a, w)| a * w).collect();
        let mut u = op.apply_transpose(&weighted);
        u.iter_mut().zip(w_in).for_each(|(x, w)| *x /= w);
        let nu = weighted_norm(&u, w_in);
        if nu == 0.0 {
            break;
        }
        v = u.into_iter().map(|x| x / nu).collect();
    }
    Ok(NormEstimate {
        value: est,
        iterations: max_iterations,
        last_change: change,
        converged: false,
    })
}
