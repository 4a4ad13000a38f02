//! Backward-Euler convolution quadrature for the Riemann–Liouville derivative
//! of order `1 − α`.
//!
//! The weights are the Taylor coefficients of the generating function
//!
//! ```text
//! Σ_{i≥0} d_i ζ^i = δ_τ(ζ)^{1−α},   δ_τ(ζ) = (1 − ζ)/τ,
//! ```
//!
//! i.e. `d_i = τ^{α−1} g_i` with `g_i = (−1)^i binom(1−α, i)`, generated by the
//! multiplicative recurrence `g_0 = 1`, `g_i = g_{i−1}·(i − 2 + α)/i`.
use crate::fem1d::NodalVector;
use crate::{Error, Result, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct CqWeights<T> {
    alpha: T,
    tau: T,
    scale: T,
    g: Vec<T>,
}

/// Validates `0 < alpha ≤ 1`.
pub(crate) fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "alpha must lie in (0,1], got {alpha}"
        )))
    }
}

/// Generates `count` weights `d_0 … d_{count−1}`.
pub fn generate<T: Scalar>(alpha: T, tau: T, count: usize) -> Result<CqWeights<T>> {
    CqWeights::new(alpha, tau, count)
}

impl<T: Scalar> CqWeights<T> {
    pub fn new(alpha: T, tau: T, count: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if !(tau > T::zero() && tau.is_finite()) {
            return Err(Error::invalid(format!(
                "step size must be positive, got {tau}"
            )));
        }
        if count == 0 {
            return Err(Error::invalid("at least one weight must be requested"));
        }
        let two = T::lit(2.0);
        let mut g = Vec::with_capacity(count);
        g.push(T::one());
        for i in 1..count {
            let fi = T::from_count(i);
            let prev = g[i - 1];
            g.push(prev * (fi - two + alpha) / fi);
        }
        Ok(CqWeights {
            alpha,
            tau,
            scale: tau.powf(alpha - T::one()),
            g,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// Dimensionless coefficients `g_i`.
    pub fn coefficients(&self) -> &[T] {
        &self.g
    }

    /// `τ^{α−1}`.
    pub fn scale(&self) -> T {
        self.scale
    }

    /// Weight `d_i = τ^{α−1} g_i`.
    pub fn weight(&self, i: usize) -> T {
        self.scale * self.g[i]
    }

    /// `Σ_i d_i W^{n−i}` over `i = 0..n−1`, or `i = 1..n−1` when
    /// `exclude_current` is set (the implicit stepper keeps `d_0 W^n` on the
    /// left-hand side). `states[k]` holds `W^k`; `W^n` is only read when it is
    /// part of the sum.
    pub fn history_sum(
        &self,
        states: &[NodalVector<T>],
        n: usize,
        exclude_current: bool,
    ) -> Result<NodalVector<T>> {
        if n == 0 {
            return Err(Error::invalid("history sum needs n ≥ 1"));
        }
        if self.len() < n {
            return Err(Error::invalid(format!(
                "history sum up to n = {n} needs {n} weights, only {} generated",
                self.len()
            )));
        }
        let needed = if exclude_current { n } else { n + 1 };
        if states.len() < needed {
            return Err(Error::invalid(format!(
                "history sum up to n = {n} needs {needed} states, got {}",
                states.len()
            )));
        }
        let mut out = states[0].scaled(T::zero());
        let first = usize::from(exclude_current);
        for i in first..n {
            out.axpy(self.weight(i), &states[n - i]);
        }
        Ok(out)
    }
}
