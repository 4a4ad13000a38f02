//! Reference implementations written independently of the library's
//! assembly and stepping code. Shared by the property and acceptance suites.
#![allow(dead_code)]

use fracdiff::solver::{load_vector, project_initial};
use fracdiff::{Mesh, Nodal, Problem};

/// Tridiagonal matrix as three dense diagonals of equal length
/// (`lower[0]` and `upper[n-1]` unused).
#[derive(Clone, Debug)]
pub struct Band {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Band {
    pub fn constant(n: usize, d: f64, off: f64) -> Self {
        Band {
            lower: vec![off; n],
            diag: vec![d; n],
            upper: vec![off; n],
        }
    }

    /// `a·self + b·other`.
    pub fn lin(&self, a: f64, other: &Band, b: f64) -> Band {
        let f = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        Band {
            lower: f(&self.lower, &other.lower),
            diag: f(&self.diag, &other.diag),
            upper: f(&self.upper, &other.upper),
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Gaussian elimination without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = self.upper[0] / self.diag[0];
        d[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let denom = self.diag[i] - self.lower[i] * c[i - 1];
            c[i] = self.upper[i] / denom;
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }
}

pub fn mass(n_cells: usize) -> Band {
    let h = 1.0 / n_cells as f64;
    Band::constant(n_cells - 1, 4.0 * h / 6.0, h / 6.0)
}

pub fn stiffness(n_cells: usize) -> Band {
    let h = 1.0 / n_cells as f64;
    Band::constant(n_cells - 1, 2.0 / h, -1.0 / h)
}

/// Backward-Euler CQ coefficients from the binomial series of `(1 − ζ)^{1−α}`.
pub fn binomial_weights(alpha: f64, count: usize) -> Vec<f64> {
    let beta = 1.0 - alpha;
    let mut g = vec![1.0; count];
    for i in 1..count {
        // (−1)^i C(β, i) = (−1)^{i−1} C(β, i−1) · (−(β − i + 1)/i)
        g[i] = -g[i - 1] * (beta - (i as f64 - 1.0)) / i as f64;
    }
    g
}

/// The fully discrete scheme with the coefficient frozen at `t_m` in the
/// implicit operator and the difference `κ(t_n) − κ(t_m)` carried as a
/// separate correction on the history. `m = None` means `m = n` at each step.
pub fn frozen_index_trajectory(
    spec: &Problem,
    n_cells: usize,
    n_steps: usize,
    m: Option<usize>,
) -> Vec<Vec<f64>> {
    let mesh = Mesh::new(n_cells).unwrap();
    let tau = spec.final_time() / n_steps as f64;
    let alpha = spec.alpha();
    let scale = tau.powf(alpha - 1.0);
    let d: Vec<f64> = binomial_weights(alpha, n_steps + 1)
        .iter()
        .map(|g| scale * g)
        .collect();
    let m_mat = mass(n_cells);
    let s_mat = stiffness(n_cells);
    let kappa = |t: f64| spec.coefficient().kappa(t);

    let mut traj = vec![project_initial(spec, &mesh).unwrap().into_values()];
    for n in 1..=n_steps {
        let t_n = tau * n as f64;
        let k_m = kappa(tau * m.unwrap_or(n) as f64);
        let k_n = kappa(t_n);
        let dofs = n_cells - 1;
        let mut hist = vec![0.0; dofs];
        for i in 1..n {
            for (h, w) in hist.iter_mut().zip(&traj[n - i]) {
                *h += d[i] * w;
            }
        }
        // frozen operator plus the d_0 share of the correction
        let lhs = m_mat
            .lin(1.0 / tau, &s_mat, d[0] * k_m)
            .lin(1.0, &s_mat, d[0] * (k_n - k_m));
        let b = load_vector(spec.source(), &mesh, t_n)
            .unwrap()
            .into_values();
        let mw = m_mat.mul(&traj[n - 1]);
        let sh = s_mat.mul(&hist);
        let rhs: Vec<f64> = (0..dofs)
            .map(|j| mw[j] / tau + b[j] - k_m * sh[j] - (k_n - k_m) * sh[j])
            .collect();
        traj.push(lhs.solve(&rhs));
    }
    traj
}

/// Classical backward Euler for `u_t = κ u_xx + φ(t) g(x)` with `W⁰` and the
/// load given as exact hat-function moments.
pub fn backward_euler_heat(
    n_cells: usize,
    kappa: f64,
    tau: f64,
    n_steps: usize,
    initial_moments: &[f64],
    load_moments: &[f64],
    time_factor: impl Fn(f64) -> f64,
) -> Vec<Vec<f64>> {
    let m_mat = mass(n_cells);
    let s_mat = stiffness(n_cells);
    let lhs = m_mat.lin(1.0, &s_mat, tau * kappa);
    let mut traj = vec![m_mat.solve(initial_moments)];
    for n in 1..=n_steps {
        let phi = time_factor(tau * n as f64);
        let mw = m_mat.mul(&traj[n - 1]);
        let rhs: Vec<f64> = mw
            .iter()
            .zip(load_moments)
            .map(|(a, g)| a + tau * phi * g)
            .collect();
        traj.push(lhs.solve(&rhs));
    }
    traj
}

/// `∫ χ_[a,b] φ_j` for every interior hat, by direct case analysis.
pub fn indicator_moments(n_cells: usize, a: f64, b: f64) -> Vec<f64> {
    let h = 1.0 / n_cells as f64;
    // ∫_lo^hi of the hat centred at x_j, with lo/hi clipped to its support.
    let hat_integral = |xj: f64, lo: f64, hi: f64| -> f64 {
        let prim = |x: f64| -> f64 {
            // antiderivative of max(0, 1 − |x − xj|/h) on [xj − h, xj + h]
            let s = ((x - xj) / h).clamp(-1.0, 1.0);
            h * if s <= 0.0 {
                s + s * s / 2.0 + 0.5
            } else {
                0.5 + s - s * s / 2.0
            }
        };
        prim(hi) - prim(lo)
    };
    (1..n_cells)
        .map(|j| {
            let xj = j as f64 * h;
            hat_integral(xj, a.max(xj - h), b.min(xj + h).max(a.max(xj - h)))
        })
        .collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn nodal_max_diff(a: &Nodal, b: &[f64]) -> f64 {
    max_diff(a.values(), b)
}
