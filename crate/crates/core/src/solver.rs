//! Fully discrete scheme: P1 elements in space, backward-Euler convolution
//! quadrature in time.
//!
//! With `H^n = Σ_{i=1}^{n−1} d_i W^{n−i}` each step solves the tridiagonal system
//!
//! ```text
//! (M/τ + d_0 κ(t_n) S) W^n = M W^{n−1}/τ + b(t_n) − κ(t_n) S H^n
//! ```
//!
//! where `b(t)` is the Galerkin load of the source. Writing the scheme with a
//! coefficient frozen at some `t_m` plus a correction `(A(t_m) − A(t_n))·…`
//! gives the same system after the frozen terms cancel, so no `m` appears here.
use crate::cq_weights::{check_alpha, CqWeights};
use crate::fem1d::{
    assemble_mass, assemble_stiffness, l2_project, ritz_project, Mesh1D, NodalVector, PiecewiseFn,
    TriDiagMatrix,
};
use crate::{Error, Result, Scalar};

/// Diffusivity law `κ(t) = 1/a²(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoefficientLaw<T> {
    Constant(T),
    /// `scale · t^exponent`
    Power {
        scale: T,
        exponent: T,
    },
}

impl<T: Scalar> CoefficientLaw<T> {
    pub fn constant(value: T) -> Self {
        CoefficientLaw::Constant(value)
    }

    pub fn power(scale: T, exponent: T) -> Self {
        CoefficientLaw::Power { scale, exponent }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientLaw::Constant(_))
    }

    pub fn kappa(&self, t: T) -> T {
        match *self {
            CoefficientLaw::Constant(s) => s,
            CoefficientLaw::Power { scale, exponent } => {
                if exponent == T::zero() {
                    scale
                } else {
                    scale * t.powf(exponent)
                }
            }
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let (scale, exponent) = match *self {
            CoefficientLaw::Constant(s) => (s, T::zero()),
            CoefficientLaw::Power { scale, exponent } => (scale, exponent),
        };
        if !(scale >= T::zero() && scale.is_finite()) {
            return Err(Error::invalid(format!(
                "coefficient scale must be finite and nonnegative, got {scale}"
            )));
        }
        if !(exponent >= T::zero() && exponent.is_finite()) {
            return Err(Error::invalid(format!(
                "coefficient exponent must be finite and nonnegative, got {exponent}"
            )));
        }
        Ok(())
    }
}

/// Time factor `φ(t) = scale · t^exponent` of a separable source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeProfile<T> {
    pub scale: T,
    pub exponent: T,
}

impl<T: Scalar> TimeProfile<T> {
    pub fn constant(value: T) -> Self {
        TimeProfile {
            scale: value,
            exponent: T::zero(),
        }
    }

    pub fn power(scale: T, exponent: T) -> Self {
        TimeProfile { scale, exponent }
    }

    pub fn value(&self, t: T) -> T {
        if self.exponent == T::zero() {
            self.scale
        } else {
            self.scale * t.powf(self.exponent)
        }
    }
}

/// Source term `f(x, t) = φ(t)·g(x)`, or zero.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceTerm<T> {
    Zero,
    Separable {
        time: TimeProfile<T>,
        space: PiecewiseFn<T>,
    },
}

impl<T: Scalar> SourceTerm<T> {
    pub fn zero() -> Self {
        SourceTerm::Zero
    }

    pub fn separable(time: TimeProfile<T>, space: PiecewiseFn<T>) -> Self {
        SourceTerm::Separable { time, space }
    }

    pub fn scaled(&self, a: T) -> Self {
        match self {
            SourceTerm::Zero => SourceTerm::Zero,
            SourceTerm::Separable { time, space } => SourceTerm::Separable {
                time: *time,
                space: space.scaled(a),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SourceTerm::Zero => true,
            SourceTerm::Separable { time, space } => time.scale == T::zero() || space.is_zero(),
        }
    }

    fn validate(&self) -> Result<()> {
        if let SourceTerm::Separable { time, .. } = self {
            if !(time.exponent >= T::zero() && time.exponent.is_finite()) {
                return Err(Error::invalid(format!(
                    "source time exponent must be finite and nonnegative, got {}",
                    time.exponent
                )));
            }
            if !time.scale.is_finite() {
                return Err(Error::invalid("source scale must be finite"));
            }
        }
        Ok(())
    }

    /// `∫ g φ_j`; `None` for a zero source.
    pub fn spatial_load(&self, mesh: &Mesh1D<T>) -> Option<Vec<T>> {
        match self {
            SourceTerm::Zero => None,
            SourceTerm::Separable { space, .. } => Some(space.integrate_against_hats(mesh)),
        }
    }

    pub fn time_factor(&self, t: T) -> T {
        match self {
            SourceTerm::Zero => T::zero(),
            SourceTerm::Separable { time, .. } => time.value(t),
        }
    }
}

/// Full problem description: order, horizon, diffusivity, initial datum and
/// source. The smoothness flag of `w0` selects the Ritz projection (smooth)
/// or the L² projection (rough) for the discrete initial value.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec<T> {
    alpha: T,
    final_time: T,
    coefficient: CoefficientLaw<T>,
    w0: PiecewiseFn<T>,
    source: SourceTerm<T>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(
        alpha: T,
        final_time: T,
        coefficient: CoefficientLaw<T>,
        w0: PiecewiseFn<T>,
        source: SourceTerm<T>,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        if !(final_time > T::zero() && final_time.is_finite()) {
            return Err(Error::invalid(format!(
                "final time must be positive, got {final_time}"
            )));
        }
        coefficient.validate()?;
        source.validate()?;
        Ok(ProblemSpec {
            alpha,
            final_time,
            coefficient,
            w0,
            source,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn final_time(&self) -> T {
        self.final_time
    }

    pub fn coefficient(&self) -> &CoefficientLaw<T> {
        &self.coefficient
    }

    pub fn initial(&self) -> &PiecewiseFn<T> {
        &self.w0
    }

    pub fn source(&self) -> &SourceTerm<T> {
        &self.source
    }

    pub fn with_alpha(&self, alpha: T) -> Result<Self> {
        Self::new(
            alpha,
            self.final_time,
            self.coefficient,
            self.w0.clone(),
            self.source.clone(),
        )
    }

    pub fn with_initial(&self, w0: PiecewiseFn<T>) -> Self {
        ProblemSpec { w0, ..self.clone() }
    }

    pub fn with_source(&self, source: SourceTerm<T>) -> Self {
        ProblemSpec {
            source,
            ..self.clone()
        }
    }

    /// True when both the initial datum and the source vanish.
    pub fn is_trivial(&self) -> bool {
        self.w0.is_zero() && self.source.is_zero()
    }
}

/// Trajectory `W^0 … W^L` on a fixed mesh with step `τ = T/L`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteRun<T> {
    mesh: Mesh1D<T>,
    n_steps: usize,
    tau: T,
    final_time: T,
    trajectory: Vec<NodalVector<T>>,
}

impl<T: Scalar> DiscreteRun<T> {
    /// Starts a run holding only the projected initial value.
    pub fn start(spec: &ProblemSpec<T>, mesh: Mesh1D<T>, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::invalid("number of time steps must be at least 1"));
        }
        let w0 = project_initial(spec, &mesh)?;
        let mut trajectory = Vec::with_capacity(n_steps + 1);
        trajectory.push(w0);
        Ok(DiscreteRun {
            mesh,
            n_steps,
            tau: spec.final_time() / T::from_count(n_steps),
            final_time: spec.final_time(),
            trajectory,
        })
    }

    pub fn mesh(&self) -> &Mesh1D<T> {
        &self.mesh
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    /// `t_n = n T / L`.
    pub fn time(&self, n: usize) -> T {
        self.final_time * T::from_count(n) / T::from_count(self.n_steps)
    }

    pub fn trajectory(&self) -> &[NodalVector<T>] {
        &self.trajectory
    }

    /// Number of steps taken so far.
    pub fn steps_done(&self) -> usize {
        self.trajectory.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.steps_done() == self.n_steps
    }

    pub fn state(&self, n: usize) -> &NodalVector<T> {
        &self.trajectory[n]
    }

    /// Latest computed state (`W^L` once complete).
    pub fn final_state(&self) -> &NodalVector<T> {
        self.trajectory.last().expect("trajectory holds W^0")
    }

    fn push(&mut self, w: NodalVector<T>) -> Result<()> {
        if self.is_complete() {
            return Err(Error::invalid("run already holds all time steps"));
        }
        self.trajectory.push(w);
        Ok(())
    }
}

/// Discrete initial value: `R_h W₀` for smooth-flagged data, `P_h W₀` otherwise.
pub fn project_initial<T: Scalar>(
    spec: &ProblemSpec<T>,
    mesh: &Mesh1D<T>,
) -> Result<NodalVector<T>> {
    let w0 = spec.initial();
    if w0.is_smooth() {
        ritz_project(w0, mesh)
    } else {
        l2_project(w0, mesh)
    }
}

/// Galerkin load `b_j = φ(t)·∫ g φ_j` at time `t ≥ 0`.
pub fn load_vector<T: Scalar>(
    source: &SourceTerm<T>,
    mesh: &Mesh1D<T>,
    t: T,
) -> Result<NodalVector<T>> {
    if !(t >= T::zero()) {
        return Err(Error::invalid(format!(
            "load time must be nonnegative, got {t}"
        )));
    }
    match source.spatial_load(mesh) {
        None => Ok(NodalVector::zeros(mesh)),
        Some(b) => {
            let phi = source.time_factor(t);
            NodalVector::from_values(mesh, b.into_iter().map(|v| phi * v).collect())
        }
    }
}

/// Matrices and cached loads shared by all steps of one run.
#[derive(Clone, Debug)]
pub struct Stepper<'a, T> {
    spec: &'a ProblemSpec<T>,
    mesh: Mesh1D<T>,
    n_steps: usize,
    mass: TriDiagMatrix<T>,
    stiffness: TriDiagMatrix<T>,
    weights: CqWeights<T>,
    spatial_load: Option<Vec<T>>,
}

impl<'a, T: Scalar> Stepper<'a, T> {
    pub fn new(spec: &'a ProblemSpec<T>, mesh: Mesh1D<T>, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::invalid("number of time steps must be at least 1"));
        }
        let tau = spec.final_time() / T::from_count(n_steps);
        let weights = CqWeights::new(spec.alpha(), tau, n_steps + 1)?;
        Self::with_weights(spec, mesh, n_steps, weights)
    }

    /// Uses externally generated weights (must match `α` and `τ = T/L`).
    pub fn with_weights(
        spec: &'a ProblemSpec<T>,
        mesh: Mesh1D<T>,
        n_steps: usize,
        weights: CqWeights<T>,
    ) -> Result<Self> {
        let tau = spec.final_time() / T::from_count(n_steps);
        let tol = T::lit(64.0) * T::epsilon();
        if (weights.tau() - tau).abs() > tol * tau || weights.alpha() != spec.alpha() {
            return Err(Error::invalid(format!(
                "weights were generated for alpha={}, tau={}; problem needs alpha={}, tau={}",
                weights.alpha(),
                weights.tau(),
                spec.alpha(),
                tau
            )));
        }
        if weights.len() < n_steps {
            return Err(Error::invalid(format!(
                "{} steps need at least {} weights, got {}",
                n_steps,
                n_steps,
                weights.len()
            )));
        }
        Ok(Stepper {
            spec,
            mesh,
            n_steps,
            mass: assemble_mass(&mesh),
            stiffness: assemble_stiffness(&mesh),
            spatial_load: spec.source().spatial_load(&mesh),
            weights,
        })
    }

    pub fn mesh(&self) -> &Mesh1D<T> {
        &self.mesh
    }

    pub fn weights(&self) -> &CqWeights<T> {
        &self.weights
    }

    pub fn time(&self, n: usize) -> T {
        self.spec.final_time() * T::from_count(n) / T::from_count(self.n_steps)
    }

    /// Computes `W^n` from `states = [W^0, …, W^{n−1}]` (further entries ignored).
    pub fn step(&self, states: &[NodalVector<T>], n: usize) -> Result<NodalVector<T>> {
        if n == 0 || n > self.n_steps {
            return Err(Error::invalid(format!(
                "step index must lie in 1..={}, got {n}",
                self.n_steps
            )));
        }
        if states.len() < n {
            return Err(Error::invalid(format!(
                "step {n} needs W^0..W^{}, only {} states given",
                n - 1,
                states.len()
            )));
        }
        let dofs = self.mesh.n_dofs();
        let tau = self.weights.tau();
        let t_n = self.time(n);
        let kappa = self.spec.coefficient().kappa(t_n);

        // H^n = Σ_{i=1}^{n−1} d_i W^{n−i}
        let mut history = vec![T::zero(); dofs];
        for i in 1..n {
            let d = self.weights.weight(i);
            for (h, &w) in history.iter_mut().zip(states[n - i].values()) {
                *h += d * w;
            }
        }

        let mut rhs = self.mass.apply(states[n - 1].values());
        let inv_tau = T::one() / tau;
        for r in rhs.iter_mut() {
            *r *= inv_tau;
        }
        if let Some(load) = &self.spatial_load {
            let phi = self.spec.source().time_factor(t_n);
            for (r, &b) in rhs.iter_mut().zip(load) {
                *r += phi * b;
            }
        }
        if n > 1 && kappa != T::zero() {
            let s_h = self.stiffness.apply(&history);
            for (r, &v) in rhs.iter_mut().zip(&s_h) {
                *r -= kappa * v;
            }
        }

        let system = self
            .mass
            .combine(inv_tau, &self.stiffness, self.weights.weight(0) * kappa);
        let w = system.solve(&rhs).map_err(|e| match e {
            Error::SingularMatrix { row } => {
                Error::Internal(format!("step {n}: singular system at row {row}"))
            }
            other => other,
        })?;
        NodalVector::from_values(&self.mesh, w)
    }
}

/// Advances `run` by one step: computes `W^n` for `n = run.steps_done() + 1`
/// using `weights` and appends it. Returns the new state.
pub fn step<'r, T: Scalar>(
    run: &'r mut DiscreteRun<T>,
    spec: &ProblemSpec<T>,
    weights: &CqWeights<T>,
) -> Result<&'r NodalVector<T>> {
    let n = run.steps_done() + 1;
    let stepper = Stepper::with_weights(spec, run.mesh, run.n_steps, weights.clone())?;
    let w = stepper.step(run.trajectory(), n)?;
    run.push(w)?;
    Ok(run.final_state())
}

/// Runs the scheme for `n_steps` steps on the uniform mesh with `n_cells` cells.
pub fn solve<T: Scalar>(
    spec: &ProblemSpec<T>,
    n_cells: usize,
    n_steps: usize,
) -> Result<DiscreteRun<T>> {
    solve_on(spec, Mesh1D::new(n_cells)?, n_steps)
}

pub fn solve_on<T: Scalar>(
    spec: &ProblemSpec<T>,
    mesh: Mesh1D<T>,
    n_steps: usize,
) -> Result<DiscreteRun<T>> {
    let stepper = Stepper::new(spec, mesh, n_steps)?;
    let mut run = DiscreteRun::start(spec, mesh, n_steps)?;
    for n in 1..=n_steps {
        let w = stepper.step(run.trajectory(), n)?;
        run.push(w)?;
    }
    Ok(run)
}
