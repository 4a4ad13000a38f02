use crate::{Error, Result, Scalar};

use super::mesh::{Mesh1D, NodalVector};
use super::quadrature::gauss4;

/// Restriction of a [`PiecewiseFn`] to one of its subintervals.
#[derive(Clone, Debug, PartialEq)]
pub enum Piece<T> {
    /// `c₀ + c₁x + c₂x² + c₃x³` in the global coordinate `x`.
    Polynomial([T; 4]),
    /// `amplitude · sin(mode·π·x)`, integrated by composite Gauss quadrature.
    Sine { amplitude: T, mode: u32 },
}

impl<T: Scalar> Piece<T> {
    pub fn eval(&self, x: T) -> T {
        match self {
            Piece::Polynomial(c) => ((c[3] * x + c[2]) * x + c[1]) * x + c[0],
            Piece::Sine { amplitude, mode } => {
                *amplitude * (T::from_count(*mode as usize) * T::PI() * x).sin()
            }
        }
    }

    pub fn derivative(&self, x: T) -> T {
        match self {
            Piece::Polynomial(c) => (T::lit(3.0) * c[3] * x + T::lit(2.0) * c[2]) * x + c[1],
            Piece::Sine { amplitude, mode } => {
                let k = T::from_count(*mode as usize) * T::PI();
                *amplitude * k * (k * x).cos()
            }
        }
    }

    fn scaled(&self, a: T) -> Self {
        match self {
            Piece::Polynomial(c) => Piece::Polynomial([a * c[0], a * c[1], a * c[2], a * c[3]]),
            Piece::Sine { amplitude, mode } => Piece::Sine {
                amplitude: a * *amplitude,
                mode: *mode,
            },
        }
    }

    /// `∫_lo^hi self(x)·(x − anchor) dx`.
    ///
    /// Polynomials are re-expanded about `lo` so the antiderivative is
    /// evaluated on `[0, hi − lo]` without cancellation.
    fn moment(&self, lo: T, hi: T, anchor: T) -> T {
        match self {
            Piece::Polynomial(c) => {
                let three = T::lit(3.0);
                // Taylor coefficients about lo.
                let p0 = self.eval(lo);
                let p1 = self.derivative(lo);
                let p2 = c[2] + three * c[3] * lo;
                let p3 = c[3];
                // (x − anchor) = s + shift with s = x − lo.
                let shift = lo - anchor;
                let q = [
                    p0 * shift,
                    p0 + p1 * shift,
                    p1 + p2 * shift,
                    p2 + p3 * shift,
                    p3,
                ];
                let w = hi - lo;
                let mut acc = T::zero();
                for k in (0..q.len()).rev() {
                    acc = acc * w + q[k] / T::from_count(k + 1);
                }
                acc * w
            }
            Piece::Sine { mode, .. } => {
                // Composite rule: about eight panels per half-wavelength.
                let panels = ((hi - lo) * T::from_count(8 * *mode as usize))
                    .ceil()
                    .max(T::one());
                let m = panels.to_usize().unwrap_or(1);
                let w = (hi - lo) / T::from_count(m);
                (0..m)
                    .map(|j| {
                        let a = lo + w * T::from_count(j);
                        gauss4(a, a + w, |x| self.eval(x) * (x - anchor))
                    })
                    .sum()
            }
        }
    }
}

/// A function on [0, 1] given piecewise on sorted breakpoints
/// `0 = b₀ < b₁ < … < b_m = 1`.
///
/// The `smooth` flag records whether the function is regular enough for the
/// Ritz projection; it is set by the constructors and can be overridden with
/// [`PiecewiseFn::with_smooth`].
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFn<T> {
    breakpoints: Vec<T>,
    pieces: Vec<Piece<T>>,
    smooth: bool,
}

impl<T: Scalar> PiecewiseFn<T> {
    pub fn from_pieces(breakpoints: Vec<T>, pieces: Vec<Piece<T>>, smooth: bool) -> Result<Self> {
        if breakpoints.len() < 2 || pieces.len() + 1 != breakpoints.len() {
            return Err(Error::invalid(format!(
                "{} breakpoints cannot delimit {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints[0] != T::zero() || breakpoints[breakpoints.len() - 1] != T::one() {
            return Err(Error::invalid("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        Ok(PiecewiseFn {
            breakpoints,
            pieces,
            smooth,
        })
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    pub fn constant(c: T) -> Self {
        Self::polynomial([c, T::zero(), T::zero(), T::zero()])
    }

    pub fn polynomial(coefficients: [T; 4]) -> Self {
        PiecewiseFn {
            breakpoints: vec![T::zero(), T::one()],
            pieces: vec![Piece::Polynomial(coefficients)],
            smooth: true,
        }
    }

    /// `sin(mode·π·x)`.
    pub fn sine(mode: u32) -> Self {
        PiecewiseFn {
            breakpoints: vec![T::zero(), T::one()],
            pieces: vec![Piece::Sine {
                amplitude: T::one(),
                mode,
            }],
            smooth: true,
        }
    }

    /// Indicator of `[a, b] ⊆ [0, 1]`; endpoint inclusion is immaterial in L².
    pub fn characteristic(a: T, b: T) -> Result<Self> {
        if !(T::zero() <= a && a < b && b <= T::one()) {
            return Err(Error::invalid(format!(
                "characteristic function needs 0 ≤ a < b ≤ 1, got [{a}, {b}]"
            )));
        }
        let one = Piece::Polynomial([T::one(), T::zero(), T::zero(), T::zero()]);
        let zero = Piece::Polynomial([T::zero(); 4]);
        let mut breakpoints = vec![T::zero()];
        let mut pieces = Vec::new();
        if a > T::zero() {
            breakpoints.push(a);
            pieces.push(zero.clone());
        }
        pieces.push(one);
        breakpoints.push(b);
        if b < T::one() {
            pieces.push(zero);
            breakpoints.push(T::one());
        }
        Self::from_pieces(breakpoints, pieces, false)
    }

    /// The continuous piecewise-linear function with the given interior nodal
    /// values and zero boundary values.
    pub fn from_nodal(mesh: &Mesh1D<T>, v: &NodalVector<T>) -> Result<Self> {
        if !v.is_on(mesh) {
            return Err(Error::invalid("nodal vector does not belong to the mesh"));
        }
        let n = mesh.n_cells();
        let mut values = Vec::with_capacity(n + 1);
        values.push(T::zero());
        values.extend_from_slice(v.values());
        values.push(T::zero());
        let breakpoints: Vec<T> = (0..=n).map(|k| mesh.vertex(k)).collect();
        let pieces = (0..n)
            .map(|k| {
                let slope = (values[k + 1] - values[k]) / mesh.h();
                let intercept = values[k] - slope * breakpoints[k];
                Piece::Polynomial([intercept, slope, T::zero(), T::zero()])
            })
            .collect();
        Self::from_pieces(breakpoints, pieces, false)
    }

    pub fn with_smooth(mut self, smooth: bool) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn scaled(&self, a: T) -> Self {
        PiecewiseFn {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scaled(a)).collect(),
            smooth: self.smooth,
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    /// True when every piece is identically zero.
    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| match p {
            Piece::Polynomial(c) => c.iter().all(|&v| v == T::zero()),
            Piece::Sine { amplitude, mode } => *amplitude == T::zero() || *mode == 0,
        })
    }

    fn piece_index(&self, x: T) -> usize {
        // Last piece whose left breakpoint is ≤ x; points left of 0 or right
        // of 1 fall into the outermost pieces.
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn eval(&self, x: T) -> T {
        self.pieces[self.piece_index(x)].eval(x)
    }

    /// Largest jump of the function across interior breakpoints.
    pub fn max_jump(&self) -> T {
        let mut jump = T::zero();
        for (k, &b) in self.breakpoints[1..self.breakpoints.len() - 1]
            .iter()
            .enumerate()
        {
            let left = self.pieces[k].eval(b);
            let right = self.pieces[k + 1].eval(b);
            jump = jump.max((left - right).abs());
        }
        jump
    }

    /// Whether `∫ g′ v′` is meaningful: flagged smooth and continuous.
    pub fn has_derivative(&self) -> bool {
        self.smooth && self.max_jump() <= T::lit(1e3) * T::epsilon()
    }

    /// Visits every nonempty intersection of mesh cell `[x_k, x_{k+1}]` with a
    /// piece, in increasing order.
    fn for_each_segment(&self, mesh: &Mesh1D<T>, mut visit: impl FnMut(usize, T, T, &Piece<T>)) {
        let mut p = 0;
        for k in 0..mesh.n_cells() {
            let lo_cell = mesh.vertex(k);
            let hi_cell = mesh.vertex(k + 1);
            while p + 1 < self.pieces.len() && self.breakpoints[p + 1] <= lo_cell {
                p += 1;
            }
            let mut q = p;
            while q < self.pieces.len() && self.breakpoints[q] < hi_cell {
                let lo = lo_cell.max(self.breakpoints[q]);
                let hi = hi_cell.min(self.breakpoints[q + 1]);
                if hi > lo {
                    visit(k, lo, hi, &self.pieces[q]);
                }
                q += 1;
            }
        }
    }

    /// Load vector `b_j = ∫₀¹ g φ_j` over the interior hat functions.
    ///
    /// Cells are split at the breakpoints; polynomial pieces are integrated
    /// exactly, sine pieces by a four-point Gauss rule per segment.
    pub fn integrate_against_hats(&self, mesh: &Mesh1D<T>) -> Vec<T> {
        let n = mesh.n_cells();
        let h = mesh.h();
        let mut b = vec![T::zero(); mesh.n_dofs()];
        self.for_each_segment(mesh, |k, lo, hi, piece| {
            let left = mesh.vertex(k);
            let right = mesh.vertex(k + 1);
            // Hat of vertex k falls as (right − x)/h, hat of vertex k+1 rises as (x − left)/h.
            if k >= 1 {
                b[k - 1] -= piece.moment(lo, hi, right) / h;
            }
            if k < n - 1 {
                b[k] += piece.moment(lo, hi, left) / h;
            }
        });
        b
    }

    /// Ritz load `b_j = ∫₀¹ g′ φ_j′`, four-point Gauss per segment.
    pub fn integrate_derivative_against_hats(&self, mesh: &Mesh1D<T>) -> Result<Vec<T>> {
        if !self.has_derivative() {
            return Err(Error::invalid(
                "function lacks derivative data (not flagged smooth or discontinuous)",
            ));
        }
        let n = mesh.n_cells();
        let h = mesh.h();
        let mut b = vec![T::zero(); mesh.n_dofs()];
        self.for_each_segment(mesh, |k, lo, hi, piece| {
            let integral = (piece.eval(hi) - piece.eval(lo)) / h;
            if k >= 1 {
                b[k - 1] -= integral;
            }
            if k < n - 1 {
                b[k] += integral;
            }
        });
        Ok(b)
    }
}
