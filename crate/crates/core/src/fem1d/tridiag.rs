use crate::{Error, Result, Scalar};

use super::mesh::{Mesh1D, NodalVector};

/// Tridiagonal matrix stored by diagonals.
///
/// `sub[i]` couples row `i + 1` to column `i`, `sup[i]` couples row `i` to
/// column `i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriDiagMatrix<T> {
    sub: Vec<T>,
    diag: Vec<T>,
    sup: Vec<T>,
}

impl<T: Scalar> TriDiagMatrix<T> {
    pub fn new(sub: Vec<T>, diag: Vec<T>, sup: Vec<T>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::invalid(
                "tridiagonal matrix must have at least one row",
            ));
        }
        if sub.len() != n - 1 || sup.len() != n - 1 {
            return Err(Error::invalid(format!(
                "off-diagonals must have length {}, got sub={} sup={}",
                n - 1,
                sub.len(),
                sup.len()
            )));
        }
        Ok(TriDiagMatrix { sub, diag, sup })
    }

    /// Symmetric Toeplitz matrix with constant diagonal and off-diagonal.
    pub fn symmetric_constant(n: usize, diag: T, off: T) -> Self {
        assert!(n >= 1);
        TriDiagMatrix {
            sub: vec![off; n - 1],
            diag: vec![diag; n],
            sup: vec![off; n - 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[T] {
        &self.sub
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn sup(&self) -> &[T] {
        &self.sup
    }

    pub fn is_symmetric(&self) -> bool {
        self.sub == self.sup
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        assert_eq!(self.dim(), other.dim());
        let lin = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&p, &q)| a * p + b * q).collect();
        TriDiagMatrix {
            sub: lin(&self.sub, &other.sub),
            diag: lin(&self.diag, &other.diag),
            sup: lin(&self.sup, &other.sup),
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        let sc = |x: &[T]| x.iter().map(|&p| a * p).collect();
        TriDiagMatrix {
            sub: sc(&self.sub),
            diag: sc(&self.diag),
            sup: sc(&self.sup),
        }
    }

    /// `y = A x` into a caller-provided buffer.
    pub fn apply_into(&self, x: &[T], y: &mut [T]) {
        let n = self.dim();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.sub[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.sup[i].abs();
                }
                s
            })
            .fold(T::zero(), T::max)
    }

    /// Pivots of Gaussian elimination without pivoting. For a symmetric
    /// matrix, all pivots positive ⇔ all leading minors positive.
    pub fn pivots(&self) -> Vec<T> {
        let n = self.dim();
        let mut piv = Vec::with_capacity(n);
        piv.push(self.diag[0]);
        for i in 1..n {
            let prev = piv[i - 1];
            piv.push(self.diag[i] - self.sub[i - 1] * self.sup[i - 1] / prev);
        }
        piv
    }

    /// Solves `A x = rhs` by the Thomas algorithm (no pivoting).
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::invalid(format!(
                "right-hand side has length {}, matrix has {n} rows",
                rhs.len()
            )));
        }
        let mut c = vec![T::zero(); n];
        let mut x = vec![T::zero(); n];

        let mut pivot = self.diag[0];
        check_pivot(pivot, 0)?;
        if n > 1 {
            c[0] = self.sup[0] / pivot;
        }
        x[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.sub[i - 1] * c[i - 1];
            check_pivot(pivot, i)?;
            if i + 1 < n {
                c[i] = self.sup[i] / pivot;
            }
            x[i] = (rhs[i] - self.sub[i - 1] * x[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= c[i] * next;
        }
        Ok(x)
    }
}

fn check_pivot<T: Scalar>(pivot: T, row: usize) -> Result<()> {
    if pivot == T::zero() || !pivot.is_finite() {
        Err(Error::SingularMatrix { row })
    } else {
        Ok(())
    }
}

/// Consistent mass matrix `M_ij = ∫ φ_i φ_j` on the interior nodes:
/// diagonal `2h/3`, off-diagonal `h/6`.
pub fn assemble_mass<T: Scalar>(mesh: &Mesh1D<T>) -> TriDiagMatrix<T> {
    let h = mesh.h();
    TriDiagMatrix::symmetric_constant(
        mesh.n_dofs(),
        T::lit(4.0) * h / T::lit(6.0),
        h / T::lit(6.0),
    )
}

/// Stiffness matrix `S_ij = ∫ φ_i′ φ_j′`: diagonal `2/h`, off-diagonal `−1/h`.
pub fn assemble_stiffness<T: Scalar>(mesh: &Mesh1D<T>) -> TriDiagMatrix<T> {
    let h = mesh.h();
    TriDiagMatrix::symmetric_constant(mesh.n_dofs(), T::lit(2.0) / h, -T::one() / h)
}

/// Solves `A x = rhs` for a nodal right-hand side.
pub fn solve_tridiag<T: Scalar>(
    a: &TriDiagMatrix<T>,
    rhs: &NodalVector<T>,
) -> Result<NodalVector<T>> {
    if a.dim() != rhs.len() {
        return Err(Error::invalid(format!(
            "matrix has {} rows, vector has {} entries",
            a.dim(),
            rhs.len()
        )));
    }
    let x = a.solve(rhs.values())?;
    let mut out = rhs.clone();
    out.values_mut().copy_from_slice(&x);
    Ok(out)
}
