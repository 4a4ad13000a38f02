use std::ops::{Index, IndexMut};

use crate::{Error, Result, Scalar};

/// Uniform partition of (0, 1) into `n_cells` elements of width `h = 1/n_cells`.
///
/// Degrees of freedom are the interior nodes `x_j = j·h`, `j = 1..n_cells−1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mesh1D<T> {
    n_cells: usize,
    h: T,
}

/// Builds the uniform mesh with `n_cells ≥ 2` elements.
pub fn build_mesh<T: Scalar>(n_cells: usize) -> Result<Mesh1D<T>> {
    Mesh1D::new(n_cells)
}

impl<T: Scalar> Mesh1D<T> {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::invalid(format!(
                "mesh needs at least 2 cells, got {n_cells}"
            )));
        }
        Ok(Mesh1D {
            n_cells,
            h: T::one() / T::from_count(n_cells),
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Cell width.
    pub fn h(&self) -> T {
        self.h
    }

    /// Number of interior degrees of freedom.
    pub fn n_dofs(&self) -> usize {
        self.n_cells - 1
    }

    /// Coordinate of mesh vertex `k`, `0 ≤ k ≤ n_cells` (vertex 0 and `n_cells` are
    /// the boundary).
    pub fn vertex(&self, k: usize) -> T {
        T::from_count(k) / T::from_count(self.n_cells)
    }

    /// Coordinate of interior degree of freedom `dof` (0-based), i.e. vertex `dof + 1`.
    pub fn node(&self, dof: usize) -> T {
        self.vertex(dof + 1)
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = T> + '_ {
        (1..self.n_cells).map(move |k| self.vertex(k))
    }

    /// The mesh with every cell bisected.
    pub fn refined(&self) -> Self {
        Mesh1D {
            n_cells: 2 * self.n_cells,
            h: T::one() / T::from_count(2 * self.n_cells),
        }
    }
}

/// Coefficients of a piecewise-linear function in the hat basis of the
/// interior nodes of a mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalVector<T> {
    n_cells: usize,
    values: Vec<T>,
}

impl<T: Scalar> NodalVector<T> {
    pub fn zeros(mesh: &Mesh1D<T>) -> Self {
        NodalVector {
            n_cells: mesh.n_cells(),
            values: vec![T::zero(); mesh.n_dofs()],
        }
    }

    pub fn from_values(mesh: &Mesh1D<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != mesh.n_dofs() {
            return Err(Error::invalid(format!(
                "nodal vector has {} values, mesh with {} cells has {} interior nodes",
                values.len(),
                mesh.n_cells(),
                mesh.n_dofs()
            )));
        }
        Ok(NodalVector {
            n_cells: mesh.n_cells(),
            values,
        })
    }

    pub fn from_fn(mesh: &Mesh1D<T>, f: impl Fn(T) -> T) -> Self {
        NodalVector {
            n_cells: mesh.n_cells(),
            values: mesh.interior_nodes().map(f).collect(),
        }
    }

    /// Number of cells of the mesh this vector belongs to.
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn is_on(&self, mesh: &Mesh1D<T>) -> bool {
        self.n_cells == mesh.n_cells() && self.values.len() == mesh.n_dofs()
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: T, other: &Self) {
        debug_assert_eq!(self.n_cells, other.n_cells);
        for (y, &x) in self.values.iter_mut().zip(other.values.iter()) {
            *y += a * x;
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        NodalVector {
            n_cells: self.n_cells,
            values: self.values.iter().map(|&v| a * v).collect(),
        }
    }

    /// `self − other`.
    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n_cells, other.n_cells);
        NodalVector {
            n_cells: self.n_cells,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }
}

impl<T> Index<usize> for NodalVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}

impl<T> IndexMut<usize> for NodalVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.values[i]
    }
}

/// Exact L² norm `√(vᵀ M v)` of the piecewise-linear function with nodal
/// values `v` and zero boundary values.
pub fn l2_norm<T: Scalar>(mesh: &Mesh1D<T>, v: &NodalVector<T>) -> T {
    debug_assert!(v.is_on(mesh));
    let vals = v.values();
    // Σ over cells of h/3·(a² + ab + b²), boundary values are zero.
    let mut acc = T::zero();
    let mut left = T::zero();
    for &right in vals.iter().chain(std::iter::once(&T::zero())) {
        acc += left * left + left * right + right * right;
        left = right;
    }
    (acc * mesh.h() / T::lit(3.0)).max(T::zero()).sqrt()
}

/// Interpolates a coarse-mesh P1 function onto the mesh with twice as many
/// cells: shared vertices are copied and new midpoints take the average of
/// their neighbours, so the represented function is unchanged.
pub fn prolong<T: Scalar>(
    v_coarse: &NodalVector<T>,
    mesh_fine: &Mesh1D<T>,
) -> Result<NodalVector<T>> {
    if mesh_fine.n_cells() != 2 * v_coarse.n_cells() {
        return Err(Error::invalid(format!(
            "prolongation needs a fine mesh with {} cells, got {}",
            2 * v_coarse.n_cells(),
            mesh_fine.n_cells()
        )));
    }
    let half = T::lit(0.5);
    let coarse = v_coarse.values();
    let mut fine = Vec::with_capacity(mesh_fine.n_dofs());
    let mut left = T::zero();
    for &right in coarse.iter() {
        fine.push(half * (left + right));
        fine.push(right);
        left = right;
    }
    fine.push(half * left);
    NodalVector::from_values(mesh_fine, fine)
}
